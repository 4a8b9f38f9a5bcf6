//! Complementary Young functions, closed form and numeric, with a sampled
//! check of Young's inequality.

use orlicz_uat::young::{self, ConjugateGrid, YoungFunction};

pub fn run() -> orlicz_uat::Result<()> {
    let grid = ConjugateGrid {
        y_min: 0.1,
        y_max: 10.0,
        count: 65,
    };
    for p in [1.5, 2.0, 3.0] {
        let phi = YoungFunction::normalized_power(p)?;
        let closed = young::complementary(&phi, &grid)?;
        let q = p / (p - 1.0);
        let worst = grid.nodes()?[1..]
            .iter()
            .map(|&y| {
                let want = y.powf(q) / q;
                (young::conjugate_at(&phi, y).unwrap() - want).abs() / want
            })
            .fold(0.0, f64::max);
        println!("{phi} -> {closed}; numeric transform rel. error {worst:.2e}");
    }

    let phi = YoungFunction::exp_minus_linear();
    let psi = young::complementary(&phi, &grid)?;
    println!("{phi} -> {psi}; psi(e - 1) = {:.9}", psi.evaluate(std::f64::consts::E - 1.0)?);

    let report = young::check_young_inequality(&phi, &psi, 10_000, 7, 4.0);
    println!("Young's inequality on 10^4 pairs: max violation {:.1e}", report.max_violation);
    for w in &report.witnesses {
        println!("  tight at x = {:.4}, y = {:.4}, slack {:.2e}", w.x, w.y, w.slack);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> orlicz_uat::Result<()> {
    run()
}
