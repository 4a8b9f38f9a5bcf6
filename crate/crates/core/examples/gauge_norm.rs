//! Luxemburg norms of one table under several Young functions, next to the
//! closed-form L^p values they must reproduce.

use orlicz_uat::measure::DiscreteMeasure;
use orlicz_uat::orlicz::{self, FunctionTable, GaugeOptions};
use orlicz_uat::young::YoungFunction;

pub fn run() -> orlicz_uat::Result<()> {
    let mu = DiscreteMeasure::new(vec![vec![0.0], vec![0.5], vec![1.0]], vec![0.25, 0.25, 0.5])?;
    let f = FunctionTable::from_scalars(vec![1.0, -2.0, 0.5])?;
    let opts = GaugeOptions::default();

    for p in [1.0, 1.5, 2.0, 3.0] {
        let phi = YoungFunction::power(p, 1.0)?;
        let n = orlicz::gauge_norm(&phi, &mu, &f, &opts)?;
        let lp: f64 = f
            .as_flat()
            .iter()
            .zip(mu.weights())
            .map(|(v, w)| v.abs().powf(p) * w)
            .sum::<f64>()
            .powf(1.0 / p);
        println!("p = {p:<4} gauge {:.12}  L^p {:.12}  ({} bisection steps)", n.value, lp, n.iterations);
        assert!((n.value - lp).abs() <= 1e-8 * lp);
    }

    for phi in [YoungFunction::exp_minus_linear(), YoungFunction::entropy()] {
        let n = orlicz::gauge_norm(&phi, &mu, &f, &opts)?;
        println!("{phi:<24} gauge {:.12}  modular at norm {:.3e}", n.value, n.modular_at_value);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> orlicz_uat::Result<()> {
    run()
}
