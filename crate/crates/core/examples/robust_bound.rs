//! End-to-end robust approximation run from `examples/data/robust_case_i.json`:
//! five empirical mixtures on [0, 1], sigmoid fits of sin(2 pi x), and the
//! Hölder certificate for the selected network. Artifacts go to the
//! directory given as the first argument, or `robust-out`.

use std::path::{Path, PathBuf};

use orlicz_uat::robust::{self, RobustConfig};

pub fn run_in(out: &Path) -> orlicz_uat::Result<robust::RobustReport> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/robust_case_i.json");
    let cfg: RobustConfig = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
    let mut outcome = robust::run_robust_experiment(&cfg, path.parent())?;
    robust::write_artifacts(&mut outcome, out)?;
    let r = &outcome.report;
    println!("case {} stopped at width {} (seed {})", r.case, r.width, r.seed);
    println!("sup_nu L1 error {:.6} (target {})", r.sup_l1, r.epsilon);
    println!(
        "bound 2 * {:.6} * {:.6} = {:.6}, holds: {}",
        r.gauge_error, r.density_norm_sup, r.holder_rhs, r.bound_holds
    );
    Ok(outcome.report)
}

pub fn run() -> orlicz_uat::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "robust-out".into());
    run_in(&out).map(drop)
}

#[allow(dead_code)]
fn main() -> orlicz_uat::Result<()> {
    run()
}
