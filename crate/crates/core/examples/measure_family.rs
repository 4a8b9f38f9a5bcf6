//! A finite family of measures: its dominating average, Radon-Nikodym
//! densities, and the Orlicz bound on those densities that picks psi_M.

use orlicz_uat::measure::{self, DiscreteMeasure, MeasureFamily};
use orlicz_uat::orlicz::GaugeOptions;
use orlicz_uat::robust;

pub fn run() -> orlicz_uat::Result<()> {
    let pts = |xs: &[f64]| xs.iter().map(|x| vec![*x]).collect::<Vec<_>>();
    let family = MeasureFamily::new(vec![
        DiscreteMeasure::new(pts(&[0.0, 0.5, 1.0]), vec![0.5, 0.3, 0.2])?,
        DiscreteMeasure::new(pts(&[0.5, 1.0, 1.5]), vec![0.1, 0.1, 0.8])?,
        DiscreteMeasure::dirac(vec![0.0])?,
    ])?;
    let mu = family.dominating();
    println!("dominating measure on {} points, mass {:.3}", mu.len(), mu.mass());
    for (k, d) in family.densities().iter().enumerate() {
        println!("  d nu_{k} / d mu = {d:.3?}");
    }
    println!("reconstruction error {:.1e}", family.reconstruction_error());

    let pair = robust::associated_young_pair(&family, &measure::default_psi_candidates(), &GaugeOptions::default())?;
    println!(
        "psi_M = {}, phi_M = {}, sup density norm {:.6}",
        pair.psi, pair.phi, pair.certificate.sup_norm
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> orlicz_uat::Result<()> {
    run()
}
