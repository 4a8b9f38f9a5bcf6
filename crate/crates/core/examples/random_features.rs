//! Approximation curve of sin(2 pi x) by sigmoid random-feature networks,
//! measured in the L^2 gauge norm on an empirical measure.

use orlicz_uat::emit;
use orlicz_uat::fit::{self, CurveOptions, TargetFunction};
use orlicz_uat::measure::{self, DensitySpec};
use orlicz_uat::young::YoungFunction;
use orlicz_uat::AxisBox;

pub fn run() -> orlicz_uat::Result<()> {
    let unit = AxisBox::cube(1, 0.0, 1.0)?;
    let mu = measure::sample_empirical(&DensitySpec::by_name("uniform", &unit)?, 256, 11, &unit)?;
    let f = TargetFunction::sin_2pi();
    let phi = YoungFunction::power(2.0, 1.0)?;
    let rows = fit::approximation_curve(&f, &mu, &phi, &[0, 4, 8, 16, 32, 64], &[0, 1, 2], &CurveOptions::default())?;
    print!("{}", emit::csv_string(&rows)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> orlicz_uat::Result<()> {
    run()
}
