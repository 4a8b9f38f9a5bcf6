//! Hypothesis checks for functional-input networks: additive-family axioms,
//! weight compatibility and activation growth.

use orlicz_uat::fit::{self, FeatureConfig, TargetFunction};
use orlicz_uat::measure::DiscreteMeasure;
use orlicz_uat::net::{self, Activation, AffineFamily, Fnn};
use orlicz_uat::orlicz::WeightFn;

pub fn run() -> orlicz_uat::Result<()> {
    let probes: Vec<Vec<f64>> = (0..=20).map(|i| vec![-10.0 + i as f64]).collect();
    for family in [AffineFamily::Affine { dim: 1 }, AffineFamily::Linear { dim: 1 }, AffineFamily::Zero { dim: 1 }] {
        let r = net::check_additive_family(&family, &probes, 16, 0);
        println!("{:<7} all axioms: {:<5} first failure: {:?}", r.family, r.all_pass(), r.failure);
    }

    let maps = AffineFamily::Affine { dim: 1 }.samples(16, 1);
    let w = WeightFn::OnePlusSquaredNorm;
    let wc = net::check_weight_compatibility(&maps, &w, &w, &probes)?;
    println!("sup w1(h(x)) / w(x) = {:.3} (admissible weight: {})", wc.sup_ratio, wc.admissible);
    let zs: Vec<f64> = probes.iter().flat_map(|p| maps.iter().map(move |h| h.eval(p))).collect();
    println!("sup |sigmoid(z)| / w1(z) = {:.3}", net::activation_growth_ratio(Activation::Sigmoid, &w, &zs)?);

    let mu = DiscreteMeasure::new(probes.iter().map(|p| vec![p[0] / 10.0]).collect(), vec![1.0 / 21.0; 21])?;
    let shallow = fit::fit_random_features(&TargetFunction::sin_2pi(), &mu, 16, 3, &FeatureConfig::default())?;
    let fnn = Fnn::from_shallow(&shallow)?;
    println!(
        "FNN with {} hidden maps; matches the shallow fit at 0.3: {:.12} vs {:.12}",
        fnn.spec().hidden.len(),
        fnn.evaluate(&[0.3])?[0],
        shallow.evaluate(&[0.3])?[0]
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> orlicz_uat::Result<()> {
    run()
}
