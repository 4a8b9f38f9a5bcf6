//! Finite-support measures, measure families with a dominating measure, and
//! De la Vallée Poussin certificates for the family's densities.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::domain::AxisBox;
use crate::error::{Error, Result};
use crate::orlicz::{self, GaugeOptions};
use crate::young::YoungFunction;

/// Hash key for a point; `-0.0` and `0.0` collide.
pub(crate) fn point_key(x: &[f64]) -> Vec<u64> {
    x.iter()
        .map(|v| if *v == 0.0 { 0 } else { v.to_bits() })
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureSpec {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

/// Nonnegative weights on finitely many distinct points of `R^dim`.
///
/// Construction merges duplicate points (summing weights) and drops
/// zero-weight points, keeping first-occurrence order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpec", into = "MeasureSpec")]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    index: HashMap<Vec<u64>, usize>,
}

impl PartialEq for DiscreteMeasure {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points && self.weights == other.weights
    }
}

impl TryFrom<MeasureSpec> for DiscreteMeasure {
    type Error = Error;
    fn try_from(spec: MeasureSpec) -> Result<Self> {
        let m = DiscreteMeasure::new(spec.points, spec.weights)?;
        if m.dim != spec.dim {
            return Err(Error::InvalidMeasure(format!(
                "declared dim {} but points have dimension {}",
                spec.dim, m.dim
            )));
        }
        Ok(m)
    }
}

impl From<DiscreteMeasure> for MeasureSpec {
    fn from(m: DiscreteMeasure) -> Self {
        MeasureSpec {
            dim: m.dim,
            points: m.points,
            weights: m.weights,
        }
    }
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let dim = points.first().map(Vec::len).unwrap_or(0);
        let mut merged_points: Vec<Vec<f64>> = Vec::new();
        let mut merged_weights: Vec<f64> = Vec::new();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        for (p, w) in points.into_iter().zip(weights) {
            if p.len() != dim || dim == 0 {
                return Err(Error::InvalidMeasure("points must share a positive dimension".into()));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidMeasure(format!("non-finite point {p:?}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidMeasure(format!("weight {w} is negative or non-finite")));
            }
            if w == 0.0 {
                continue;
            }
            match index.get(&point_key(&p)) {
                Some(&i) => merged_weights[i] += w,
                None => {
                    index.insert(point_key(&p), merged_points.len());
                    merged_points.push(p);
                    merged_weights.push(w);
                }
            }
        }
        if merged_points.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        Ok(DiscreteMeasure {
            dim,
            points: merged_points,
            weights: merged_weights,
            index,
        })
    }

    /// Unit mass at `x`.
    pub fn dirac(x: Vec<f64>) -> Result<Self> {
        DiscreteMeasure::new(vec![x], vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn index_of(&self, x: &[f64]) -> Option<usize> {
        self.index.get(&point_key(x)).copied()
    }

    /// `mu({x})`, zero off the support.
    pub fn weight_at(&self, x: &[f64]) -> f64 {
        self.index_of(x).map_or(0.0, |i| self.weights[i])
    }

    pub fn support_box(&self) -> AxisBox {
        AxisBox::hull(self.points.iter().map(Vec::as_slice)).expect("non-empty support")
    }

    /// `sum_x f(x) mu({x})`.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| f(p) * w)
            .sum()
    }
}

/// Named samplers for empirical measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Uniform {
        #[serde(rename = "box")]
        region: AxisBox,
    },
    GaussianClipped {
        mean: Vec<f64>,
        std: f64,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub density: DensitySpec,
}

impl DensitySpec {
    /// Sampler by name, parametrized from the clip box: `uniform` covers the
    /// box, `gaussian_clipped` is centred with a quarter-extent deviation, and
    /// `mixture` puts two such bumps at the quarter points.
    pub fn by_name(name: &str, clip_box: &AxisBox) -> Result<Self> {
        let std = 0.25 * clip_box.max_extent().max(f64::MIN_POSITIVE);
        let at = |t: f64| -> Vec<f64> {
            clip_box
                .lo()
                .iter()
                .zip(clip_box.hi())
                .map(|(l, h)| l + t * (h - l))
                .collect()
        };
        match name {
            "uniform" => Ok(DensitySpec::Uniform {
                region: clip_box.clone(),
            }),
            "gaussian_clipped" | "gaussian-clipped" => Ok(DensitySpec::GaussianClipped {
                mean: clip_box.center(),
                std,
            }),
            "mixture" => Ok(DensitySpec::Mixture {
                components: vec![
                    MixtureComponent {
                        weight: 0.5,
                        density: DensitySpec::GaussianClipped {
                            mean: at(0.25),
                            std: 0.5 * std,
                        },
                    },
                    MixtureComponent {
                        weight: 0.5,
                        density: DensitySpec::GaussianClipped {
                            mean: at(0.75),
                            std: 0.5 * std,
                        },
                    },
                ],
            }),
            other => Err(Error::UnknownSampler(other.to_string())),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            DensitySpec::Uniform { region } => Some(region.dim()),
            DensitySpec::GaussianClipped { mean, .. } => Some(mean.len()),
            DensitySpec::Mixture { components } => components.first().and_then(|c| c.density.dim()),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            DensitySpec::Uniform { region } if region.dim() != dim => {
                Err(Error::InvalidArgument("uniform box dimension mismatch".into()))
            }
            DensitySpec::GaussianClipped { mean, std } => {
                if mean.len() != dim {
                    Err(Error::InvalidArgument("gaussian mean dimension mismatch".into()))
                } else if !(std.is_finite() && *std > 0.0) {
                    Err(Error::InvalidArgument(format!("gaussian std must be > 0, got {std}")))
                } else {
                    Ok(())
                }
            }
            DensitySpec::Mixture { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidArgument("mixture without components".into()));
                }
                if components.iter().any(|c| !(c.weight.is_finite() && c.weight >= 0.0))
                    || components.iter().all(|c| c.weight == 0.0)
                {
                    return Err(Error::InvalidArgument("mixture weights must be >= 0 and not all zero".into()));
                }
                components.iter().try_for_each(|c| c.density.validate(dim))
            }
            _ => Ok(()),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            DensitySpec::Uniform { region } => region
                .lo()
                .iter()
                .zip(region.hi())
                .map(|(&l, &h)| l + (h - l) * rng.random::<f64>())
                .collect(),
            DensitySpec::GaussianClipped { mean, std } => {
                let normal = Normal::new(0.0, *std).expect("validated std");
                mean.iter().map(|m| m + normal.sample(rng)).collect()
            }
            DensitySpec::Mixture { components } => {
                let total: f64 = components.iter().map(|c| c.weight).sum();
                let mut u = rng.random::<f64>() * total;
                let mut chosen = &components[components.len() - 1];
                for c in components {
                    if u < c.weight {
                        chosen = c;
                        break;
                    }
                    u -= c.weight;
                }
                chosen.density.draw(rng)
            }
        }
    }
}

/// `n` points drawn from `spec` restricted to `clip_box`, each with weight `1/n`.
///
/// Draws outside the box are rejected; after 10 000 consecutive rejections the
/// last draw is clamped into the box.
pub fn sample_empirical(spec: &DensitySpec, n: usize, seed: u64, clip_box: &AxisBox) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be >= 1".into()));
    }
    let dim = clip_box.dim();
    if spec.dim() != Some(dim) {
        return Err(Error::InvalidArgument("sampler and clip box dimensions differ".into()));
    }
    spec.validate(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let mut x = spec.draw(&mut rng);
        let mut tries = 1;
        while !clip_box.contains(&x) && tries < 10_000 {
            x = spec.draw(&mut rng);
            tries += 1;
        }
        if !clip_box.contains(&x) {
            for (v, (l, h)) in x.iter_mut().zip(clip_box.lo().iter().zip(clip_box.hi())) {
                *v = v.clamp(*l, *h);
            }
        }
        points.push(x);
    }
    DiscreteMeasure::new(points, vec![1.0 / n as f64; n])
}

/// Average of the members over the union of their supports.
pub fn dominating_measure(members: &[DiscreteMeasure]) -> Result<DiscreteMeasure> {
    let first = members
        .first()
        .ok_or_else(|| Error::InvalidMeasure("empty family".into()))?;
    if members.iter().any(|m| m.dim() != first.dim()) {
        return Err(Error::InvalidMeasure("family members differ in dimension".into()));
    }
    let k = members.len() as f64;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for m in members {
        for (p, w) in m.points().iter().zip(m.weights()) {
            points.push(p.clone());
            weights.push(w / k);
        }
    }
    DiscreteMeasure::new(points, weights)
}

/// Radon-Nikodym density `d nu / d mu` at each support point of `mu`.
pub fn radon_nikodym(nu: &DiscreteMeasure, mu: &DiscreteMeasure) -> Result<Vec<f64>> {
    if nu.dim() != mu.dim() {
        return Err(Error::InvalidMeasure("dimension mismatch".into()));
    }
    if let Some(p) = nu.points().iter().find(|p| mu.index_of(p).is_none()) {
        return Err(Error::NotAbsolutelyContinuous { point: p.clone() });
    }
    Ok(mu
        .points()
        .iter()
        .zip(mu.weights())
        .map(|(p, &w)| {
            debug_assert!(w > 0.0, "canonical measures carry no zero weights");
            nu.weight_at(p) / w
        })
        .collect())
}

/// Finite family of measures with a common dominating measure and the
/// members' densities with respect to it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureFamily {
    members: Vec<DiscreteMeasure>,
    dominating: DiscreteMeasure,
    densities: Vec<Vec<f64>>,
}

impl MeasureFamily {
    /// Family dominated by the average of its members.
    pub fn new(members: Vec<DiscreteMeasure>) -> Result<Self> {
        let dominating = dominating_measure(&members)?;
        MeasureFamily::with_dominating(members, dominating)
    }

    /// Family dominated by a caller-supplied measure.
    pub fn with_dominating(members: Vec<DiscreteMeasure>, dominating: DiscreteMeasure) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidMeasure("empty family".into()));
        }
        let densities = members
            .iter()
            .map(|m| radon_nikodym(m, &dominating))
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasureFamily {
            members,
            dominating,
            densities,
        })
    }

    pub fn members(&self) -> &[DiscreteMeasure] {
        &self.members
    }

    pub fn dominating(&self) -> &DiscreteMeasure {
        &self.dominating
    }

    /// Densities aligned with `dominating().points()`.
    pub fn densities(&self) -> &[Vec<f64>] {
        &self.densities
    }

    pub fn dim(&self) -> usize {
        self.dominating.dim()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Largest relative mismatch of `nu({x}) = density(x) mu({x})` over all
    /// members and dominating points.
    pub fn reconstruction_error(&self) -> f64 {
        let mu = &self.dominating;
        let mut worst = 0.0_f64;
        for (nu, dens) in self.members.iter().zip(&self.densities) {
            for ((p, w), d) in mu.points().iter().zip(mu.weights()).zip(dens) {
                let direct = nu.weight_at(p);
                let rebuilt = d * w;
                let scale = direct.abs().max(rebuilt.abs());
                if scale > 0.0 {
                    worst = worst.max((direct - rebuilt).abs() / scale);
                }
            }
        }
        worst
    }
}

/// Bound on the family's densities in a candidate Orlicz norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlvpCertificate {
    pub psi: YoungFunction,
    pub per_member_norms: Vec<f64>,
    pub sup_norm: f64,
}

/// `[y^2/2, |y|^1.5/1.5, |y|^3/3, entropy]`.
pub fn default_psi_candidates() -> Vec<YoungFunction> {
    vec![
        YoungFunction::power(2.0, 0.5).expect("valid"),
        YoungFunction::normalized_power(1.5).expect("valid"),
        YoungFunction::normalized_power(3.0).expect("valid"),
        YoungFunction::entropy(),
    ]
}

/// Certificate from the first candidate whose density norms are all finite.
pub fn dlvp_certificate(
    family: &MeasureFamily,
    candidates: &[YoungFunction],
    opts: &GaugeOptions,
) -> Result<DlvpCertificate> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("empty list of psi candidates".into()));
    }
    let mu = family.dominating();
    let mut last_err = None;
    for psi in candidates {
        let norms: Result<Vec<f64>> = family
            .densities()
            .iter()
            .map(|d| orlicz::gauge_of_magnitudes(psi, mu.weights(), d, opts.tol).map(|g| g.value))
            .collect();
        match norms {
            Ok(norms) => {
                let sup = norms.iter().cloned().fold(0.0, f64::max);
                if sup.is_finite() {
                    return Ok(DlvpCertificate {
                        psi: psi.clone(),
                        per_member_norms: norms,
                        sup_norm: sup,
                    });
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| {
        Error::Invariant("no candidate produced a finite density bound".into())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(points.iter().map(|p| vec![*p]).collect(), weights.to_vec()).unwrap()
    }

    #[test]
    fn make_discrete_examples() {
        let a = m(&[0.0, 1.0], &[0.5, 0.5]);
        assert_eq!(a.mass(), 1.0);
        assert_eq!(a.len(), 2);
        let b = m(&[0.0, 0.0], &[0.3, 0.2]);
        assert_eq!(b.len(), 1);
        assert_eq!(b.mass(), 0.5);
        assert!(DiscreteMeasure::new(vec![vec![0.0]], vec![-1.0]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0]], vec![]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![0.0]], vec![0.0]).is_err());
        // -0.0 merges with 0.0, zero weights vanish
        let c = m(&[0.0, -0.0, 2.0], &[0.25, 0.25, 0.0]);
        assert_eq!(c.len(), 1);
        assert_eq!(c.weight_at(&[0.0]), 0.5);
    }

    #[test]
    fn json_shape() {
        let a = m(&[0.0, 1.0], &[0.5, 0.5]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"dim":1,"points":[[0.0],[1.0]],"weights":[0.5,0.5]}"#);
        let back: DiscreteMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<DiscreteMeasure>(r#"{"dim":2,"points":[[0.0]],"weights":[1]}"#).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_clipped() {
        let unit = AxisBox::cube(1, 0.0, 1.0).unwrap();
        let spec = DensitySpec::by_name("uniform", &unit).unwrap();
        let a = sample_empirical(&spec, 4, 9, &unit).unwrap();
        assert_eq!(a.len(), 4);
        assert_relative_eq!(a.mass(), 1.0, max_relative = 1e-15);
        assert!(a.points().iter().all(|p| unit.contains(p)));
        assert_eq!(a, sample_empirical(&spec, 4, 9, &unit).unwrap());

        let sym = AxisBox::cube(1, -1.0, 1.0).unwrap();
        let wide = DensitySpec::GaussianClipped { mean: vec![0.0], std: 2.0 };
        let g = sample_empirical(&wide, 100, 3, &sym).unwrap();
        assert!(g.points().iter().all(|p| sym.contains(p)));

        assert!(matches!(DensitySpec::by_name("cauchy", &unit), Err(Error::UnknownSampler(_))));
    }

    #[test]
    fn dominating_examples() {
        let a = m(&[0.0, 1.0], &[0.5, 0.5]);
        assert_eq!(dominating_measure(&[a.clone(), a.clone()]).unwrap(), a);
        assert_eq!(dominating_measure(std::slice::from_ref(&a)).unwrap(), a);
        let d = dominating_measure(&[m(&[0.0], &[1.0]), m(&[1.0], &[1.0])]).unwrap();
        assert_eq!(d.weights(), &[0.5, 0.5]);
        let two_d = DiscreteMeasure::dirac(vec![0.0, 0.0]).unwrap();
        assert!(dominating_measure(&[a, two_d]).is_err());
    }

    #[test]
    fn radon_nikodym_examples() {
        let nu = m(&[0.0, 1.0], &[0.2, 0.8]);
        let mu = m(&[0.0, 1.0], &[0.5, 0.5]);
        let d = radon_nikodym(&nu, &mu).unwrap();
        assert_relative_eq!(d[0], 0.4);
        assert_relative_eq!(d[1], 1.6);
        assert_eq!(radon_nikodym(&mu, &mu).unwrap(), vec![1.0, 1.0]);
        assert!(matches!(
            radon_nikodym(&m(&[2.0], &[1.0]), &mu),
            Err(Error::NotAbsolutelyContinuous { .. })
        ));
        // zero density where nu has no mass
        assert_eq!(radon_nikodym(&m(&[1.0], &[0.5]), &mu).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn family_reconstruction_and_mass() {
        let members = vec![
            m(&[0.0, 1.0, 2.0], &[0.2, 0.3, 0.5]),
            m(&[1.0, 3.0], &[0.7, 0.3]),
            m(&[0.1], &[2.0]),
        ];
        let fam = MeasureFamily::new(members.clone()).unwrap();
        assert!(fam.reconstruction_error() <= 1e-14);
        let avg: f64 = members.iter().map(|m| m.mass()).sum::<f64>() / 3.0;
        assert_relative_eq!(fam.dominating().mass(), avg, max_relative = 1e-15);
        // integrals through densities agree with direct integrals
        let f = |x: &[f64]| (x[0] * 3.0).sin() + x[0] * x[0];
        for (nu, dens) in fam.members().iter().zip(fam.densities()) {
            let via_density: f64 = fam
                .dominating()
                .points()
                .iter()
                .zip(fam.dominating().weights())
                .zip(dens)
                .map(|((p, w), d)| f(p) * d * w)
                .sum();
            assert_relative_eq!(via_density, nu.integrate(f), max_relative = 1e-12);
        }
    }

    #[test]
    fn dlvp_examples() {
        let opts = GaugeOptions::default();
        let mu = m(&[0.0, 1.0, 2.0], &[0.25, 0.25, 0.5]);
        let fam = MeasureFamily::new(vec![mu.clone()]).unwrap();
        let half_sq = YoungFunction::power(2.0, 0.5).unwrap();
        let cert = dlvp_certificate(&fam, std::slice::from_ref(&half_sq), &opts).unwrap();
        assert_relative_eq!(cert.sup_norm, 1.0 / 2f64.sqrt(), max_relative = 1e-9);

        // density bounded by B = 1.6: two members on two points
        let mu2 = m(&[0.0, 1.0], &[0.5, 0.5]);
        let fam2 = MeasureFamily::with_dominating(
            vec![m(&[0.0, 1.0], &[0.8, 0.2]), m(&[0.0, 1.0], &[0.2, 0.8])],
            mu2,
        )
        .unwrap();
        let cert2 = dlvp_certificate(&fam2, &[half_sq], &opts).unwrap();
        // closed form: (0.5*1.6^2/2 + 0.5*0.4^2/2) / k^2 = 1
        let expected = (0.5 * 1.6f64.powi(2) / 2.0 + 0.5 * 0.4f64.powi(2) / 2.0).sqrt();
        assert_relative_eq!(cert2.sup_norm, expected, max_relative = 1e-9);

        // psi(c) = 1 with c = 2 for |y|^3/8
        let cubic = YoungFunction::power(3.0, 1.0 / 8.0).unwrap();
        let cert3 = dlvp_certificate(&fam, &[cubic], &opts).unwrap();
        assert_relative_eq!(cert3.sup_norm, 0.5, max_relative = 1e-9);

        assert!(dlvp_certificate(&fam, &[], &opts).is_err());
    }
}
