//! Functional-input networks `x -> sum_n y_n act(h_n(x))` over additive
//! families of hidden maps, with the family and weight hypothesis checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Activation, Layer, Network};
use crate::error::{Error, Result};
use crate::orlicz::{VectorNorm, WeightFn};

/// `x -> a . x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineMap {
    pub a: Vec<f64>,
    pub b: f64,
}

impl AffineMap {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.a.iter().zip(x).fold(self.b, |s, (w, v)| s + w * v)
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Coefficient-wise sum, the representative of `h1 + h2`.
    pub fn sum(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
            b: self.b + other.b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FnnSpec {
    pub hidden: Vec<AffineMap>,
    pub readouts: Vec<Vec<f64>>,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fnn {
    spec: FnnSpec,
    input_dim: usize,
    output_dim: usize,
}

pub fn build_fnn(spec: FnnSpec) -> Result<Fnn> {
    let input_dim = spec
        .hidden
        .first()
        .map(AffineMap::dim)
        .ok_or_else(|| Error::Network("an FNN needs at least one hidden map".into()))?;
    let output_dim = spec.readouts.first().map_or(0, Vec::len);
    if input_dim == 0 || output_dim == 0 {
        return Err(Error::Network("FNN dimensions must be positive".into()));
    }
    if spec.readouts.len() != spec.hidden.len() {
        return Err(Error::Network(format!(
            "{} hidden maps but {} readouts",
            spec.hidden.len(),
            spec.readouts.len()
        )));
    }
    if spec.hidden.iter().any(|h| h.dim() != input_dim) || spec.readouts.iter().any(|y| y.len() != output_dim) {
        return Err(Error::Network("FNN dimension mismatch".into()));
    }
    if spec.activation == Activation::None {
        return Err(Error::Network("FNN hidden maps need an activation".into()));
    }
    Ok(Fnn {
        spec,
        input_dim,
        output_dim,
    })
}

impl Fnn {
    pub fn spec(&self) -> &FnnSpec {
        &self.spec
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::Network(format!("expected input of dimension {}, got {}", self.input_dim, x.len())));
        }
        let mut out = vec![0.0; self.output_dim];
        for (h, y) in self.spec.hidden.iter().zip(&self.spec.readouts) {
            let s = self.spec.activation.apply(h.eval(x));
            out.iter_mut().zip(y).for_each(|(o, yk)| *o += yk * s);
        }
        Ok(out)
    }

    /// The equivalent one-hidden-layer network.
    pub fn to_network(&self) -> Network {
        let hidden = Layer::new(
            self.spec.hidden.iter().map(|h| h.a.clone()).collect(),
            self.spec.hidden.iter().map(|h| h.b).collect(),
            self.spec.activation,
        );
        let readout = Layer::new(
            (0..self.output_dim)
                .map(|j| self.spec.readouts.iter().map(|y| y[j]).collect())
                .collect(),
            vec![0.0; self.output_dim],
            Activation::None,
        );
        Network::new(self.input_dim, vec![hidden, readout]).expect("validated FNN")
    }

    /// FNN form of a one-hidden-layer network; a nonzero readout bias becomes
    /// an extra constant hidden map.
    pub fn from_shallow(net: &Network) -> Result<Fnn> {
        let hidden = net.hidden_layers();
        if hidden.len() != 1 {
            return Err(Error::Network("FNN conversion needs exactly one hidden layer".into()));
        }
        let h = &hidden[0];
        let out = net.readout();
        let mut maps: Vec<AffineMap> = h
            .a
            .iter()
            .zip(&h.b)
            .map(|(a, b)| AffineMap { a: a.clone(), b: *b })
            .collect();
        let mut readouts: Vec<Vec<f64>> = (0..h.out_dim())
            .map(|k| out.a.iter().map(|row| row[k]).collect())
            .collect();
        if out.b.iter().any(|b| *b != 0.0) {
            let level = if h.act == Activation::Sigmoid { 0.0 } else { 1.0 };
            let s = h.act.apply(level);
            if s == 0.0 {
                return Err(Error::Network("activation vanishes at the constant level".into()));
            }
            maps.push(AffineMap {
                a: vec![0.0; net.input_dim()],
                b: level,
            });
            readouts.push(out.b.iter().map(|b| b / s).collect());
        }
        build_fnn(FnnSpec {
            hidden: maps,
            readouts,
            activation: h.act,
        })
    }
}

/// Families of hidden maps `R^dim -> R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AffineFamily {
    /// All affine maps.
    Affine { dim: usize },
    /// Linear maps without offset.
    Linear { dim: usize },
    /// Only the zero map.
    Zero { dim: usize },
}

impl AffineFamily {
    pub fn dim(&self) -> usize {
        match *self {
            AffineFamily::Affine { dim } | AffineFamily::Linear { dim } | AffineFamily::Zero { dim } => dim,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            AffineFamily::Affine { .. } => "affine",
            AffineFamily::Linear { .. } => "linear",
            AffineFamily::Zero { .. } => "zero",
        }
    }

    pub fn contains(&self, h: &AffineMap) -> bool {
        h.dim() == self.dim()
            && match self {
                AffineFamily::Affine { .. } => true,
                AffineFamily::Linear { .. } => h.b == 0.0,
                AffineFamily::Zero { .. } => h.b == 0.0 && h.a.iter().all(|v| *v == 0.0),
            }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> AffineMap {
        let dim = self.dim();
        let mut normal = || -> f64 { rng.sample(StandardNormal) };
        match self {
            AffineFamily::Affine { .. } => {
                let a = (0..dim).map(|_| normal()).collect();
                AffineMap { a, b: normal() }
            }
            AffineFamily::Linear { .. } => AffineMap {
                a: (0..dim).map(|_| normal()).collect(),
                b: 0.0,
            },
            AffineFamily::Zero { .. } => AffineMap { a: vec![0.0; dim], b: 0.0 },
        }
    }

    /// `count` members drawn from a seeded stream.
    pub fn samples(&self, count: usize, seed: u64) -> Vec<AffineMap> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample(&mut rng)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveFamilyReport {
    pub family: String,
    pub closed_under_addition: bool,
    pub separates_points: bool,
    pub contains_constants: bool,
    /// Name of the first failing axiom.
    pub failure: Option<String>,
}

impl AdditiveFamilyReport {
    pub fn all_pass(&self) -> bool {
        self.closed_under_addition && self.separates_points && self.contains_constants
    }
}

/// Numeric check of the additive-family axioms on `probes`: closure under
/// addition over sampled pairs, separation of every distinct probe pair, and
/// membership of constant maps.
pub fn check_additive_family(family: &AffineFamily, probes: &[Vec<f64>], samples: usize, seed: u64) -> AdditiveFamilyReport {
    let dim = family.dim();
    let members = family.samples(samples.max(2), seed);

    let closed_under_addition = members.windows(2).all(|pair| {
        let s = pair[0].sum(&pair[1]);
        family.contains(&s)
            && probes.iter().all(|x| {
                let direct = pair[0].eval(x) + pair[1].eval(x);
                (s.eval(x) - direct).abs() <= 1e-12 * (1.0 + direct.abs())
            })
    });

    let mut separates_points = true;
    'pairs: for (i, x) in probes.iter().enumerate() {
        for y in &probes[i + 1..] {
            if x == y {
                continue;
            }
            let diff = AffineMap {
                a: x.iter().zip(y).map(|(u, v)| u - v).collect(),
                b: 0.0,
            };
            let coords = (0..dim).map(|k| {
                let mut a = vec![0.0; dim];
                a[k] = 1.0;
                AffineMap { a, b: 0.0 }
            });
            let separated = std::iter::once(diff)
                .chain(coords)
                .chain(members.iter().cloned())
                .filter(|h| family.contains(h))
                .any(|h| (h.eval(x) - h.eval(y)).abs() > 1e-12);
            if !separated {
                separates_points = false;
                break 'pairs;
            }
        }
    }

    let contains_constants = [1.0, -2.5].iter().all(|c| family.contains(&AffineMap { a: vec![0.0; dim], b: *c }));

    let failure = if !closed_under_addition {
        Some("closed under addition")
    } else if !separates_points {
        Some("point separating")
    } else if !contains_constants {
        Some("contains constants")
    } else {
        None
    };
    AdditiveFamilyReport {
        family: family.name().into(),
        closed_under_addition,
        separates_points,
        contains_constants,
        failure: failure.map(String::from),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightCompatibilityReport {
    /// `sup_{x, h} w1(h(x)) / w(x)` over probes and sampled maps.
    pub sup_ratio: f64,
    pub finite: bool,
    /// Smallest `w` on the outer probe shell.
    pub outer_min: f64,
    /// Largest `w` on the inner probe core.
    pub inner_max: f64,
    /// Bounded-sublevel-set proxy: `outer_min > inner_max`.
    pub admissible: bool,
}

/// Ratio `w1(h(x)) / w(x)` over probes and sampled maps, and the admissibility
/// proxy comparing `w` on the outer shell (norm at least 0.9 of the probe
/// radius) against the inner core (norm at most half the radius).
pub fn check_weight_compatibility(
    maps: &[AffineMap],
    w: &WeightFn,
    w1: &WeightFn,
    probes: &[Vec<f64>],
) -> Result<WeightCompatibilityReport> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("empty probe grid".into()));
    }
    let norms: Vec<f64> = probes.iter().map(|p| VectorNorm::Euclidean.apply(p)).collect();
    let radius = norms.iter().cloned().fold(0.0, f64::max);
    let mut sup_ratio = 0.0_f64;
    let mut outer_min = f64::INFINITY;
    let mut inner_max = f64::NEG_INFINITY;
    for (p, r) in probes.iter().zip(&norms) {
        let wx = w.eval(p);
        if !(wx > 0.0) {
            return Err(Error::Domain(format!("weight {wx} is not positive at {p:?}")));
        }
        for h in maps {
            let w1x = w1.eval(&[h.eval(p)]);
            if !(w1x > 0.0) {
                return Err(Error::Domain(format!("weight {w1x} is not positive")));
            }
            sup_ratio = sup_ratio.max(w1x / wx);
        }
        if *r >= 0.9 * radius {
            outer_min = outer_min.min(wx);
        }
        if *r <= 0.5 * radius {
            inner_max = inner_max.max(wx);
        }
    }
    Ok(WeightCompatibilityReport {
        sup_ratio,
        finite: sup_ratio.is_finite(),
        outer_min,
        inner_max,
        admissible: radius > 0.0 && outer_min > inner_max,
    })
}

/// `sup_z |act(z)| / w1(z)` over the probe values.
pub fn activation_growth_ratio(act: Activation, w1: &WeightFn, zs: &[f64]) -> Result<f64> {
    let mut sup = 0.0_f64;
    for z in zs {
        let wz = w1.eval(&[*z]);
        if !(wz > 0.0) {
            return Err(Error::Domain(format!("weight {wz} is not positive at {z}")));
        }
        sup = sup.max(act.apply(*z).abs() / wz);
    }
    Ok(sup)
}
