//! Dense feedforward networks, ReLU gadgets, the register-network transforms
//! and functional-input networks.

mod fnn;
mod gadgets;
mod register;

pub use fnn::{
    activation_growth_ratio, build_fnn, check_additive_family, check_weight_compatibility, AdditiveFamilyReport,
    AffineFamily, AffineMap, Fnn, FnnSpec, WeightCompatibilityReport,
};
pub use gadgets::{box_indicator, bump_1d, identity_gadget, max_gadget, min_gadget};
pub use register::{clip_and_localize, to_register_form, ClipParams, RegisterLayout, RegisterNetwork};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::AxisBox;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Tanh,
    Identity,
    /// Affine readout.
    None,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => {
                if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                }
            }
            Activation::Tanh => z.tanh(),
            Activation::Identity | Activation::None => z,
        }
    }

    /// Image of `[lo, hi]`; every activation here is nondecreasing.
    fn image(self, lo: f64, hi: f64) -> (f64, f64) {
        (self.apply(lo), self.apply(hi))
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Identity => "identity",
            Activation::None => "none",
        })
    }
}

impl FromStr for Activation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "identity" => Ok(Activation::Identity),
            "none" => Ok(Activation::None),
            other => Err(Error::InvalidArgument(format!("unknown activation `{other}`"))),
        }
    }
}

/// `x -> act(A x + b)` with `A` stored row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub act: Activation,
}

impl Layer {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, act: Activation) -> Self {
        Layer { a, b, act }
    }

    pub fn out_dim(&self) -> usize {
        self.b.len()
    }

    pub fn in_dim(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, b)| {
                let z = row.iter().zip(x).fold(*b, |s, (w, v)| s + w * v);
                self.act.apply(z)
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkSpec {
    input_dim: usize,
    layers: Vec<Layer>,
}

/// Feedforward network `w_L o act o ... o act o w_1` with an affine readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkSpec", into = "NetworkSpec")]
pub struct Network {
    input_dim: usize,
    layers: Vec<Layer>,
}

impl TryFrom<NetworkSpec> for Network {
    type Error = Error;
    fn try_from(spec: NetworkSpec) -> Result<Self> {
        Network::new(spec.input_dim, spec.layers)
    }
}

impl From<Network> for NetworkSpec {
    fn from(n: Network) -> Self {
        NetworkSpec {
            input_dim: n.input_dim,
            layers: n.layers,
        }
    }
}

impl Network {
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::Network("input dimension must be positive".into()));
        }
        let last = layers
            .last()
            .ok_or_else(|| Error::Network("a network needs at least a readout layer".into()))?;
        if last.act != Activation::None {
            return Err(Error::Network("the final layer must be an affine readout (act = none)".into()));
        }
        let mut width = input_dim;
        for (l, layer) in layers.iter().enumerate() {
            if layer.b.is_empty() || layer.a.len() != layer.b.len() {
                return Err(Error::Network(format!("layer {l}: A has {} rows, b has {}", layer.a.len(), layer.b.len())));
            }
            if layer.a.iter().any(|r| r.len() != width) {
                return Err(Error::Network(format!("layer {l}: expected {width} columns")));
            }
            if layer.a.iter().flatten().chain(&layer.b).any(|v| !v.is_finite()) {
                return Err(Error::Network(format!("layer {l}: non-finite weight")));
            }
            if l + 1 < layers.len() && layer.act == Activation::None {
                return Err(Error::Network(format!("layer {l}: hidden layers need an activation")));
            }
            width = layer.out_dim();
        }
        Ok(Network { input_dim, layers })
    }

    /// The constant zero map.
    pub fn zero(input_dim: usize, output_dim: usize) -> Result<Self> {
        Network::new(
            input_dim,
            vec![Layer::new(vec![vec![0.0; input_dim]; output_dim], vec![0.0; output_dim], Activation::None)],
        )
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Layer::out_dim)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn hidden_layers(&self) -> &[Layer] {
        &self.layers[..self.layers.len() - 1]
    }

    pub fn readout(&self) -> &Layer {
        self.layers.last().expect("validated")
    }

    pub fn hidden_widths(&self) -> Vec<usize> {
        self.hidden_layers().iter().map(Layer::out_dim).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.b.len() * (l.in_dim() + 1)).sum()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::Network(format!("expected input of dimension {}, got {}", self.input_dim, x.len())));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mut v = x.to_vec();
        for layer in &self.layers {
            v = layer.forward(&v);
        }
        v
    }

    /// Pre-activation interval bounds of every layer over `domain`, by
    /// interval arithmetic.
    pub fn interval_bounds(&self, domain: &AxisBox) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        if domain.dim() != self.input_dim {
            return Err(Error::Network("domain dimension differs from the input dimension".into()));
        }
        let mut lo = domain.lo().to_vec();
        let mut hi = domain.hi().to_vec();
        let mut out = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let mut pre_lo = Vec::with_capacity(layer.out_dim());
            let mut pre_hi = Vec::with_capacity(layer.out_dim());
            for (row, b) in layer.a.iter().zip(&layer.b) {
                let (mut l, mut h) = (*b, *b);
                for ((w, xl), xh) in row.iter().zip(&lo).zip(&hi) {
                    if *w >= 0.0 {
                        l += w * xl;
                        h += w * xh;
                    } else {
                        l += w * xh;
                        h += w * xl;
                    }
                }
                pre_lo.push(l);
                pre_hi.push(h);
            }
            let (post_lo, post_hi): (Vec<f64>, Vec<f64>) =
                pre_lo.iter().zip(&pre_hi).map(|(l, h)| layer.act.image(*l, *h)).unzip();
            out.push((pre_lo, pre_hi));
            lo = post_lo;
            hi = post_hi;
        }
        Ok(out)
    }
}

/// Affine form `coef . u + c` over the outputs `u` of the previous layer.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Affine {
    pub coef: Vec<f64>,
    pub c: f64,
}

impl Affine {
    pub fn constant(dim: usize, c: f64) -> Self {
        Affine { coef: vec![0.0; dim], c }
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut coef = vec![0.0; dim];
        coef[i] = 1.0;
        Affine { coef, c: 0.0 }
    }

    pub fn from_row(row: &[f64], c: f64) -> Self {
        Affine { coef: row.to_vec(), c }
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.coef.iter_mut().for_each(|v| *v *= s);
        self.c *= s;
        self
    }

    pub fn plus(mut self, other: &Affine) -> Self {
        self.coef.iter_mut().zip(&other.coef).for_each(|(a, b)| *a += b);
        self.c += other.c;
        self
    }

    pub fn shift(mut self, c: f64) -> Self {
        self.c += c;
        self
    }
}

/// Accumulates layers whose units are affine forms of the previous layer.
pub(crate) struct NetBuilder {
    input_dim: usize,
    width: usize,
    layers: Vec<Layer>,
}

impl NetBuilder {
    pub fn new(input_dim: usize) -> Self {
        NetBuilder {
            input_dim,
            width: input_dim,
            layers: Vec::new(),
        }
    }

    /// Width of the most recent layer (the input dimension initially).
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn push(&mut self, units: Vec<Affine>, act: Activation) {
        debug_assert!(units.iter().all(|u| u.coef.len() == self.width));
        self.width = units.len();
        let (a, b) = units.into_iter().map(|u| (u.coef, u.c)).unzip();
        self.layers.push(Layer::new(a, b, act));
    }

    pub fn push_layer(&mut self, layer: Layer) {
        self.width = layer.out_dim();
        self.layers.push(layer);
    }

    pub fn finish(self, readout: Vec<Affine>) -> Result<Network> {
        let mut b = self;
        b.push(readout, Activation::None);
        Network::new(b.input_dim, b.layers)
    }
}
