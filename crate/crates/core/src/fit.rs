//! Candidate approximators: random-feature least squares, exact 1-D
//! piecewise-linear ReLU interpolation, and error-versus-width curves.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{point_key, DiscreteMeasure};
use crate::net::{Activation, Layer, Network};
use crate::orlicz::{self, FunctionTable, GaugeOptions};
use crate::young::YoungFunction;

/// Targets `f: R^N0 -> R^NL`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetFunction {
    /// `prod_i sin(2 pi frequency x_i)`
    SinProduct { dim: usize, frequency: f64 },
    /// `amplitude exp(-||x - center||^2 / (2 width^2))`
    GaussianBlob { center: Vec<f64>, width: f64, amplitude: f64 },
    /// `1 / (1 + exp(-steepness (mean(x) - offset)))`
    SmoothStep { dim: usize, steepness: f64, offset: f64 },
    Constant { dim: usize, value: Vec<f64> },
    /// Values on a finite point set; undefined elsewhere.
    Table { points: Vec<Vec<f64>>, values: Vec<Vec<f64>> },
}

impl TargetFunction {
    pub fn sin_2pi() -> Self {
        TargetFunction::SinProduct { dim: 1, frequency: 1.0 }
    }

    /// Table target holding `f`'s values on the support of `mu`.
    pub fn table_on(mu: &DiscreteMeasure, values: &FunctionTable) -> Result<Self> {
        if values.len() != mu.len() {
            return Err(Error::Misaligned {
                expected: mu.len(),
                found: values.len(),
            });
        }
        Ok(TargetFunction::Table {
            points: mu.points().to_vec(),
            values: values.rows().map(<[f64]>::to_vec).collect(),
        })
    }

    pub fn input_dim(&self) -> usize {
        match self {
            TargetFunction::SinProduct { dim, .. }
            | TargetFunction::SmoothStep { dim, .. }
            | TargetFunction::Constant { dim, .. } => *dim,
            TargetFunction::GaussianBlob { center, .. } => center.len(),
            TargetFunction::Table { points, .. } => points.first().map_or(0, Vec::len),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            TargetFunction::Constant { value, .. } => value.len(),
            TargetFunction::Table { values, .. } => values.first().map_or(0, Vec::len),
            _ => 1,
        }
    }

    /// Declared bound on `sup ||f||`, when one is known.
    pub fn bound(&self) -> Option<f64> {
        match self {
            TargetFunction::SinProduct { .. } | TargetFunction::SmoothStep { .. } => Some(1.0),
            TargetFunction::GaussianBlob { amplitude, .. } => Some(amplitude.abs()),
            TargetFunction::Constant { value, .. } => Some(value.iter().map(|v| v * v).sum::<f64>().sqrt()),
            TargetFunction::Table { values, .. } => Some(
                values
                    .iter()
                    .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
                    .fold(0.0, f64::max),
            ),
        }
    }

    pub fn label(&self) -> String {
        match self {
            TargetFunction::SinProduct { frequency, .. } => format!("sin_product({frequency})"),
            TargetFunction::GaussianBlob { .. } => "gaussian_blob".into(),
            TargetFunction::SmoothStep { .. } => "smooth_step".into(),
            TargetFunction::Constant { .. } => "constant".into(),
            TargetFunction::Table { .. } => "table".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("target: {m}")));
        if self.input_dim() == 0 || self.output_dim() == 0 {
            return bad("dimensions must be positive");
        }
        match self {
            TargetFunction::SinProduct { frequency, .. } if !frequency.is_finite() => bad("non-finite frequency"),
            TargetFunction::GaussianBlob { width, .. } if !(*width > 0.0) => bad("blob width must be positive"),
            TargetFunction::Table { points, values } => {
                let (n0, nl) = (self.input_dim(), self.output_dim());
                if points.len() != values.len()
                    || points.iter().any(|p| p.len() != n0)
                    || values.iter().any(|v| v.len() != nl)
                {
                    bad("ragged table")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::InvalidArgument(format!(
                "target expects dimension {}, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        Ok(match self {
            TargetFunction::SinProduct { frequency, .. } => {
                vec![x.iter().map(|v| (2.0 * PI * frequency * v).sin()).product()]
            }
            TargetFunction::GaussianBlob { center, width, amplitude } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                vec![amplitude * (-r2 / (2.0 * width * width)).exp()]
            }
            TargetFunction::SmoothStep { steepness, offset, .. } => {
                let mean = x.iter().sum::<f64>() / x.len() as f64;
                vec![Activation::Sigmoid.apply(steepness * (mean - offset))]
            }
            TargetFunction::Constant { value, .. } => value.clone(),
            TargetFunction::Table { points, values } => {
                let key = point_key(x);
                let i = points
                    .iter()
                    .position(|p| point_key(p) == key)
                    .ok_or_else(|| Error::InvalidArgument(format!("table target undefined at {x:?}")))?;
                values[i].clone()
            }
        })
    }

    /// `f` on the support of `mu`.
    pub fn tabulate(&self, mu: &DiscreteMeasure) -> Result<FunctionTable> {
        FunctionTable::tabulate(mu, |x| self.eval(x))
    }
}

/// `f - eta` on the support of `mu`.
pub fn residual_table(f: &TargetFunction, eta: &Network, mu: &DiscreteMeasure) -> Result<FunctionTable> {
    if eta.input_dim() != mu.dim() || eta.output_dim() != f.output_dim() {
        return Err(Error::InvalidArgument("network and target dimensions differ".into()));
    }
    FunctionTable::tabulate(mu, |x| {
        let fx = f.eval(x)?;
        Ok(fx.iter().zip(eta.eval_unchecked(x)).map(|(a, b)| a - b).collect())
    })
}

/// `(sum_x ||f(x) - eta(x)||^2 mu({x}))^(1/2)`.
pub fn l2_residual(f: &TargetFunction, eta: &Network, mu: &DiscreteMeasure) -> Result<f64> {
    let r = residual_table(f, eta, mu)?;
    Ok(r.rows()
        .zip(mu.weights())
        .map(|(row, w)| row.iter().map(|v| v * v).sum::<f64>() * w)
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    pub activation: Activation,
    pub ridge: f64,
    /// Standard deviation of the hidden weights.
    pub weight_scale: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            activation: Activation::Sigmoid,
            ridge: 1e-10,
            weight_scale: 1.0,
        }
    }
}

/// Hidden layer of `width` random features: weights `a ~ N(0, s^2 I)`, centres
/// `u` uniform on the support box of `mu`, biases `-a . u`.
///
/// Features are drawn in sequence, so the features of a smaller width are a
/// prefix of those of a larger width under the same seed.
pub fn random_hidden_layer(mu: &DiscreteMeasure, width: usize, seed: u64, cfg: &FeatureConfig) -> Result<Layer> {
    if !matches!(cfg.activation, Activation::Relu | Activation::Sigmoid | Activation::Tanh) {
        return Err(Error::InvalidArgument(format!(
            "random features need relu, sigmoid or tanh, got {}",
            cfg.activation
        )));
    }
    if !(cfg.weight_scale > 0.0 && cfg.weight_scale.is_finite()) {
        return Err(Error::InvalidArgument("weight scale must be positive".into()));
    }
    let bx = mu.support_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Vec::with_capacity(width);
    let mut b = Vec::with_capacity(width);
    for _ in 0..width {
        let row: Vec<f64> = (0..mu.dim())
            .map(|_| cfg.weight_scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let u: Vec<f64> = bx
            .lo()
            .iter()
            .zip(bx.hi())
            .map(|(l, h)| l + (h - l) * rng.random::<f64>())
            .collect();
        b.push(-row.iter().zip(&u).map(|(w, c)| w * c).sum::<f64>());
        a.push(row);
    }
    Ok(Layer::new(a, b, cfg.activation))
}

/// Weighted least squares for the readout of a fixed hidden layer.
///
/// The intercept is left unpenalized: features and targets are centred under
/// `mu`, the ridge problem is solved for the slopes, and the intercept is
/// recovered from the means.
pub fn fit_readout(f: &TargetFunction, mu: &DiscreteMeasure, hidden: Layer, ridge: f64) -> Result<Network> {
    f.validate()?;
    if f.input_dim() != mu.dim() {
        return Err(Error::InvalidArgument("target and measure dimensions differ".into()));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::InvalidArgument(format!("ridge must be >= 0, got {ridge}")));
    }
    let (n, width, nl) = (mu.len(), hidden.out_dim(), f.output_dim());
    let y = f.tabulate(mu)?;
    let mass = mu.mass();
    let feats: Vec<Vec<f64>> = mu
        .points()
        .iter()
        .map(|p| {
            hidden
                .a
                .iter()
                .zip(&hidden.b)
                .map(|(row, bk)| hidden.act.apply(row.iter().zip(p).fold(*bk, |s, (a, x)| s + a * x)))
                .collect()
        })
        .collect();
    let mut feat_mean = vec![0.0; width];
    let mut y_mean = vec![0.0; nl];
    for (i, w) in mu.weights().iter().enumerate() {
        feat_mean.iter_mut().zip(&feats[i]).for_each(|(m, v)| *m += w * v / mass);
        y_mean.iter_mut().zip(y.row(i)).for_each(|(m, v)| *m += w * v / mass);
    }
    let intercept_only = |b: Vec<f64>| {
        Network::new(mu.dim(), vec![Layer::new(vec![vec![0.0; mu.dim()]; nl], b, Activation::None)])
    };
    if width == 0 {
        return intercept_only(y_mean);
    }
    let mut phi = DMatrix::<f64>::zeros(n, width);
    let mut rhs = DMatrix::<f64>::zeros(n, nl);
    for (i, w) in mu.weights().iter().enumerate() {
        let sw = w.sqrt();
        for k in 0..width {
            phi[(i, k)] = sw * (feats[i][k] - feat_mean[k]);
        }
        for j in 0..nl {
            rhs[(i, j)] = sw * (y.row(i)[j] - y_mean[j]);
        }
    }
    let beta = solve_filtered(phi, &rhs, ridge)?;
    let readout = Layer::new(
        (0..nl).map(|j| (0..width).map(|k| beta[(k, j)]).collect()).collect(),
        (0..nl)
            .map(|j| y_mean[j] - (0..width).map(|k| feat_mean[k] * beta[(k, j)]).sum::<f64>())
            .collect(),
        Activation::None,
    );
    Network::new(mu.dim(), vec![hidden, readout])
}

/// `argmin ||A x - B||^2 + ridge ||x||^2` through the SVD of `A`.
fn solve_filtered(a: DMatrix<f64>, b: &DMatrix<f64>, ridge: f64) -> Result<DMatrix<f64>> {
    let (rows, cols) = a.shape();
    let svd = a.svd(true, true);
    let u = svd.u.as_ref().ok_or_else(|| Error::Solver("SVD did not return U".into()))?;
    let vt = svd.v_t.as_ref().ok_or_else(|| Error::Solver("SVD did not return V^T".into()))?;
    let s = &svd.singular_values;
    let s_max = s.iter().cloned().fold(0.0, f64::max);
    if ridge == 0.0 {
        let cutoff = s_max * rows.max(cols) as f64 * f64::EPSILON;
        if cols > rows || s.iter().any(|v| *v <= cutoff) {
            return Err(Error::Solver(
                "feature matrix is singular; use ridge > 0".into(),
            ));
        }
    }
    let ut_b = u.transpose() * b;
    let mut filtered = ut_b;
    for (i, si) in s.iter().enumerate() {
        let factor = if *si == 0.0 { 0.0 } else { si / (si * si + ridge) };
        filtered.row_mut(i).scale_mut(factor);
    }
    Ok(vt.transpose() * filtered)
}

/// One-hidden-layer random-feature network fitted by weighted least squares
/// on the support of `mu`.
pub fn fit_random_features(
    f: &TargetFunction,
    mu: &DiscreteMeasure,
    width: usize,
    seed: u64,
    cfg: &FeatureConfig,
) -> Result<Network> {
    if width == 0 {
        return Err(Error::InvalidArgument("width must be >= 1".into()));
    }
    let hidden = random_hidden_layer(mu, width, seed, cfg)?;
    fit_readout(f, mu, hidden, cfg.ridge)
}

/// ReLU network equal to the piecewise-linear interpolant of `f` at `knots`
/// equally spaced points of `[a, b]`, extended affinely outside.
pub fn fit_grid_relu_1d(f: &TargetFunction, a: f64, b: f64, knots: usize) -> Result<Network> {
    if f.input_dim() != 1 {
        return Err(Error::InvalidArgument(format!(
            "grid interpolation needs a scalar input, target has dimension {}",
            f.input_dim()
        )));
    }
    if knots < 2 {
        return Err(Error::InvalidArgument("need at least 2 knots".into()));
    }
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidArgument(format!("need a < b, got [{a}, {b}]")));
    }
    let h = (b - a) / (knots - 1) as f64;
    let t: Vec<f64> = (0..knots)
        .map(|k| if k + 1 == knots { b } else { a + h * k as f64 })
        .collect();
    let vals = t.iter().map(|x| f.eval(&[*x])).collect::<Result<Vec<_>>>()?;
    let nl = f.output_dim();
    let slope = |k: usize, j: usize| (vals[k + 1][j] - vals[k][j]) / (t[k + 1] - t[k]);

    // units relu(x - t0), relu(t0 - x), relu(x - t_k) for interior knots
    let mut ha = vec![vec![1.0], vec![-1.0]];
    let mut hb = vec![-t[0], t[0]];
    for tk in &t[1..knots - 1] {
        ha.push(vec![1.0]);
        hb.push(-tk);
    }
    let readout_a = (0..nl)
        .map(|j| {
            let mut row = vec![slope(0, j), -slope(0, j)];
            row.extend((1..knots - 1).map(|k| slope(k, j) - slope(k - 1, j)));
            row
        })
        .collect();
    let readout_b = (0..nl).map(|j| vals[0][j]).collect();
    Network::new(
        1,
        vec![
            Layer::new(ha, hb, Activation::Relu),
            Layer::new(readout_a, readout_b, Activation::None),
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub width: usize,
    pub seed: u64,
    pub gauge_error: f64,
    pub l1_error: f64,
    pub fit_millis: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurveOptions {
    pub features: FeatureConfig,
    pub gauge: GaugeOptions,
    /// Record wall-clock fit time; off keeps output byte-reproducible.
    pub record_timing: bool,
}

/// Fit for a schedule entry; width 0 is the zero network.
pub fn fit_or_zero(f: &TargetFunction, mu: &DiscreteMeasure, width: usize, seed: u64, cfg: &FeatureConfig) -> Result<Network> {
    if width == 0 {
        Network::zero(mu.dim(), f.output_dim())
    } else {
        fit_random_features(f, mu, width, seed, cfg)
    }
}

/// Best-over-seeds gauge error `N_phi(f - eta)` for each width, one row per
/// width. Ties keep the earliest seed.
pub fn approximation_curve(
    f: &TargetFunction,
    mu: &DiscreteMeasure,
    phi: &YoungFunction,
    widths: &[usize],
    seeds: &[u64],
    opts: &CurveOptions,
) -> Result<Vec<CurveRow>> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("need at least one seed".into()));
    }
    let jobs: Vec<(usize, u64)> = widths.iter().flat_map(|w| seeds.iter().map(move |s| (*w, *s))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(width, seed)| {
            let start = Instant::now();
            let eta = fit_or_zero(f, mu, width, seed, &opts.features)?;
            let fit_millis = if opts.record_timing { start.elapsed().as_millis() as u64 } else { 0 };
            let r = residual_table(f, &eta, mu)?;
            Ok(CurveRow {
                width,
                seed,
                gauge_error: orlicz::gauge_norm(phi, mu, &r, &opts.gauge)?.value,
                l1_error: orlicz::l1_norm(mu, &r, opts.gauge.norm)?,
                fit_millis,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows
        .chunks(seeds.len())
        .map(|chunk| {
            *chunk
                .iter()
                .reduce(|best, r| if r.gauge_error < best.gauge_error { r } else { best })
                .expect("non-empty chunk")
        })
        .collect())
}
