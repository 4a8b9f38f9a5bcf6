//! Modulars, gauge (Luxemburg) norms, L1 norms, weighted sup-norms and the
//! generalized Hölder inequality over finite-support measures.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::young::YoungFunction;

/// Norm on the output space `R^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorNorm {
    #[default]
    Euclidean,
    Max,
}

impl VectorNorm {
    pub fn apply(self, v: &[f64]) -> f64 {
        match self {
            VectorNorm::Euclidean => {
                if v.len() == 1 {
                    v[0].abs()
                } else {
                    v.iter().map(|x| x * x).sum::<f64>().sqrt()
                }
            }
            VectorNorm::Max => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

impl fmt::Display for VectorNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VectorNorm::Euclidean => "euclidean",
            VectorNorm::Max => "max",
        })
    }
}

impl FromStr for VectorNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "l2" => Ok(VectorNorm::Euclidean),
            "max" | "linf" => Ok(VectorNorm::Max),
            other => Err(Error::InvalidArgument(format!("unknown vector norm `{other}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableSpec {
    values: Vec<Vec<f64>>,
}

/// Values of `f: R^N0 -> R^m` at the support points of a measure, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableSpec", into = "TableSpec")]
pub struct FunctionTable {
    out_dim: usize,
    data: Vec<f64>,
}

impl TryFrom<TableSpec> for FunctionTable {
    type Error = Error;
    fn try_from(spec: TableSpec) -> Result<Self> {
        FunctionTable::from_rows(spec.values)
    }
}

impl From<FunctionTable> for TableSpec {
    fn from(t: FunctionTable) -> Self {
        TableSpec {
            values: t.rows().map(<[f64]>::to_vec).collect(),
        }
    }
}

impl FunctionTable {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let out_dim = rows.first().map_or(1, Vec::len);
        if out_dim == 0 {
            return Err(Error::InvalidArgument("table rows must be non-empty".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * out_dim);
        for r in rows {
            if r.len() != out_dim {
                return Err(Error::InvalidArgument("ragged function table".into()));
            }
            data.extend(r);
        }
        FunctionTable::from_flat(out_dim, data)
    }

    pub fn from_scalars(values: Vec<f64>) -> Result<Self> {
        FunctionTable::from_flat(1, values)
    }

    /// Row-major storage, `out_dim` entries per row.
    pub fn from_flat(out_dim: usize, data: Vec<f64>) -> Result<Self> {
        if out_dim == 0 || !data.len().is_multiple_of(out_dim) {
            return Err(Error::InvalidArgument("flat table length is not a multiple of the output dimension".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("function table has non-finite entries".into()));
        }
        Ok(FunctionTable { out_dim, data })
    }

    pub fn zeros(rows: usize, out_dim: usize) -> Self {
        FunctionTable {
            out_dim: out_dim.max(1),
            data: vec![0.0; rows * out_dim.max(1)],
        }
    }

    /// Tabulate `f` on the support of `mu`.
    pub fn tabulate(mu: &DiscreteMeasure, f: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<Self> {
        let rows = mu.points().iter().map(|p| f(p)).collect::<Result<Vec<_>>>()?;
        FunctionTable::from_rows(rows)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.out_dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.out_dim..(i + 1) * self.out_dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.out_dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        FunctionTable {
            out_dim: self.out_dim,
            data: self.data.iter().map(|v| alpha * v).collect(),
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.out_dim != other.out_dim || self.len() != other.len() {
            return Err(Error::InvalidArgument("function tables differ in shape".into()));
        }
        Ok(FunctionTable {
            out_dim: self.out_dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| op(*a, *b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Row norms.
    pub fn magnitudes(&self, norm: VectorNorm) -> Vec<f64> {
        self.rows().map(|r| norm.apply(r)).collect()
    }
}

fn check_aligned(mu: &DiscreteMeasure, f: &FunctionTable) -> Result<()> {
    if f.len() != mu.len() {
        return Err(Error::Misaligned {
            expected: mu.len(),
            found: f.len(),
        });
    }
    Ok(())
}

fn modular_of(phi: &YoungFunction, weights: &[f64], mags: &[f64], k: f64) -> f64 {
    mags.iter()
        .zip(weights)
        .map(|(m, w)| if *m == 0.0 { 0.0 } else { phi.eval_abs(m / k) * w })
        .sum()
}

/// `sum_x phi(||f(x)|| / k) mu({x})`.
pub fn modular(phi: &YoungFunction, mu: &DiscreteMeasure, f: &FunctionTable, k: f64, norm: VectorNorm) -> Result<f64> {
    check_aligned(mu, f)?;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("modular scale must be positive, got {k}")));
    }
    Ok(modular_of(phi, mu.weights(), &f.magnitudes(norm), k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeOptions {
    /// Relative bisection tolerance on `k`.
    pub tol: f64,
    pub norm: VectorNorm,
}

impl Default for GaugeOptions {
    fn default() -> Self {
        GaugeOptions {
            tol: 1e-10,
            norm: VectorNorm::Euclidean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeNormResult {
    pub value: f64,
    pub bracket: (f64, f64),
    pub modular_at_value: f64,
    pub iterations: usize,
}

const BRACKET_STEPS: usize = 200;

/// Gauge norm of nonnegative magnitudes against weights.
pub(crate) fn gauge_of_magnitudes(phi: &YoungFunction, weights: &[f64], mags: &[f64], tol: f64) -> Result<GaugeNormResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if mags.iter().all(|m| *m == 0.0) {
        return Ok(GaugeNormResult {
            value: 0.0,
            bracket: (0.0, 0.0),
            modular_at_value: 0.0,
            iterations: 0,
        });
    }
    let rho = |k: f64| modular_of(phi, weights, mags, k);
    let mut iterations = 0;
    let (mut lo, mut hi);
    if rho(1.0) <= 1.0 {
        hi = 1.0;
        lo = 0.5;
        while rho(lo) <= 1.0 {
            iterations += 1;
            if iterations > BRACKET_STEPS {
                return Err(Error::BracketFailure { steps: BRACKET_STEPS });
            }
            hi = lo;
            lo *= 0.5;
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        while rho(hi) > 1.0 {
            iterations += 1;
            if iterations > BRACKET_STEPS {
                return Err(Error::BracketFailure { steps: BRACKET_STEPS });
            }
            lo = hi;
            hi *= 2.0;
        }
    }
    let mut bisections = 0;
    while hi - lo > tol * hi && bisections < BRACKET_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rho(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        bisections += 1;
    }
    Ok(GaugeNormResult {
        value: hi,
        bracket: (lo, hi),
        modular_at_value: rho(hi),
        iterations: iterations + bisections,
    })
}

/// `inf { k > 0 : modular(k) <= 1 }`, returned as the upper end of the final
/// bracket so that `modular(value) <= 1`.
pub fn gauge_norm(phi: &YoungFunction, mu: &DiscreteMeasure, f: &FunctionTable, opts: &GaugeOptions) -> Result<GaugeNormResult> {
    check_aligned(mu, f)?;
    gauge_of_magnitudes(phi, mu.weights(), &f.magnitudes(opts.norm), opts.tol)
}

/// `sum_x ||f(x)|| nu({x})`.
pub fn l1_norm(nu: &DiscreteMeasure, f: &FunctionTable, norm: VectorNorm) -> Result<f64> {
    check_aligned(nu, f)?;
    Ok(f.rows().zip(nu.weights()).map(|(r, w)| norm.apply(r) * w).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `sum ||f|| ||g|| mu` with `2 N_phi(f) N_psi(g)`.
pub fn holder_check(
    phi: &YoungFunction,
    psi: &YoungFunction,
    mu: &DiscreteMeasure,
    f: &FunctionTable,
    g: &FunctionTable,
    opts: &GaugeOptions,
) -> Result<HolderReport> {
    check_aligned(mu, f)?;
    check_aligned(mu, g)?;
    let fm = f.magnitudes(opts.norm);
    let gm = g.magnitudes(opts.norm);
    let lhs = fm.iter().zip(&gm).zip(mu.weights()).map(|((a, b), w)| a * b * w).sum();
    let rhs = 2.0
        * gauge_of_magnitudes(phi, mu.weights(), &fm, opts.tol)?.value
        * gauge_of_magnitudes(psi, mu.weights(), &gm, opts.tol)?.value;
    Ok(HolderReport {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-8),
    })
}

/// Positive weight functions on `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightFn {
    /// `1 + ||x||^2`
    OnePlusSquaredNorm,
    /// `exp(-||x||)`
    ExpNegNorm,
    Constant { value: f64 },
}

impl WeightFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            WeightFn::OnePlusSquaredNorm => 1.0 + x.iter().map(|v| v * v).sum::<f64>(),
            WeightFn::ExpNegNorm => (-VectorNorm::Euclidean.apply(x)).exp(),
            WeightFn::Constant { value } => *value,
        }
    }

    pub fn label(&self) -> String {
        match self {
            WeightFn::OnePlusSquaredNorm => "1+|x|^2".into(),
            WeightFn::ExpNegNorm => "exp(-|x|)".into(),
            WeightFn::Constant { value } => format!("{value}"),
        }
    }
}

/// `max_i ||f(x_i)|| / w(x_i)` over the sample points.
pub fn weighted_sup_norm(w: &WeightFn, points: &[Vec<f64>], f: &FunctionTable, norm: VectorNorm) -> Result<f64> {
    if points.len() != f.len() {
        return Err(Error::Misaligned {
            expected: points.len(),
            found: f.len(),
        });
    }
    let mut sup = 0.0_f64;
    for (p, r) in points.iter().zip(f.rows()) {
        let wx = w.eval(p);
        if !(wx > 0.0) {
            return Err(Error::Domain(format!("weight {wx} is not positive at {p:?}")));
        }
        sup = sup.max(norm.apply(r) / wx);
    }
    Ok(sup)
}
