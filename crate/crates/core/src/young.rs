//! Young functions and N-functions.
//!
//! A Young function is an even convex `phi` with `phi(0) = 0` growing to
//! infinity. Only finite-valued functions are representable. Three closed
//! forms are cataloged together with their complementary functions
//!
//! | kind               | phi(x)                      | complementary                |
//! |--------------------|-----------------------------|------------------------------|
//! | `power`            | `scale * |x|^p`             | `power` with `1/p + 1/q = 1` |
//! | `exp_minus_linear` | `e^|x| - |x| - 1`           | `entropy`                    |
//! | `entropy`          | `(1+|x|) ln(1+|x|) - |x|`   | `exp_minus_linear`           |
//!
//! and anything else can be supplied as a table, evaluated through the secant
//! interpolant of its lower convex hull.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Doubling budget when growing brackets; `2^1100` overflows `f64`.
const GROWTH_BUDGET: usize = 1100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum YoungSpec {
    Power { p: f64, scale: f64 },
    ExpMinusLinear,
    Entropy,
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Power { p: f64, scale: f64 },
    ExpMinusLinear,
    Entropy,
    Tabulated(Table),
}

/// Convexified table. `grid`/`values` are what gets serialized; the hull
/// vertices drive evaluation.
#[derive(Debug, Clone, PartialEq)]
struct Table {
    grid: Vec<f64>,
    values: Vec<f64>,
    hull_x: Vec<f64>,
    hull_v: Vec<f64>,
}

impl Table {
    fn eval(&self, t: f64) -> f64 {
        let n = self.hull_x.len();
        let last = n - 1;
        if t >= self.hull_x[last] {
            let slope = (self.hull_v[last] - self.hull_v[last - 1])
                / (self.hull_x[last] - self.hull_x[last - 1]);
            return self.hull_v[last] + slope * (t - self.hull_x[last]);
        }
        // first vertex strictly greater than t; t >= 0 = hull_x[0]
        let i = self.hull_x.partition_point(|&x| x <= t);
        let (x0, x1) = (self.hull_x[i - 1], self.hull_x[i]);
        let (v0, v1) = (self.hull_v[i - 1], self.hull_v[i]);
        v0 + (v1 - v0) * ((t - x0) / (x1 - x0))
    }
}

/// An even, convex, finite Young function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "YoungSpec", into = "YoungSpec")]
pub struct YoungFunction {
    kind: Kind,
}

impl TryFrom<YoungSpec> for YoungFunction {
    type Error = Error;
    fn try_from(spec: YoungSpec) -> Result<Self> {
        match spec {
            YoungSpec::Power { p, scale } => YoungFunction::power(p, scale),
            YoungSpec::ExpMinusLinear => Ok(YoungFunction::exp_minus_linear()),
            YoungSpec::Entropy => Ok(YoungFunction::entropy()),
            YoungSpec::Tabulated { grid, values } => YoungFunction::tabulated(grid, values),
        }
    }
}

impl From<YoungFunction> for YoungSpec {
    fn from(phi: YoungFunction) -> Self {
        match phi.kind {
            Kind::Power { p, scale } => YoungSpec::Power { p, scale },
            Kind::ExpMinusLinear => YoungSpec::ExpMinusLinear,
            Kind::Entropy => YoungSpec::Entropy,
            Kind::Tabulated(t) => YoungSpec::Tabulated {
                grid: t.grid,
                values: t.values,
            },
        }
    }
}

impl YoungFunction {
    /// `scale * |x|^p`. `p = 1` is accepted (it is a Young function, though not
    /// an N-function).
    pub fn power(p: f64, scale: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidYoung(format!("power exponent must be >= 1, got {p}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidYoung(format!("power scale must be > 0, got {scale}")));
        }
        Ok(YoungFunction {
            kind: Kind::Power { p, scale },
        })
    }

    /// `|x|^p / p`, the normalization under which the conjugate is `|y|^q / q`.
    pub fn normalized_power(p: f64) -> Result<Self> {
        YoungFunction::power(p, 1.0 / p)
    }

    pub fn exp_minus_linear() -> Self {
        YoungFunction {
            kind: Kind::ExpMinusLinear,
        }
    }

    pub fn entropy() -> Self {
        YoungFunction { kind: Kind::Entropy }
    }

    /// Tabulated Young function on `[0, grid_max]`, extended linearly with the
    /// last hull slope beyond the grid.
    ///
    /// `grid` must start at 0, be strictly increasing, and `values` must start
    /// at 0 and be nondecreasing. The values are replaced by their lower convex
    /// hull.
    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::InvalidYoung(format!(
                "table needs >= 2 nodes with matching values (grid {}, values {})",
                grid.len(),
                values.len()
            )));
        }
        if grid[0] != 0.0 || values[0] != 0.0 {
            return Err(Error::InvalidYoung("table must start at (0, 0)".into()));
        }
        if grid.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidYoung("table entries must be finite".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidYoung("grid must be strictly increasing".into()));
        }
        for w in values.windows(2) {
            if w[1] < w[0] - 1e-12 * w[0].abs().max(1.0) {
                return Err(Error::InvalidYoung(format!(
                    "values must be nondecreasing ({} after {})",
                    w[1], w[0]
                )));
            }
        }

        // lower convex hull, monotone chain
        let mut hx: Vec<f64> = Vec::with_capacity(grid.len());
        let mut hv: Vec<f64> = Vec::with_capacity(grid.len());
        for (&x, &v) in grid.iter().zip(&values) {
            while hx.len() >= 2 {
                let n = hx.len();
                let cross = (hx[n - 1] - hx[n - 2]) * (v - hv[n - 2])
                    - (hv[n - 1] - hv[n - 2]) * (x - hx[n - 2]);
                if cross <= 0.0 {
                    hx.pop();
                    hv.pop();
                } else {
                    break;
                }
            }
            hx.push(x);
            hv.push(v);
        }
        let n = hx.len();
        if hv[n - 1] <= hv[n - 2] {
            return Err(Error::InvalidYoung(
                "table must grow on its last segment (phi -> infinity)".into(),
            ));
        }

        let mut table = Table {
            grid,
            values: Vec::new(),
            hull_x: hx,
            hull_v: hv,
        };
        table.values = table.grid.iter().map(|&x| table.eval(x)).collect();
        Ok(YoungFunction {
            kind: Kind::Tabulated(table),
        })
    }

    /// Whether a closed-form derivative is available on `[0, inf)`.
    pub fn has_derivative(&self) -> bool {
        !matches!(self.kind, Kind::Tabulated(_))
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.kind, Kind::Tabulated(_))
    }

    /// Short label used in CSV output.
    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Power { p, scale } => format!("power(p={p},scale={scale})"),
            Kind::ExpMinusLinear => "exp_minus_linear".into(),
            Kind::Entropy => "entropy".into(),
            Kind::Tabulated(t) => format!("tabulated(n={})", t.grid.len()),
        }
    }

    /// `(grid, values)` of a tabulated function.
    pub fn table(&self) -> Option<(&[f64], &[f64])> {
        match &self.kind {
            Kind::Tabulated(t) => Some((&t.grid, &t.values)),
            _ => None,
        }
    }

    /// `phi(x)` for finite `x`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("cannot evaluate a Young function at {x}")));
        }
        Ok(self.eval_abs(x.abs()))
    }

    /// `phi(t)` for `t >= 0`. May return `+inf` on overflow of the exponential kind.
    pub(crate) fn eval_abs(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Power { p, scale } => {
                if *p == 2.0 {
                    scale * t * t
                } else {
                    scale * t.powf(*p)
                }
            }
            Kind::ExpMinusLinear => {
                if t < 0.1 {
                    // sum_{n>=2} t^n / n!
                    let mut term = t * t / 2.0;
                    let mut sum = term;
                    for n in 3..60 {
                        term *= t / n as f64;
                        sum += term;
                        if term <= 1e-18 * sum {
                            break;
                        }
                    }
                    sum
                } else {
                    t.exp_m1() - t
                }
            }
            Kind::Entropy => {
                if t < 0.1 {
                    // sum_{n>=2} (-1)^n t^n / (n (n-1))
                    let mut power = t * t;
                    let mut sum = power / 2.0;
                    for n in 3..60 {
                        power *= -t;
                        let term = power / (n * (n - 1)) as f64;
                        sum += term;
                        if term.abs() <= 1e-18 * sum {
                            break;
                        }
                    }
                    sum
                } else {
                    (1.0 + t) * t.ln_1p() - t
                }
            }
            Kind::Tabulated(table) => table.eval(t),
        }
    }

    /// Right derivative on `[0, inf)` where a closed form exists.
    pub fn derivative(&self, t: f64) -> Option<f64> {
        let t = t.abs();
        match &self.kind {
            Kind::Power { p, scale } => Some(if *p == 1.0 {
                *scale
            } else {
                scale * p * t.powf(p - 1.0)
            }),
            Kind::ExpMinusLinear => Some(t.exp_m1()),
            Kind::Entropy => Some(t.ln_1p()),
            Kind::Tabulated(_) => None,
        }
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `power:P`, `power:P:SCALE`, `exp` / `exp_minus_linear`, `entropy`,
/// or an inline JSON object.
impl FromStr for YoungFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidYoung(format!("bad number `{t}` in `{s}`")))
        };
        match parts.as_slice() {
            ["power", p] => YoungFunction::power(num(p)?, 1.0),
            ["power", p, scale] => YoungFunction::power(num(p)?, num(scale)?),
            ["exp"] | ["exp_minus_linear"] => Ok(YoungFunction::exp_minus_linear()),
            ["entropy"] => Ok(YoungFunction::entropy()),
            _ => Err(Error::InvalidYoung(format!("unrecognized Young function `{s}`"))),
        }
    }
}

/// Ordinates for a tabulated complementary function: `0` followed by
/// `count - 1` log-spaced points on `[y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjugateGrid {
    pub y_min: f64,
    pub y_max: f64,
    pub count: usize,
}

impl Default for ConjugateGrid {
    fn default() -> Self {
        // 1023 log-spaced ordinates put y = 1 on a node
        ConjugateGrid {
            y_min: 1e-3,
            y_max: 1e3,
            count: 1024,
        }
    }
}

impl ConjugateGrid {
    pub fn nodes(&self) -> Result<Vec<f64>> {
        if !(self.y_min > 0.0 && self.y_max > self.y_min && self.y_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "conjugate grid needs 0 < y_min < y_max < inf (got {} .. {})",
                self.y_min, self.y_max
            )));
        }
        if self.count < 3 {
            return Err(Error::InvalidArgument("conjugate grid needs >= 3 nodes".into()));
        }
        let mut nodes = vec![0.0];
        nodes.extend(geometric_grid(self.y_min, self.y_max, self.count - 1));
        Ok(nodes)
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}

/// Complementary function `psi(y) = sup_{x >= 0} (x|y| - phi(x))`.
///
/// Cataloged kinds map to their closed-form partner; tabulated input is
/// transformed numerically on `grid`.
pub fn complementary(phi: &YoungFunction, grid: &ConjugateGrid) -> Result<YoungFunction> {
    match &phi.kind {
        Kind::Power { p, scale } => {
            if *p == 1.0 {
                // psi = 0 on [0, scale] and +inf beyond
                return Err(Error::UnboundedConjugate {
                    y: scale * (1.0 + f64::EPSILON),
                });
            }
            let q = p / (p - 1.0);
            let q_scale = (scale * p).powf(1.0 - q) / q;
            YoungFunction::power(q, q_scale)
        }
        Kind::ExpMinusLinear => Ok(YoungFunction::entropy()),
        Kind::Entropy => Ok(YoungFunction::exp_minus_linear()),
        Kind::Tabulated(_) => complementary_numeric(phi, grid),
    }
}

/// Always-numeric Legendre transform tabulated on `grid`, regardless of kind.
pub fn complementary_numeric(phi: &YoungFunction, grid: &ConjugateGrid) -> Result<YoungFunction> {
    let nodes = grid.nodes()?;
    let values = nodes
        .iter()
        .map(|&y| conjugate_at(phi, y))
        .collect::<Result<Vec<_>>>()?;
    YoungFunction::tabulated(nodes, values)
}

/// Numeric value of the complementary function at a single `y`.
///
/// Uses bisection on `phi'(x) = |y|` when a derivative is available, and
/// golden-section search on `[0, x_max]` otherwise, with `x_max` doubled
/// until the objective decreases.
pub fn conjugate_at(phi: &YoungFunction, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::Domain(format!("conjugate at non-finite y = {y}")));
    }
    let y = y.abs();
    if y == 0.0 {
        return Ok(0.0);
    }
    let x = if phi.has_derivative() {
        argmax_by_derivative(phi, y)?
    } else {
        argmax_by_golden_section(phi, y)?
    };
    Ok((x * y - phi.eval_abs(x)).max(0.0))
}

fn argmax_by_derivative(phi: &YoungFunction, y: f64) -> Result<f64> {
    let d = |x: f64| phi.derivative(x).expect("derivative available");
    if d(0.0) >= y {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut steps = 0;
    while d(hi) < y {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > GROWTH_BUDGET || !hi.is_finite() {
            return Err(Error::UnboundedConjugate { y });
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if d(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn argmax_by_golden_section(phi: &YoungFunction, y: f64) -> Result<f64> {
    let g = |x: f64| x * y - phi.eval_abs(x);
    let mut x_max = 1.0_f64;
    let mut steps = 0;
    while g(2.0 * x_max) > g(x_max) || g(2.0 * x_max).is_nan() {
        x_max *= 2.0;
        steps += 1;
        if steps > GROWTH_BUDGET || !g(2.0 * x_max).is_finite() {
            return Err(Error::UnboundedConjugate { y });
        }
    }
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0_f64, 2.0 * x_max);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..400 {
        if b - a <= 1e-15 * (1.0 + b.abs()) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    // concave objective: the best of the final bracket and the origin
    let candidates = [0.0, a, c, d, b];
    Ok(candidates
        .into_iter()
        .max_by(|u, v| g(*u).total_cmp(&g(*v)))
        .unwrap_or(0.0))
}

/// One sampled pair in a Young's-inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungWitness {
    pub x: f64,
    pub y: f64,
    /// `phi(x) + psi(y) - x y`; negative means a violation.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YoungInequalityReport {
    pub samples: usize,
    pub max_violation: f64,
    /// The tightest pairs found, smallest slack first.
    pub witnesses: Vec<YoungWitness>,
}

/// `phi(x) + psi(y) - |x y|`.
pub fn young_slack(phi: &YoungFunction, psi: &YoungFunction, x: f64, y: f64) -> f64 {
    phi.eval_abs(x.abs()) + psi.eval_abs(y.abs()) - (x * y).abs()
}

/// Samples `sample_count` pairs uniformly on `[0, range]^2` and reports the
/// largest violation of `x y <= phi(x) + psi(y)`.
pub fn check_young_inequality(
    phi: &YoungFunction,
    psi: &YoungFunction,
    sample_count: usize,
    seed: u64,
    range: f64,
) -> YoungInequalityReport {
    const KEEP: usize = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witnesses: Vec<YoungWitness> = Vec::with_capacity(KEEP + 1);
    let mut max_violation = 0.0_f64;
    for _ in 0..sample_count {
        let x = rng.random::<f64>() * range;
        let y = rng.random::<f64>() * range;
        let slack = young_slack(phi, psi, x, y);
        max_violation = max_violation.max(-slack);
        if witnesses.len() < KEEP || slack < witnesses[KEEP - 1].slack {
            let at = witnesses.partition_point(|w| w.slack <= slack);
            witnesses.insert(at, YoungWitness { x, y, slack });
            witnesses.truncate(KEEP);
        }
    }
    YoungInequalityReport {
        samples: sample_count,
        max_violation,
        witnesses,
    }
}

/// Numeric proxies for the two limits in the N-function definition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NFunctionThresholds {
    pub tol0: f64,
    pub big_threshold: f64,
}

impl Default for NFunctionThresholds {
    fn default() -> Self {
        NFunctionThresholds {
            tol0: 1e-4,
            big_threshold: 1e4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NFunctionVerdict {
    pub is_n_function: bool,
    /// `phi(x)/x` at the smallest probe.
    pub limit0_estimate: f64,
    /// `phi(x)/x` at the largest probe.
    pub limitinf_estimate: f64,
    /// `phi(x) > 0` at every positive probe.
    pub vanishes_only_at_zero: bool,
    pub probes: Vec<f64>,
}

/// Default N-function probes: 161 log-spaced points on `[1e-8, 1e8]`.
pub fn default_n_function_probes() -> Vec<f64> {
    geometric_grid(1e-8, 1e8, 161)
}

pub fn is_n_function(phi: &YoungFunction, probes: &[f64]) -> NFunctionVerdict {
    is_n_function_with(phi, probes, NFunctionThresholds::default())
}

pub fn is_n_function_with(
    phi: &YoungFunction,
    probes: &[f64],
    thresholds: NFunctionThresholds,
) -> NFunctionVerdict {
    let mut sorted: Vec<f64> = probes
        .iter()
        .map(|x| x.abs())
        .filter(|x| *x > 0.0 && x.is_finite())
        .collect();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let ratio = |x: f64| phi.eval_abs(x) / x;
    let (limit0, limitinf) = match (sorted.first(), sorted.last()) {
        (Some(&a), Some(&b)) => (ratio(a), ratio(b)),
        _ => (f64::NAN, f64::NAN),
    };
    let vanishes_only_at_zero = phi.eval_abs(0.0) == 0.0 && sorted.iter().all(|&x| phi.eval_abs(x) > 0.0);
    let is_n = !sorted.is_empty()
        && vanishes_only_at_zero
        && limit0 <= thresholds.tol0
        && limitinf >= thresholds.big_threshold;
    NFunctionVerdict {
        is_n_function: is_n,
        limit0_estimate: limit0,
        limitinf_estimate: limitinf,
        vanishes_only_at_zero,
        probes: sorted,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta2Options {
    /// Largest acceptable `phi(2x)/phi(x)`.
    pub cap: f64,
    /// Allowed relative growth between the last two ratios.
    pub tol: f64,
}

impl Default for Delta2Options {
    fn default() -> Self {
        Delta2Options { cap: 1e3, tol: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Delta2Report {
    pub holds: bool,
    pub k_estimate: f64,
    /// `ratio_last / ratio_second_to_last`.
    pub tail_growth: f64,
    pub ratios: Vec<f64>,
}

pub fn check_delta2(phi: &YoungFunction, x0: f64, probes: &[f64]) -> Result<Delta2Report> {
    check_delta2_with(phi, x0, probes, Delta2Options::default())
}

/// Estimates `K = max phi(2x)/phi(x)` over probes `>= x0`.
pub fn check_delta2_with(
    phi: &YoungFunction,
    x0: f64,
    probes: &[f64],
    opts: Delta2Options,
) -> Result<Delta2Report> {
    if probes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("Delta2 probes must be strictly increasing".into()));
    }
    let mut ratios = Vec::with_capacity(probes.len());
    for &x in probes.iter().filter(|&&x| x >= x0) {
        let base = phi.eval_abs(x);
        if base == 0.0 {
            return Err(Error::DegenerateProbe { x });
        }
        let r = phi.eval_abs(2.0 * x) / base;
        ratios.push(if r.is_nan() { f64::INFINITY } else { r });
    }
    if ratios.len() < 2 {
        return Err(Error::InvalidArgument("Delta2 check needs >= 2 probes above x0".into()));
    }
    let k = ratios.iter().cloned().fold(0.0, f64::max);
    let n = ratios.len();
    let tail_growth = ratios[n - 1] / ratios[n - 2];
    let tail_growth = if tail_growth.is_nan() { f64::INFINITY } else { tail_growth };
    Ok(Delta2Report {
        holds: k <= opts.cap && tail_growth <= 1.0 + opts.tol,
        k_estimate: k,
        tail_growth,
        ratios,
    })
}

/// `x >= 0` with `|phi(x) - y| <= tol * max(1, y)`.
pub fn inverse(phi: &YoungFunction, y: f64, tol: f64) -> Result<f64> {
    if !(y.is_finite() && y >= 0.0) {
        return Err(Error::Domain(format!("inverse needs finite y >= 0, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let target_tol = tol * y.max(1.0);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut steps = 0;
    while phi.eval_abs(hi) < y {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > GROWTH_BUDGET || !hi.is_finite() {
            return Err(Error::Domain(format!("phi never reaches {y}")));
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..400 {
        mid = 0.5 * (lo + hi);
        let v = phi.eval_abs(mid);
        if (v - y).abs() <= target_tol || mid <= lo || mid >= hi {
            break;
        }
        if v < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}
