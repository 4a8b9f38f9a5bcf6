//! Distributionally robust approximation over a finite family of measures:
//! the associated Young pair, robust L1 errors, the Hölder bound
//!
//! ```text
//! sup_nu ||f - eta||_{L1(nu)} <= 2 N_phi(f - eta) * sup_nu N_psi(d nu / d mu)
//! ```
//!
//! and the end-to-end experiment runner.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::AxisBox;
use crate::emit;
use crate::error::{Error, Result};
use crate::fit::{self, CurveRow, FeatureConfig, TargetFunction};
use crate::measure::{self, DensitySpec, DiscreteMeasure, DlvpCertificate, MeasureFamily};
use crate::net::{self, Activation, AffineFamily, ClipParams, Fnn, Network};
use crate::orlicz::{self, FunctionTable, GaugeOptions, VectorNorm, WeightFn};
use crate::young::{self, ConjugateGrid, YoungFunction};

/// `(phi_M, psi_M)` with the certificate that selected `psi_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YoungPair {
    pub phi: YoungFunction,
    pub psi: YoungFunction,
    pub certificate: DlvpCertificate,
}

/// `psi_M` from the De la Vallée Poussin catalog search and `phi_M` its
/// complementary function.
pub fn associated_young_pair(family: &MeasureFamily, candidates: &[YoungFunction], opts: &GaugeOptions) -> Result<YoungPair> {
    let certificate = measure::dlvp_certificate(family, candidates, opts)?;
    let psi = certificate.psi.clone();
    let phi = young::complementary(&psi, &ConjugateGrid::default())?;
    Ok(YoungPair { phi, psi, certificate })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustError {
    pub per_measure_l1: Vec<f64>,
    pub sup_l1: f64,
}

/// Rows of `table` (aligned with `mu`) at the support points of `nu`.
fn restrict(table: &FunctionTable, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<FunctionTable> {
    let mut data = Vec::with_capacity(nu.len() * table.out_dim());
    for p in nu.points() {
        let i = mu
            .index_of(p)
            .ok_or_else(|| Error::NotAbsolutelyContinuous { point: p.clone() })?;
        data.extend_from_slice(table.row(i));
    }
    FunctionTable::from_flat(table.out_dim(), data)
}

fn robust_error_of(family: &MeasureFamily, residual: &FunctionTable, norm: VectorNorm) -> Result<RobustError> {
    let per_measure_l1 = family
        .members()
        .iter()
        .map(|nu| orlicz::l1_norm(nu, &restrict(residual, family.dominating(), nu)?, norm))
        .collect::<Result<Vec<_>>>()?;
    let sup_l1 = per_measure_l1.iter().cloned().fold(0.0, f64::max);
    Ok(RobustError { per_measure_l1, sup_l1 })
}

/// `||f - eta||_{L1(nu)}` for every member and the supremum.
pub fn robust_error(family: &MeasureFamily, f: &TargetFunction, eta: &Network, norm: VectorNorm) -> Result<RobustError> {
    let r = fit::residual_table(f, eta, family.dominating())?;
    robust_error_of(family, &r, norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RobustCase {
    /// Bounded activation, shallow networks.
    #[serde(rename = "i")]
    BoundedShallow,
    /// ReLU register networks, clipped and localized.
    #[serde(rename = "ii")]
    ReluNarrow,
    /// Non-polynomial activation on compactly supported measures.
    #[serde(rename = "iii")]
    CompactNonPolynomial,
    /// Functional-input networks.
    #[serde(rename = "iv")]
    Functional,
}

impl fmt::Display for RobustCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RobustCase::BoundedShallow => "i",
            RobustCase::ReluNarrow => "ii",
            RobustCase::CompactNonPolynomial => "iii",
            RobustCase::Functional => "iv",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustReport {
    pub sup_l1: f64,
    pub holder_rhs: f64,
    pub gauge_error: f64,
    pub density_norm_sup: f64,
    pub per_measure_l1: Vec<f64>,
    pub bound_holds: bool,
    pub network_file: String,
    pub case: String,
    pub epsilon: f64,
    pub epsilon_reached: bool,
    pub width: usize,
    pub seed: u64,
}

/// Evaluates the Hölder chain for `eta`. Fails if the change-of-measure
/// identity or the bound itself is violated.
pub fn verify_robust_bound(
    family: &MeasureFamily,
    phi: &YoungFunction,
    psi: &YoungFunction,
    f: &TargetFunction,
    eta: &Network,
    opts: &GaugeOptions,
) -> Result<RobustReport> {
    let mu = family.dominating();
    let r = fit::residual_table(f, eta, mu)?;
    let err = robust_error_of(family, &r, opts.norm)?;
    let mags = r.magnitudes(opts.norm);
    for (k, (dens, direct)) in family.densities().iter().zip(&err.per_measure_l1).enumerate() {
        let via: f64 = mags.iter().zip(dens).zip(mu.weights()).map(|((m, d), w)| m * d * w).sum();
        if (via - direct).abs() > 1e-12 * via.abs().max(direct.abs()) {
            return Err(Error::Invariant(format!(
                "change of measure for member {k}: {via} via density, {direct} directly"
            )));
        }
    }
    let gauge_error = orlicz::gauge_norm(phi, mu, &r, opts)?.value;
    let density_norm_sup = family
        .densities()
        .iter()
        .map(|d| orlicz::gauge_of_magnitudes(psi, mu.weights(), d, opts.tol).map(|g| g.value))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let holder_rhs = 2.0 * gauge_error * density_norm_sup;
    let bound_holds = err.sup_l1 <= holder_rhs * (1.0 + 1e-8);
    if !bound_holds {
        return Err(Error::Invariant(format!(
            "Hölder bound violated: sup L1 {} > {}",
            err.sup_l1, holder_rhs
        )));
    }
    Ok(RobustReport {
        sup_l1: err.sup_l1,
        holder_rhs,
        gauge_error,
        density_norm_sup,
        per_measure_l1: err.per_measure_l1,
        bound_holds,
        network_file: String::new(),
        case: String::new(),
        epsilon: f64::NAN,
        epsilon_reached: false,
        width: 0,
        seed: 0,
    })
}

/// Member measures of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySource {
    Inline { members: Vec<DiscreteMeasure> },
    Sampled { clip_box: AxisBox, members: Vec<SampledMember> },
    /// Measure JSON files, relative paths resolved against the config file.
    Files { paths: Vec<PathBuf> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledMember {
    pub density: DensitySpec,
    pub n: usize,
    pub seed: u64,
}

impl FamilySource {
    pub fn load(&self, base: Option<&Path>) -> Result<MeasureFamily> {
        let members = match self {
            FamilySource::Inline { members } => members.clone(),
            FamilySource::Sampled { clip_box, members } => members
                .iter()
                .map(|m| measure::sample_empirical(&m.density, m.n, m.seed, clip_box))
                .collect::<Result<Vec<_>>>()?,
            FamilySource::Files { paths } => paths
                .iter()
                .map(|p| {
                    let p = match base {
                        Some(b) if p.is_relative() => b.join(p),
                        _ => p.clone(),
                    };
                    let text = std::fs::read_to_string(&p)?;
                    Ok(serde_json::from_str::<DiscreteMeasure>(&text)?)
                })
                .collect::<Result<Vec<_>>>()?,
        };
        MeasureFamily::new(members)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Schedule {
    /// Width 0 is the zero network.
    pub widths: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            widths: vec![8, 16, 32, 64, 128],
            seeds: vec![0, 1, 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ReluSettings {
    /// Localization box; defaults to the hull of the dominating support.
    pub box_j: Option<AxisBox>,
    /// Ramp width; defaults to a tenth of the longest side of the box, at
    /// least 0.05.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FnnSettings {
    pub family: Option<AffineFamily>,
    pub weight: WeightFn,
    pub weight1: WeightFn,
    /// Probe grid `[-radius, radius]^N0`.
    pub probe_radius: f64,
    pub probes_per_axis: usize,
    pub family_samples: usize,
}

impl Default for FnnSettings {
    fn default() -> Self {
        FnnSettings {
            family: None,
            weight: WeightFn::OnePlusSquaredNorm,
            weight1: WeightFn::OnePlusSquaredNorm,
            probe_radius: 10.0,
            probes_per_axis: 21,
            family_samples: 16,
        }
    }
}

fn default_psi() -> Vec<YoungFunction> {
    measure::default_psi_candidates()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustConfig {
    pub case: RobustCase,
    pub family: FamilySource,
    pub target: TargetFunction,
    pub epsilon: f64,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default = "default_psi")]
    pub psi_candidates: Vec<YoungFunction>,
    /// Declared compact box containing every member's support (case iii).
    #[serde(default)]
    pub compact_box: Option<AxisBox>,
    #[serde(default)]
    pub relu: ReluSettings,
    #[serde(default)]
    pub fnn: FnnSettings,
    #[serde(default)]
    pub norm: VectorNorm,
    #[serde(default)]
    pub record_timing: bool,
}

/// Report, selected network and the per-candidate curve of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustOutcome {
    pub report: RobustReport,
    pub network: Network,
    pub pair: YoungPair,
    pub curve: Vec<CurveRow>,
}

fn grid_probes(dim: usize, radius: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let per_axis = per_axis.max(2);
    let step = 2.0 * radius / (per_axis - 1) as f64;
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..per_axis).map(move |k| {
                    let mut q = p.clone();
                    q.push(-radius + step * k as f64);
                    q
                })
            })
            .collect();
    }
    out
}

/// Hypothesis checks for the chosen case; returns the localization data for
/// case (ii).
fn check_hypotheses(cfg: &RobustConfig, family: &MeasureFamily, pair: &YoungPair, gauge: &GaugeOptions) -> Result<Option<(AxisBox, f64)>> {
    let act = cfg.features.activation;
    let support = family.dominating().support_box();
    match cfg.case {
        RobustCase::BoundedShallow => {
            if !matches!(act, Activation::Sigmoid | Activation::Tanh) {
                return Err(Error::hypothesis("bounded activation", format!("{act} is unbounded")));
            }
        }
        RobustCase::ReluNarrow => {
            if act != Activation::Relu {
                return Err(Error::hypothesis("relu activation", format!("case ii needs relu, got {act}")));
            }
            let j = cfg.relu.box_j.clone().unwrap_or(support.clone());
            if !j.contains_box(&support) {
                return Err(Error::hypothesis(
                    "localization box covers the support",
                    "some member puts mass outside the box J",
                ));
            }
            let delta = cfg.relu.delta.unwrap_or((0.1 * j.max_extent()).max(0.05));
            return Ok(Some((j, delta)));
        }
        RobustCase::CompactNonPolynomial => {
            if matches!(act, Activation::Identity | Activation::None) {
                return Err(Error::hypothesis("non-polynomial activation", format!("{act} is affine")));
            }
            let bx = cfg
                .compact_box
                .as_ref()
                .ok_or_else(|| Error::hypothesis("compact support", "no compact box declared"))?;
            for (k, nu) in family.members().iter().enumerate() {
                if let Some(p) = nu.points().iter().find(|p| !bx.contains(p)) {
                    return Err(Error::hypothesis(
                        "compact support",
                        format!("member {k} has mass at {p:?} outside the declared box"),
                    ));
                }
            }
        }
        RobustCase::Functional => {
            let s = &cfg.fnn;
            let n0 = family.dim();
            let fam = s.family.unwrap_or(AffineFamily::Affine { dim: n0 });
            if fam.dim() != n0 {
                return Err(Error::Config("FNN family dimension differs from the measures".into()));
            }
            if fam != (AffineFamily::Affine { dim: n0 }) {
                return Err(Error::hypothesis(
                    "additive family",
                    format!("fitting uses affine hidden maps, which lie outside the declared {} family", fam.name()),
                ));
            }
            let probes = grid_probes(n0, s.probe_radius, s.probes_per_axis);
            let axioms = net::check_additive_family(&fam, &probes, s.family_samples, 0);
            if let Some(name) = axioms.failure {
                return Err(Error::hypothesis(name, format!("{} family", axioms.family)));
            }
            let maps = fam.samples(s.family_samples, 1);
            let wc = net::check_weight_compatibility(&maps, &s.weight, &s.weight1, &probes)?;
            if !wc.finite {
                return Err(Error::hypothesis("weight compatibility", "sup w1(h(x)) / w(x) is infinite"));
            }
            if !wc.admissible {
                return Err(Error::hypothesis(
                    "admissible weight",
                    "sublevel sets of the weight are unbounded on the probe range",
                ));
            }
            let zs: Vec<f64> = probes.iter().flat_map(|p| maps.iter().map(move |h| h.eval(p))).collect();
            if !net::activation_growth_ratio(act, &s.weight1, &zs)?.is_finite() {
                return Err(Error::hypothesis("activation growth", "activation outgrows the weight"));
            }
            let mu = family.dominating();
            let w_table = FunctionTable::from_scalars(mu.points().iter().map(|p| s.weight.eval(p)).collect())?;
            let nw = orlicz::gauge_norm(&pair.phi, mu, &w_table, gauge)?;
            if !nw.value.is_finite() {
                return Err(Error::hypothesis("N_phi(w) finite", "the weight has infinite gauge norm"));
            }
        }
    }
    Ok(None)
}

fn candidate_network(
    cfg: &RobustConfig,
    family: &MeasureFamily,
    localize: Option<&(AxisBox, f64)>,
    clip_range: (f64, f64),
    width: usize,
    seed: u64,
) -> Result<Network> {
    let mu = family.dominating();
    let shallow = fit::fit_or_zero(&cfg.target, mu, width, seed, &cfg.features)?;
    match cfg.case {
        RobustCase::ReluNarrow => {
            let (j, delta) = localize.expect("case ii localization");
            let domain = j.enlarge(*delta)?;
            let g = net::to_register_form(&shallow, &domain)?;
            let params = ClipParams {
                j: j.clone(),
                delta: *delta,
                c: clip_range.0,
                cap: clip_range.1,
            };
            let clipped = net::clip_and_localize(&g, &params)?;
            if !clipped.has_register_width() {
                return Err(Error::Invariant(format!(
                    "register network widths {:?} differ from {}",
                    clipped.network().hidden_widths(),
                    clipped.layout().width()
                )));
            }
            Ok(clipped.into_network())
        }
        RobustCase::Functional if width > 0 => Ok(Fnn::from_shallow(&shallow)?.to_network()),
        _ => Ok(shallow),
    }
}

/// Fits along the schedule in width order and stops at the first seed whose
/// robust error is below `epsilon`. Every candidate's Hölder chain is checked.
pub fn run_robust_experiment(cfg: &RobustConfig, base: Option<&Path>) -> Result<RobustOutcome> {
    if !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
        return Err(Error::Config(format!("epsilon must be positive, got {}", cfg.epsilon)));
    }
    if cfg.schedule.widths.is_empty() || cfg.schedule.seeds.is_empty() {
        return Err(Error::Config("schedule needs widths and seeds".into()));
    }
    cfg.target.validate()?;
    let family = cfg.family.load(base)?;
    if cfg.target.input_dim() != family.dim() {
        return Err(Error::Config("target and family dimensions differ".into()));
    }
    let gauge = GaugeOptions {
        norm: cfg.norm,
        ..GaugeOptions::default()
    };
    let pair = associated_young_pair(&family, &cfg.psi_candidates, &gauge)?;
    let localize = check_hypotheses(cfg, &family, &pair, &gauge)?;
    let values = cfg.target.tabulate(family.dominating())?;
    let flat = values.as_flat();
    let clip_range = (
        flat.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0,
        flat.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0,
    );

    let mut curve = Vec::new();
    let mut best: Option<(RobustReport, Network)> = None;
    for &width in &cfg.schedule.widths {
        let evaluated = cfg
            .schedule
            .seeds
            .par_iter()
            .map(|&seed| {
                let start = Instant::now();
                let eta = candidate_network(cfg, &family, localize.as_ref(), clip_range, width, seed)?;
                let fit_millis = if cfg.record_timing { start.elapsed().as_millis() as u64 } else { 0 };
                let mut report = verify_robust_bound(&family, &pair.phi, &pair.psi, &cfg.target, &eta, &gauge)?;
                report.width = width;
                report.seed = seed;
                Ok((report, eta, fit_millis))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut reached = false;
        for (report, eta, fit_millis) in evaluated {
            curve.push(CurveRow {
                width,
                seed: report.seed,
                gauge_error: report.gauge_error,
                l1_error: report.sup_l1,
                fit_millis,
            });
            if reached {
                continue;
            }
            let better = best.as_ref().is_none_or(|(b, _)| report.sup_l1 < b.sup_l1);
            if report.sup_l1 < cfg.epsilon {
                reached = true;
                best = Some((report, eta));
            } else if better {
                best = Some((report, eta));
            }
        }
        if reached {
            break;
        }
    }
    let (mut report, network) = best.expect("non-empty schedule");
    report.case = cfg.case.to_string();
    report.epsilon = cfg.epsilon;
    report.epsilon_reached = report.sup_l1 < cfg.epsilon;
    Ok(RobustOutcome {
        report,
        network,
        pair,
        curve,
    })
}

/// Writes `report.json`, `network.json` and `curve.csv` into `dir`.
pub fn write_artifacts(outcome: &mut RobustOutcome, dir: &Path) -> Result<()> {
    outcome.report.network_file = "network.json".into();
    emit::write_json(&dir.join("network.json"), &outcome.network)?;
    emit::write_json(&dir.join("report.json"), &outcome.report)?;
    emit::write_csv(&dir.join("curve.csv"), &outcome.curve)?;
    Ok(())
}
