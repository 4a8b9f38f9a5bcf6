//! Command-line entry point.
//!
//! Every subcommand accepts `--config FILE` (JSON, unknown keys rejected);
//! flags given on the command line override the config. Relative paths inside
//! a config resolve against the config's directory.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::domain::AxisBox;
use crate::emit::{self, NormRow};
use crate::error::{Error, Result};
use crate::fit::{self, CurveOptions, FeatureConfig, TargetFunction};
use crate::measure::{self, DensitySpec, DiscreteMeasure};
use crate::net::{self, Activation, ClipParams, Network};
use crate::orlicz::{self, FunctionTable, GaugeOptions, VectorNorm};
use crate::robust::{self, RobustConfig};
use crate::selftest;
use crate::young::{self, ConjugateGrid, YoungFunction};

pub const THREADS_ENV: &str = "ORLICZ_UAT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "orlicz-uat", version, about = "Gauge norms, Young conjugates, ReLU constructions and robust approximation runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gauge norms of a function table, one CSV row per Young function.
    Norm(NormArgs),
    /// Tabulated complementary function as JSON.
    Conjugate(ConjugateArgs),
    /// Gadget, register-form or clipped network JSON with a structural report.
    Construct(ConstructArgs),
    /// Approximation curve CSV for random-feature fits.
    Fit(FitArgs),
    /// Robust approximation run; writes report.json, network.json, curve.csv.
    Robust(RobustArgs),
    /// Runs the seeded invariant suites.
    Selftest(SelftestArgs),
}

/// Reads a JSON config and the directory its relative paths resolve against.
fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<(T, PathBuf)> {
    match path {
        None => Ok((T::default(), PathBuf::new())),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            let cfg = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            Ok((cfg, p.parent().map(Path::to_path_buf).unwrap_or_default()))
        }
    }
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_relative() {
        base.join(p)
    } else {
        p
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing `{name}` (flag or config key)")))
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// `lo:hi` per coordinate, comma separated, e.g. `0:1,-1:1`.
pub fn parse_box(s: &str) -> Result<AxisBox> {
    let bad = || Error::InvalidArgument(format!("box `{s}` is not of the form lo:hi[,lo:hi...]"));
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for part in s.split(',') {
        let (l, h) = part.split_once(':').ok_or_else(bad)?;
        lo.push(l.trim().parse::<f64>().map_err(|_| bad())?);
        hi.push(h.trim().parse::<f64>().map_err(|_| bad())?);
    }
    AxisBox::new(lo, hi)
}

/// Young function in a config: shorthand string or full object.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PhiSpec {
    Short(String),
    Full(YoungFunction),
}

impl PhiSpec {
    fn resolve(self) -> Result<YoungFunction> {
        match self {
            PhiSpec::Short(s) => s.parse(),
            PhiSpec::Full(f) => Ok(f),
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidArgument(format!("bad list entry `{t}` in `{s}`")))
        })
        .collect()
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct NormArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Young function, e.g. `power:2`, `power:3:0.5`, `exp`, `entropy`; repeatable.
    #[arg(long)]
    phi: Vec<String>,
    /// Measure JSON `{"dim", "points", "weights"}`.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Function table JSON `{"values": [[..], ..]}` aligned with the measure.
    #[arg(long = "f")]
    f: Option<PathBuf>,
    #[arg(long)]
    norm: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    measure_id: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct NormConfig {
    phi: Vec<PhiSpec>,
    measure: Option<PathBuf>,
    f: Option<PathBuf>,
    norm: Option<VectorNorm>,
    tol: Option<f64>,
    measure_id: Option<String>,
    out: Option<PathBuf>,
}

fn cmd_norm(a: NormArgs) -> Result<()> {
    let (cfg, base): (NormConfig, _) = load_config(a.config.as_deref())?;
    let phis = if a.phi.is_empty() {
        cfg.phi.into_iter().map(PhiSpec::resolve).collect::<Result<Vec<_>>>()?
    } else {
        a.phi.iter().map(|s| s.parse()).collect::<Result<Vec<YoungFunction>>>()?
    };
    if phis.is_empty() {
        return Err(Error::Config("missing `phi` (flag or config key)".into()));
    }
    let measure_path = required(a.measure.or(cfg.measure.map(|p| resolve(&base, p))), "measure")?;
    let f_path = required(a.f.or(cfg.f.map(|p| resolve(&base, p))), "f")?;
    let norm = match a.norm {
        Some(s) => s.parse()?,
        None => cfg.norm.unwrap_or_default(),
    };
    let opts = GaugeOptions {
        tol: a.tol.or(cfg.tol).unwrap_or(GaugeOptions::default().tol),
        norm,
    };
    let mu: DiscreteMeasure = read_json(&measure_path)?;
    let f: FunctionTable = read_json(&f_path)?;
    let measure_id = a.measure_id.or(cfg.measure_id).unwrap_or_else(|| {
        measure_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let rows = phis
        .iter()
        .map(|phi| {
            let r = orlicz::gauge_norm(phi, &mu, &f, &opts)?;
            Ok(NormRow {
                phi_kind: phi.label(),
                measure_id: measure_id.clone(),
                norm_value: r.value,
                modular_at_value: r.modular_at_value,
                iterations: r.iterations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = a.out.or(cfg.out.map(|p| resolve(&base, p)));
    emit_text(out.as_deref(), &emit::csv_string(&rows)?)
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct ConjugateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    y_min: Option<f64>,
    #[arg(long)]
    y_max: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    /// Numeric Legendre transform even for cataloged kinds.
    #[arg(long)]
    numeric: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConjugateConfig {
    phi: Option<PhiSpec>,
    grid: Option<ConjugateGrid>,
    numeric: bool,
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct ConjugateOutput {
    pub phi: YoungFunction,
    pub psi: YoungFunction,
    pub y: Vec<f64>,
    pub psi_values: Vec<f64>,
}

fn cmd_conjugate(a: ConjugateArgs) -> Result<()> {
    let (cfg, base): (ConjugateConfig, _) = load_config(a.config.as_deref())?;
    let phi = match a.phi {
        Some(s) => s.parse()?,
        None => required(cfg.phi, "phi")?.resolve()?,
    };
    let mut grid = cfg.grid.unwrap_or_default();
    grid.y_min = a.y_min.unwrap_or(grid.y_min);
    grid.y_max = a.y_max.unwrap_or(grid.y_max);
    grid.count = a.count.unwrap_or(grid.count);
    let psi = if a.numeric || cfg.numeric {
        young::complementary_numeric(&phi, &grid)?
    } else {
        young::complementary(&phi, &grid)?
    };
    let y = grid.nodes()?;
    let psi_values = y.iter().map(|&v| psi.evaluate(v)).collect::<Result<Vec<_>>>()?;
    let out = a.out.or(cfg.out.map(|p| resolve(&base, p)));
    emit_text(out.as_deref(), &emit::json_string(&ConjugateOutput { phi, psi, y, psi_values })?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ConstructKind {
    Identity,
    Max,
    Min,
    Bump,
    Box,
    Register,
    Clip,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct ConstructArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<ConstructKind>,
    /// Input bound for the identity gadget.
    #[arg(long)]
    bound: Option<f64>,
    /// Bump interval `[a, b]`.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Box `lo:hi,...` for `box` and `clip`.
    #[arg(long = "box", allow_hyphen_values = true)]
    region: Option<String>,
    /// Shallow relu network JSON for `register` and `clip`.
    #[arg(long)]
    network: Option<PathBuf>,
    /// Domain box for `register`.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Lower clip level.
    #[arg(long)]
    c: Option<f64>,
    /// Upper clip level.
    #[arg(long = "C")]
    cap: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConstructConfig {
    kind: Option<ConstructKind>,
    bound: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    delta: Option<f64>,
    #[serde(rename = "box")]
    region: Option<AxisBox>,
    network: Option<PathBuf>,
    domain: Option<AxisBox>,
    c: Option<f64>,
    #[serde(rename = "C")]
    cap: Option<f64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralReport {
    pub input_dim: usize,
    pub output_dim: usize,
    pub depth: usize,
    pub hidden_widths: Vec<usize>,
    pub parameter_count: usize,
    pub register_width: Option<usize>,
    pub register_width_ok: Option<bool>,
}

impl StructuralReport {
    fn of(n: &Network, register: Option<&net::RegisterNetwork>) -> Self {
        StructuralReport {
            input_dim: n.input_dim(),
            output_dim: n.output_dim(),
            depth: n.layers().len(),
            hidden_widths: n.hidden_widths(),
            parameter_count: n.parameter_count(),
            register_width: register.map(|r| r.layout().width()),
            register_width_ok: register.map(|r| r.has_register_width()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConstructOutput {
    pub kind: String,
    pub report: StructuralReport,
    pub network: Network,
}

fn cmd_construct(a: ConstructArgs) -> Result<()> {
    let (cfg, base): (ConstructConfig, _) = load_config(a.config.as_deref())?;
    let kind = required(a.kind.or(cfg.kind), "kind")?;
    let region = match a.region {
        Some(s) => Some(parse_box(&s)?),
        None => cfg.region,
    };
    let domain = match a.domain {
        Some(s) => Some(parse_box(&s)?),
        None => cfg.domain,
    };
    let delta = a.delta.or(cfg.delta);
    let shallow = || -> Result<Network> {
        let p = required(a.network.clone().or(cfg.network.clone().map(|p| resolve(&base, p))), "network")?;
        read_json(&p)
    };
    let (network, register) = match kind {
        ConstructKind::Identity => (net::identity_gadget(required(a.bound.or(cfg.bound), "bound")?)?, None),
        ConstructKind::Max => (net::max_gadget(), None),
        ConstructKind::Min => (net::min_gadget(), None),
        ConstructKind::Bump => (
            net::bump_1d(required(a.a.or(cfg.a), "a")?, required(a.b.or(cfg.b), "b")?, required(delta, "delta")?)?,
            None,
        ),
        ConstructKind::Box => (net::box_indicator(&required(region, "box")?, required(delta, "delta")?)?, None),
        ConstructKind::Register => {
            let r = net::to_register_form(&shallow()?, &required(domain, "domain")?)?;
            (r.network().clone(), Some(r))
        }
        ConstructKind::Clip => {
            let j = required(region, "box")?;
            let delta = required(delta, "delta")?;
            let g = net::to_register_form(&shallow()?, &domain.unwrap_or(j.enlarge(delta)?))?;
            let params = ClipParams {
                j,
                delta,
                c: required(a.c.or(cfg.c), "c")?,
                cap: required(a.cap.or(cfg.cap), "C")?,
            };
            let r = net::clip_and_localize(&g, &params)?;
            (r.network().clone(), Some(r))
        }
    };
    let report = StructuralReport::of(&network, register.as_ref());
    if report.register_width_ok == Some(false) {
        return Err(Error::Invariant(format!("hidden widths {:?} are not all {:?}", report.hidden_widths, report.register_width)));
    }
    let kind = kind.to_possible_value().expect("no skipped variants").get_name().to_string();
    let out = a.out.or(cfg.out.map(|p| resolve(&base, p)));
    emit_text(out.as_deref(), &emit::json_string(&ConstructOutput { kind, report, network })?)
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct FitArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Target JSON, inline (`{"kind": ...}`) or a file path.
    #[arg(long)]
    target: Option<String>,
    /// Measure JSON; alternatively sample one with `--sampler`.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// `uniform`, `gaussian_clipped` or `mixture`.
    #[arg(long)]
    sampler: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    sample_seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    clip_box: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    /// Comma-separated widths; 0 is the zero network.
    #[arg(long)]
    widths: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    activation: Option<Activation>,
    #[arg(long)]
    ridge: Option<f64>,
    #[arg(long)]
    weight_scale: Option<f64>,
    #[arg(long)]
    norm: Option<String>,
    /// Record fit wall-clock time (output is no longer reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplerConfig {
    density: DensitySpec,
    n: usize,
    seed: u64,
    clip_box: AxisBox,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FitConfig {
    target: Option<TargetFunction>,
    measure: Option<PathBuf>,
    sampler: Option<SamplerConfig>,
    phi: Option<PhiSpec>,
    widths: Option<Vec<usize>>,
    seeds: Option<Vec<u64>>,
    features: Option<FeatureConfig>,
    norm: Option<VectorNorm>,
    record_timing: bool,
    out: Option<PathBuf>,
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    let (cfg, base): (FitConfig, _) = load_config(a.config.as_deref())?;
    let target = match a.target {
        Some(s) if s.trim_start().starts_with('{') => serde_json::from_str(&s).map_err(|e| Error::Config(format!("target: {e}")))?,
        Some(s) => read_json(Path::new(&s))?,
        None => required(cfg.target, "target")?,
    };
    let mu = if let Some(p) = a.measure.clone() {
        read_json(&p)?
    } else if let Some(name) = &a.sampler {
        let clip = parse_box(&required(a.clip_box.clone(), "clip-box")?)?;
        let spec = DensitySpec::by_name(name, &clip)?;
        measure::sample_empirical(&spec, required(a.n, "n")?, a.sample_seed.unwrap_or(0), &clip)?
    } else if let Some(p) = cfg.measure {
        read_json(&resolve(&base, p))?
    } else if let Some(s) = cfg.sampler {
        measure::sample_empirical(&s.density, a.n.unwrap_or(s.n), a.sample_seed.unwrap_or(s.seed), &s.clip_box)?
    } else {
        return Err(Error::Config("missing `measure` or `sampler`".into()));
    };
    let phi = match a.phi {
        Some(s) => s.parse()?,
        None => match cfg.phi {
            Some(p) => p.resolve()?,
            None => YoungFunction::power(2.0, 1.0)?,
        },
    };
    let widths = match a.widths {
        Some(s) => parse_list(&s)?,
        None => cfg.widths.unwrap_or_else(|| robust::Schedule::default().widths),
    };
    let seeds = match a.seeds {
        Some(s) => parse_list(&s)?,
        None => cfg.seeds.unwrap_or_else(|| robust::Schedule::default().seeds),
    };
    let mut features = cfg.features.unwrap_or_default();
    features.activation = a.activation.unwrap_or(features.activation);
    features.ridge = a.ridge.unwrap_or(features.ridge);
    features.weight_scale = a.weight_scale.unwrap_or(features.weight_scale);
    let norm = match a.norm {
        Some(s) => s.parse()?,
        None => cfg.norm.unwrap_or_default(),
    };
    let opts = CurveOptions {
        features,
        gauge: GaugeOptions { norm, ..GaugeOptions::default() },
        record_timing: a.timing || cfg.record_timing,
    };
    let rows = fit::approximation_curve(&target, &mu, &phi, &widths, &seeds, &opts)?;
    let out = a.out.or(cfg.out.map(|p| resolve(&base, p)));
    emit_text(out.as_deref(), &emit::csv_string(&rows)?)
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct RobustArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Artifact directory.
    #[arg(long, default_value = "robust-out")]
    out: PathBuf,
    #[arg(long)]
    timing: bool,
}

fn cmd_robust(a: RobustArgs) -> Result<()> {
    let mut cfg: RobustConfig = read_json(&a.config)?;
    cfg.epsilon = a.epsilon.unwrap_or(cfg.epsilon);
    cfg.record_timing |= a.timing;
    let base = a.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut outcome = robust::run_robust_experiment(&cfg, Some(&base))?;
    robust::write_artifacts(&mut outcome, &a.out)?;
    emit_text(None, &emit::json_string(&outcome.report)?)
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn cmd_selftest(a: SelftestArgs) -> i32 {
    let outcomes = selftest::run_all(a.seed);
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    for o in &outcomes {
        println!("{o}");
    }
    println!("{} suites, {} failed", outcomes.len(), failed);
    if failed == 0 {
        0
    } else {
        1
    }
}

/// Exit status for an error: 3 for a violated hypothesis, 1 for a broken
/// internal invariant, 2 for everything caused by the input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis { .. } => 3,
        Error::Invariant(_) => 1,
        _ => 2,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))?;
    if n > 0 {
        // a pool built earlier in the process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    let result = match cli.command {
        Command::Norm(a) => cmd_norm(a),
        Command::Conjugate(a) => cmd_conjugate(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Robust(a) => cmd_robust(a),
        Command::Selftest(a) => return cmd_selftest(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
