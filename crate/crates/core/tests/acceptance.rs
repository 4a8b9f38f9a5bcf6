//! Acceptance criteria, one line each. Every criterion writes its measured
//! values under an artifact directory; AC-10 reruns 1-9 and compares bytes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use orlicz_uat::emit;
use orlicz_uat::fit::{FeatureConfig, TargetFunction};
use orlicz_uat::measure::{self, DensitySpec, DiscreteMeasure, MeasureFamily, MixtureComponent};
use orlicz_uat::net::{self, Activation, AffineFamily, ClipParams, Layer, Network};
use orlicz_uat::orlicz::{self, FunctionTable, GaugeOptions, VectorNorm, WeightFn};
use orlicz_uat::robust::{self, FamilySource, RobustCase, RobustConfig, SampledMember, Schedule};
use orlicz_uat::young::{self, ConjugateGrid, YoungFunction};
use orlicz_uat::AxisBox;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn save<T: Serialize>(dir: &Path, name: &str, v: &T) -> Result<(), String> {
    emit::write_json(&dir.join(name), v).map_err(|e| e.to_string())
}

fn e2s<T>(r: orlicz_uat::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn random_measure(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> DiscreteMeasure {
    let points = (0..n)
        .map(|i| {
            let mut p: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
            p[0] += 10.0 * i as f64;
            p
        })
        .collect();
    let weights = (0..n).map(|_| rng.random_range(0.01..2.0)).collect();
    DiscreteMeasure::new(points, weights).unwrap()
}

fn random_table(rng: &mut ChaCha8Rng, rows: usize, out: usize, scale: f64) -> FunctionTable {
    FunctionTable::from_flat(out, (0..rows * out).map(|_| rng.random_range(-scale..scale)).collect()).unwrap()
}

/// `(sum_i |f_i|^p w_i)^(1/p)` with the Euclidean norm on rows.
fn lp_oracle(f: &FunctionTable, w: &[f64], p: f64) -> f64 {
    f.rows()
        .zip(w)
        .map(|(r, w)| r.iter().map(|v| v * v).sum::<f64>().sqrt().powf(p) * w)
        .sum::<f64>()
        .powf(1.0 / p)
}

fn ac1_lp_consistency(dir: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let opts = GaugeOptions::default();
    let mut rows = Vec::new();
    let mut worst = 0.0_f64;
    for k in 0..200 {
        let n = rng.random_range(1..40);
        let out = 1 + k % 2;
        let mu = random_measure(&mut rng, n, 1);
        let f = random_table(&mut rng, n, out, 5.0);
        let p = [1.0, 1.5, 2.0, 3.0][k % 4];
        let phi = YoungFunction::power(p, 1.0).unwrap();
        let got = e2s(orlicz::gauge_norm(&phi, &mu, &f, &opts))?.value;
        let want = lp_oracle(&f, mu.weights(), p);
        let rel = (got - want).abs() / want;
        worst = worst.max(rel);
        rows.push((p, got, want));
    }
    save(dir, "ac1.json", &rows)?;
    ensure(worst <= 1e-8, || format!("max relative error {worst:.3e} > 1e-8"))?;
    Ok(format!("200 instances, max rel. error {worst:.2e}"))
}

fn ac2_conjugate_pairs(dir: &Path) -> Outcome {
    let grid = ConjugateGrid {
        y_min: 0.1,
        y_max: 10.0,
        count: 65,
    };
    let nodes = e2s(grid.nodes())?;
    let mut worst = 0.0_f64;
    let mut out = BTreeMap::new();
    for p in [1.5, 2.0, 3.0] {
        let phi = e2s(YoungFunction::normalized_power(p))?;
        let psi = e2s(young::complementary_numeric(&phi, &grid))?;
        let q = p / (p - 1.0);
        let mut vals = Vec::new();
        for &y in &nodes[1..] {
            let got = e2s(psi.evaluate(y))?;
            let want = y.powf(q) / q;
            worst = worst.max((got - want).abs() / want);
            vals.push(got);
        }
        out.insert(format!("p={p}"), vals);
    }
    ensure(nodes.len() == 65 && nodes[1..].len() == 64, || "grid does not have 64 points on [0.1, 10]".into())?;
    let e = std::f64::consts::E;
    let closed = e2s(young::complementary(&YoungFunction::exp_minus_linear(), &grid))?;
    let spot_closed = e2s(closed.evaluate(e - 1.0))?;
    let spot_numeric = e2s(young::conjugate_at(&YoungFunction::exp_minus_linear(), e - 1.0))?;
    let back = e2s(young::conjugate_at(&YoungFunction::entropy(), 1.0))?;
    out.insert("exp_entropy_spots".into(), vec![spot_closed, spot_numeric, back]);
    save(dir, "ac2.json", &out)?;
    ensure(worst <= 1e-6, || format!("power conjugates: max rel. error {worst:.3e}"))?;
    ensure(closed == YoungFunction::entropy(), || format!("complement of exp is {closed}"))?;
    for (name, v, want) in [("psi(e-1)", spot_closed, 1.0), ("numeric psi(e-1)", spot_numeric, 1.0), ("phi**(1)", back, e - 2.0)] {
        ensure((v - want).abs() <= 1e-6, || format!("{name} = {v}, want {want}"))?;
    }
    Ok(format!("64-point grid max rel. error {worst:.2e}; psi(e-1) = {spot_closed:.9}"))
}

type Pair = (YoungFunction, fn(f64) -> f64, fn(f64) -> f64);

/// Hand-written formulas for the cataloged pairs.
fn catalog_pairs() -> Vec<Pair> {
    vec![
        (YoungFunction::normalized_power(1.5).unwrap(), |x| x.powf(1.5) / 1.5, |y| y.powi(3) / 3.0),
        (YoungFunction::normalized_power(2.0).unwrap(), |x| x * x / 2.0, |y| y * y / 2.0),
        (YoungFunction::normalized_power(3.0).unwrap(), |x| x.powi(3) / 3.0, |y| y.powf(1.5) / 1.5),
        (YoungFunction::exp_minus_linear(), |x| x.exp() - x - 1.0, |y| (1.0 + y) * (1.0 + y).ln() - y),
    ]
}

fn ac3_young_and_holder(dir: &Path) -> Outcome {
    let grid = ConjugateGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_young = 0.0_f64;
    let mut max_formula_gap = 0.0_f64;
    let mut artifact = Vec::new();
    for (phi, phi_f, psi_f) in catalog_pairs() {
        let psi = e2s(young::complementary(&phi, &grid))?;
        let mut viol = 0.0_f64;
        for _ in 0..10_000 {
            let x = rng.random_range(0.0..6.0);
            let y = rng.random_range(0.0..6.0);
            let (px, qy) = (e2s(phi.evaluate(x))?, e2s(psi.evaluate(y))?);
            max_formula_gap = max_formula_gap
                .max((px - phi_f(x)).abs() / (1.0 + px))
                .max((qy - psi_f(y)).abs() / (1.0 + qy));
            viol = viol.max(x * y - px - qy);
        }
        worst_young = worst_young.max(viol);
        artifact.push((phi.label(), viol));
    }
    ensure(max_formula_gap <= 1e-12, || format!("catalog values differ from formulas by {max_formula_gap:.3e}"))?;
    ensure(worst_young <= 1e-10, || format!("Young violation {worst_young:.3e}"))?;

    let opts = GaugeOptions::default();
    let pairs = catalog_pairs();
    let mut worst_ratio = 0.0_f64;
    for k in 0..1000 {
        let n = rng.random_range(1..20);
        let mu = random_measure(&mut rng, n, 1);
        let f = random_table(&mut rng, n, 1, 4.0);
        let g = random_table(&mut rng, n, 1, 4.0);
        let phi = &pairs[k % pairs.len()].0;
        let psi = e2s(young::complementary(phi, &grid))?;
        let lhs: f64 = f.as_flat().iter().zip(g.as_flat()).zip(mu.weights()).map(|((a, b), w)| (a * b).abs() * w).sum();
        let rhs = 2.0 * e2s(orlicz::gauge_norm(phi, &mu, &f, &opts))?.value * e2s(orlicz::gauge_norm(&psi, &mu, &g, &opts))?.value;
        ensure(lhs <= rhs * (1.0 + 1e-8), || format!("Hölder fails: {lhs} > {rhs} for {phi}"))?;
        worst_ratio = worst_ratio.max(lhs / rhs);
    }
    artifact.push(("holder_max_ratio".into(), worst_ratio));
    save(dir, "ac3.json", &artifact)?;
    Ok(format!("Young max violation {worst_young:.1e}; Hölder max lhs/rhs {worst_ratio:.4}"))
}

fn ac4_gadgets(dir: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mx, mn) = (net::max_gadget(), net::min_gadget());
    let mut worst = 0.0_f64;
    for _ in 0..100_000 {
        let x = rng.random_range(-100.0..100.0);
        let y = rng.random_range(-100.0..100.0);
        worst = worst
            .max((e2s(mx.evaluate(&[x, y]))?[0] - x.max(y)).abs())
            .max((e2s(mn.evaluate(&[x, y]))?[0] - x.min(y)).abs());
    }
    ensure(worst <= 1e-12, || format!("gadget error {worst:.3e}"))?;
    for (got, want) in [
        (e2s(mx.evaluate(&[2.0, 5.0]))?[0], 5.0),
        (e2s(mn.evaluate(&[-1.0, -3.0]))?[0], -3.0),
        (e2s(mx.evaluate(&[4.0, 4.0]))?[0], 4.0),
    ] {
        ensure(got == want, || format!("gadget example {got} != {want}"))?;
    }

    let bump = e2s(net::bump_1d(0.0, 1.0, 0.5))?;
    for (x, want) in [(0.5, 1.0), (-0.5, 0.0), (-0.25, 0.5)] {
        let got = e2s(bump.evaluate(&[x]))?[0];
        ensure(got == want, || format!("bump({x}) = {got}, want {want}"))?;
    }
    for i in 0..=4000 {
        let x = -2.0 + i as f64 * 1e-3;
        let v = e2s(bump.evaluate(&[x]))?[0];
        ensure((0.0..=1.0).contains(&v), || format!("bump({x}) = {v} outside [0, 1]"))?;
    }

    let boxes = [
        (AxisBox::cube(2, 0.0, 1.0).unwrap(), 0.5),
        (AxisBox::new(vec![-1.0, 0.0, 2.0], vec![1.0, 0.5, 3.0]).unwrap(), 0.25),
        (AxisBox::new(vec![0.25], vec![0.75]).unwrap(), 0.1),
    ];
    let mut counts = Vec::new();
    for (j, delta) in &boxes {
        let v = e2s(net::box_indicator(j, *delta))?;
        let k = e2s(j.enlarge(*delta))?;
        let wide = e2s(j.enlarge(3.0 * delta))?;
        let (mut inside_j, mut outside_k) = (0, 0);
        for _ in 0..10_000 {
            let x: Vec<f64> = wide.lo().iter().zip(wide.hi()).map(|(l, h)| rng.random_range(*l..*h)).collect();
            let got = e2s(v.evaluate(&x))?[0];
            ensure((-1e-12..=1.0 + 1e-12).contains(&got), || format!("V({x:?}) = {got} outside [0, 1]"))?;
            if j.contains(&x) {
                inside_j += 1;
                ensure((got - 1.0).abs() <= 1e-12, || format!("V({x:?}) = {got} inside J"))?;
            } else if !k.contains(&x) {
                outside_k += 1;
                ensure(got.abs() <= 1e-12, || format!("V({x:?}) = {got} outside K"))?;
            } else {
                // affine ramp: min over coordinates of the 1-d bump value
                let want = x
                    .iter()
                    .zip(j.lo().iter().zip(j.hi()))
                    .map(|(xi, (a, b))| ((xi - a + delta) / delta).min((b + delta - xi) / delta).clamp(0.0, 1.0))
                    .fold(1.0, f64::min);
                ensure((got - want).abs() <= 1e-12, || format!("V({x:?}) = {got}, want {want}"))?;
            }
        }
        counts.push((inside_j, outside_k));
    }
    let v2 = e2s(net::box_indicator(&boxes[0].0, 0.5))?;
    let ex = e2s(v2.evaluate(&[-0.25, 0.5]))?[0];
    ensure(ex == 0.5, || format!("V(-0.25, 0.5) = {ex}"))?;
    save(dir, "ac4.json", &(worst, counts))?;
    Ok(format!("10^5 pairs max error {worst:.1e}; bump and 3 boxes x 10^4 points exact"))
}

fn random_shallow(rng: &mut ChaCha8Rng, n0: usize, nl: usize, m: usize) -> Network {
    let mut mat = |r: usize, c: usize| -> Vec<Vec<f64>> { (0..r).map(|_| (0..c).map(|_| rng.random_range(-2.0..2.0)).collect()).collect() };
    let a1 = mat(m, n0);
    let b1 = mat(1, m).remove(0);
    let a2 = mat(nl, m);
    let b2 = mat(1, nl).remove(0);
    Network::new(n0, vec![Layer::new(a1, b1, Activation::Relu), Layer::new(a2, b2, Activation::None)]).unwrap()
}

fn sample_in(rng: &mut ChaCha8Rng, b: &AxisBox) -> Vec<f64> {
    b.lo().iter().zip(b.hi()).map(|(l, h)| rng.random_range(*l..=*h)).collect()
}

fn ac5_register_clip(dir: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut reg_err, mut clip_err, mut ext_max) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut summary = Vec::new();
    for _ in 0..20 {
        let n0 = rng.random_range(1..=3);
        let nl = rng.random_range(1..=2);
        let m = rng.random_range(1..=16);
        let g = random_shallow(&mut rng, n0, nl, m);
        let lo: Vec<f64> = (0..n0).map(|_| rng.random_range(-2.0..0.0)).collect();
        let hi: Vec<f64> = lo.iter().map(|l| l + rng.random_range(0.5..3.0)).collect();
        let j = e2s(AxisBox::new(lo, hi))?;
        let delta = rng.random_range(0.05..0.5);
        let k = e2s(j.enlarge(delta))?;
        let reg = e2s(net::to_register_form(&g, &k))?;
        let width = n0 + nl + 1;
        ensure(reg.network().hidden_widths().iter().all(|w| *w == width), || {
            format!("register widths {:?}, want {width}", reg.network().hidden_widths())
        })?;
        let mut values = Vec::new();
        for _ in 0..500 {
            let x = sample_in(&mut rng, &k);
            let (a, b) = (e2s(g.evaluate(&x))?, e2s(reg.evaluate(&x))?);
            for (u, v) in a.iter().zip(&b) {
                reg_err = reg_err.max((u - v).abs());
            }
            values.extend(a);
        }
        values.sort_by(f64::total_cmp);
        let c = values[values.len() / 4];
        let cap = values[3 * values.len() / 4].max(c + 0.1);
        let clipped = e2s(net::clip_and_localize(&reg, &ClipParams { j: j.clone(), delta, c, cap }))?;
        ensure(clipped.network().hidden_widths().iter().all(|w| *w == width), || {
            format!("clipped widths {:?}, want {width}", clipped.network().hidden_widths())
        })?;
        for _ in 0..500 {
            let x = sample_in(&mut rng, &j);
            let (a, b) = (e2s(g.evaluate(&x))?, e2s(clipped.evaluate(&x))?);
            for (u, v) in a.iter().zip(&b) {
                clip_err = clip_err.max((u.clamp(c, cap) - v).abs());
            }
            // exterior point: push one coordinate past K
            let mut y = sample_in(&mut rng, &e2s(k.enlarge(2.0))?);
            let i = rng.random_range(0..n0);
            y[i] = if rng.random::<bool>() {
                k.hi()[i] + rng.random_range(1e-6..2.0)
            } else {
                k.lo()[i] - rng.random_range(1e-6..2.0)
            };
            for v in e2s(clipped.evaluate(&y))? {
                ext_max = ext_max.max(v.abs());
            }
        }
        summary.push((n0, nl, m, reg.network().layers().len(), clipped.network().layers().len()));
    }
    save(dir, "ac5.json", &(summary, reg_err, clip_err, ext_max))?;
    ensure(reg_err <= 1e-9, || format!("register form error {reg_err:.3e}"))?;
    ensure(clip_err <= 1e-9, || format!("clip error on J {clip_err:.3e}"))?;
    ensure(ext_max <= 1e-12, || format!("output outside K {ext_max:.3e}"))?;
    Ok(format!("20 nets: register error {reg_err:.1e}, clip error {clip_err:.1e}, exterior max {ext_max:.1e}"))
}

fn ac6_gauge_axioms(dir: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = GaugeOptions::default();
    let phis = [
        YoungFunction::power(1.0, 1.0).unwrap(),
        YoungFunction::power(2.5, 0.3).unwrap(),
        YoungFunction::normalized_power(4.0).unwrap(),
        YoungFunction::exp_minus_linear(),
        YoungFunction::entropy(),
    ];
    let mut worst = [0.0_f64; 4];
    for k in 0..500 {
        let phi = &phis[k % phis.len()];
        let n = rng.random_range(1..25);
        let out = 1 + k % 3;
        let norm = if k % 2 == 0 { VectorNorm::Euclidean } else { VectorNorm::Max };
        let o = GaugeOptions { norm, ..opts };
        let mu = random_measure(&mut rng, n, 2);
        let f = random_table(&mut rng, n, out, 3.0);
        let g = random_table(&mut rng, n, out, 3.0);
        let a = rng.random_range(-10.0..10.0);
        let nm = |t: &FunctionTable| orlicz::gauge_norm(phi, &mu, t, &o).map(|r| r.value);
        let (nf, ng) = (e2s(nm(&f))?, e2s(nm(&g))?);

        let hom = (e2s(nm(&f.scaled(a)))? - a.abs() * nf).abs() / (a.abs() * nf);
        ensure(hom <= 1e-8, || format!("homogeneity off by {hom:.3e} for {phi}"))?;
        let tri = e2s(nm(&e2s(f.add(&g))?))? / (nf + ng) - 1.0;
        ensure(tri <= 1e-8, || format!("triangle inequality off by {tri:.3e} for {phi}"))?;

        let zero = FunctionTable::zeros(n, out);
        ensure(e2s(nm(&zero))? == 0.0, || "N(0) != 0".into())?;
        ensure(nf > 0.0, || "N(f) = 0 for f != 0".into())?;

        // unit ball: rho(f/N) <= 1 < rho(f/(N(1 - 1e-8)))
        let at = e2s(orlicz::modular(phi, &mu, &f, nf, norm))?;
        let inside = e2s(orlicz::modular(phi, &mu, &f, nf * (1.0 - 1e-8), norm))?;
        ensure(at <= 1.0 + 1e-12 && inside > 1.0, || format!("unit ball: rho at N {at}, just inside {inside}"))?;
        let unit = e2s(nm(&f.scaled(1.0 / nf)))?;
        ensure((unit - 1.0).abs() <= 1e-8, || format!("N(f / N(f)) = {unit}"))?;
        worst = [worst[0].max(hom), worst[1].max(tri), worst[2].max(at - 1.0), worst[3].max((unit - 1.0).abs())];
    }
    save(dir, "ac6.json", &worst)?;
    Ok(format!("500 instances; homogeneity {:.1e}, triangle excess {:.1e}, |N(f/N(f)) - 1| {:.1e}", worst[0], worst[1].max(0.0), worst[3]))
}

fn mixture(a: (f64, f64), b: (f64, f64), wa: f64) -> DensitySpec {
    DensitySpec::Mixture {
        components: vec![
            MixtureComponent {
                weight: wa,
                density: DensitySpec::GaussianClipped { mean: vec![a.0], std: a.1 },
            },
            MixtureComponent {
                weight: 1.0 - wa,
                density: DensitySpec::GaussianClipped { mean: vec![b.0], std: b.1 },
            },
        ],
    }
}

fn ac7_robust_run(dir: &Path) -> Outcome {
    let unit = AxisBox::cube(1, 0.0, 1.0).unwrap();
    let specs = [
        mixture((0.15, 0.1), (0.6, 0.15), 0.5),
        mixture((0.3, 0.05), (0.85, 0.1), 0.7),
        mixture((0.5, 0.25), (0.05, 0.05), 0.8),
        mixture((0.7, 0.1), (0.35, 0.2), 0.4),
        mixture((0.95, 0.08), (0.45, 0.12), 0.6),
    ];
    let cfg = RobustConfig {
        case: RobustCase::BoundedShallow,
        family: FamilySource::Sampled {
            clip_box: unit,
            members: specs
                .iter()
                .enumerate()
                .map(|(k, d)| SampledMember { density: d.clone(), n: 256, seed: 700 + k as u64 })
                .collect(),
        },
        target: TargetFunction::sin_2pi(),
        epsilon: 0.05,
        schedule: Schedule {
            widths: vec![8, 16, 32, 64, 128],
            seeds: vec![0, 1, 2],
        },
        features: FeatureConfig { activation: Activation::Sigmoid, ..FeatureConfig::default() },
        psi_candidates: measure::default_psi_candidates(),
        compact_box: None,
        relu: Default::default(),
        fnn: Default::default(),
        norm: VectorNorm::Euclidean,
        record_timing: false,
    };
    let mut out = e2s(robust::run_robust_experiment(&cfg, None))?;
    e2s(robust::write_artifacts(&mut out, dir))?;
    let r = &out.report;
    ensure(out.pair.psi == YoungFunction::power(2.0, 0.5).unwrap(), || format!("psi_M = {}", out.pair.psi))?;

    // independent recomputation of every member's L1 error
    let family = e2s(cfg.family.load(None))?;
    ensure(family.len() == 5 && family.members().iter().all(|m| m.len() == 256), || "family shape".into())?;
    let mut sup = 0.0_f64;
    for nu in family.members() {
        let mut l1 = 0.0;
        for (x, w) in nu.points().iter().zip(nu.weights()) {
            let fx = (2.0 * std::f64::consts::PI * x[0]).sin();
            l1 += (fx - e2s(out.network.evaluate(x))?[0]).abs() * w;
        }
        sup = sup.max(l1);
    }
    ensure((sup - r.sup_l1).abs() <= 1e-12 * sup, || format!("recomputed sup {sup} vs reported {}", r.sup_l1))?;
    ensure(r.sup_l1 <= r.holder_rhs * (1.0 + 1e-8), || format!("Hölder: {} > {}", r.sup_l1, r.holder_rhs))?;
    ensure(r.sup_l1 < 0.05, || format!("sup_l1 {} not below 0.05", r.sup_l1))?;
    Ok(format!(
        "width {} seed {}: sup_l1 {:.4} < 0.05, holder_rhs {:.4}",
        r.width, r.seed, r.sup_l1, r.holder_rhs
    ))
}

fn ac8_equality_witness(dir: &Path) -> Outcome {
    let half_sq = YoungFunction::power(2.0, 0.5).unwrap();
    let mu = e2s(DiscreteMeasure::new(vec![vec![0.0], vec![0.4], vec![1.0], vec![2.5]], vec![0.1, 0.2, 0.3, 0.4]))?;
    let family = e2s(MeasureFamily::new(vec![mu]))?;
    let one = TargetFunction::Constant { dim: 1, value: vec![1.0] };
    let eta = e2s(Network::zero(1, 1))?;
    let r = e2s(robust::verify_robust_bound(&family, &half_sq, &half_sq, &one, &eta, &GaugeOptions::default()))?;
    save(dir, "ac8.json", &r)?;
    ensure((r.sup_l1 - 1.0).abs() <= 1e-10, || format!("sup_l1 = {}", r.sup_l1))?;
    ensure((r.holder_rhs - 1.0).abs() <= 1e-10, || format!("holder_rhs = {:.17}", r.holder_rhs))?;
    Ok(format!("sup_l1 = {}, holder_rhs - 1 = {:.1e}", r.sup_l1, r.holder_rhs - 1.0))
}

fn grid(n0: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..=20).map(|i| -10.0 + i as f64).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..n0 {
        out = out
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                axis.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(*a);
                    q
                })
            })
            .collect();
    }
    out
}

fn ac9_fnn_checks(dir: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w = WeightFn::OnePlusSquaredNorm;
    let mut artifact = Vec::new();
    for n0 in [1, 2] {
        let probes = grid(n0);
        let h_star = AffineFamily::Affine { dim: n0 };
        let axioms = net::check_additive_family(&h_star, &probes, 16, 0);
        ensure(axioms.all_pass(), || format!("H* on R^{n0}: {:?}", axioms.failure))?;
        let linear = net::check_additive_family(&AffineFamily::Linear { dim: n0 }, &probes, 16, 0);
        ensure(linear.failure.as_deref() == Some("contains constants"), || format!("linear family: {:?}", linear.failure))?;
        let zero = net::check_additive_family(&AffineFamily::Zero { dim: n0 }, &probes, 16, 0);
        ensure(zero.failure.as_deref() == Some("point separating"), || format!("zero family: {:?}", zero.failure))?;

        let maps = h_star.samples(32, 1);
        let wc = e2s(net::check_weight_compatibility(&maps, &w, &w, &probes))?;
        // Cauchy-Schwarz: (a.x + b)^2 <= (|a|^2 + b^2)(|x|^2 + 1)
        let bound = maps.iter().map(|h| 1.0 + h.a.iter().map(|v| v * v).sum::<f64>() + h.b * h.b).fold(0.0, f64::max);
        ensure(wc.finite && wc.sup_ratio <= bound * (1.0 + 1e-12), || format!("sup_ratio {} vs bound {bound}", wc.sup_ratio))?;
        ensure(wc.admissible, || "1 + |x|^2 flagged inadmissible".into())?;

        for fam in 0..3 {
            let members: Vec<DiscreteMeasure> = (0..3)
                .map(|_| {
                    let n = rng.random_range(5..30);
                    let pts = (0..n).map(|_| (0..n0).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
                    let ws: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
                    let total: f64 = ws.iter().sum();
                    DiscreteMeasure::new(pts, ws.iter().map(|v| v / total).collect()).unwrap()
                })
                .collect();
            let family = e2s(MeasureFamily::new(members))?;
            let pair = e2s(robust::associated_young_pair(&family, &measure::default_psi_candidates(), &GaugeOptions::default()))?;
            let mu = family.dominating();
            let table = e2s(FunctionTable::from_scalars(mu.points().iter().map(|p| w.eval(p)).collect()))?;
            let nw = e2s(orlicz::gauge_norm(&pair.phi, mu, &table, &GaugeOptions::default()))?.value;
            ensure(nw.is_finite() && nw > 0.0, || format!("N_phi(w) = {nw} on family {fam}"))?;
            artifact.push((n0, fam, wc.sup_ratio, nw));
        }
    }
    save(dir, "ac9.json", &artifact)?;
    Ok("H* passes all axioms; linear and zero families fail as designed; ratios and N_phi(w) finite".into())
}

type Criterion = (&'static str, fn(&Path) -> Outcome, Duration);

fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        ("AC-1 L^p consistency", ac1_lp_consistency, s(5)),
        ("AC-2 conjugate pairs", ac2_conjugate_pairs, s(5)),
        ("AC-3 Young and Hölder inequalities", ac3_young_and_holder, s(10)),
        ("AC-4 ReLU gadget exactness", ac4_gadgets, s(10)),
        ("AC-5 register and clip construction", ac5_register_clip, s(30)),
        ("AC-6 gauge-norm axioms", ac6_gauge_axioms, s(10)),
        ("AC-7 robust desk-scale run", ac7_robust_run, s(60)),
        ("AC-8 Hölder equality witness", ac8_equality_witness, s(1)),
        ("AC-9 FNN hypothesis checks", ac9_fnn_checks, s(5)),
    ]
}

fn run_all(dir: &Path, report: bool) -> bool {
    let mut ok = true;
    for (name, f, limit) in criteria() {
        let sub = dir.join(name.split(' ').next().unwrap());
        std::fs::create_dir_all(&sub).unwrap();
        let start = Instant::now();
        let res = f(&sub);
        let took = start.elapsed();
        let res = res.and_then(|msg| {
            if took <= limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {took:.2?}, limit {limit:?}"))
            }
        });
        if report {
            match &res {
                Ok(msg) => println!("[PASS] {name}: {msg} ({took:.2?})"),
                Err(msg) => println!("[FAIL] {name}: {msg} ({took:.2?})"),
            }
        }
        ok &= res.is_ok();
    }
    ok
}

fn files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn main() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let mut ok = run_all(first.path(), true);

    let again = run_all(second.path(), false);
    let (a, b) = (files(first.path()), files(second.path()));
    let det = if !again {
        Err("second run failed".to_string())
    } else if a.is_empty() {
        Err("no artifacts written".to_string())
    } else if a.keys().ne(b.keys()) {
        Err("artifact sets differ".to_string())
    } else {
        match a.iter().find(|(k, v)| b[*k] != **v) {
            Some((k, _)) => Err(format!("{} differs between runs", k.display())),
            None => Ok(a.len()),
        }
    };
    match det {
        Ok(n) => println!("[PASS] AC-10 determinism: {n} artifacts byte-identical across two runs"),
        Err(msg) => {
            println!("[FAIL] AC-10 determinism: {msg}");
            ok = false;
        }
    }
    if !ok {
        std::process::exit(1);
    }
}
