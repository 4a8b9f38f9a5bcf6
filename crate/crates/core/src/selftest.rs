//! Seeded invariant suites behind the `selftest` subcommand.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::AxisBox;
use crate::error::Result;
use crate::fit::TargetFunction;
use crate::measure::{DiscreteMeasure, MeasureFamily};
use crate::net::{self, Activation, ClipParams, Layer, Network};
use crate::orlicz::{self, FunctionTable, GaugeOptions};
use crate::robust;
use crate::young::{self, ConjugateGrid, YoungFunction};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {} ({} checks)", self.name, self.checks)?;
        for msg in &self.failures {
            write!(f, "\n    {msg}")?;
        }
        Ok(())
    }
}

struct Suite {
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, checks: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(msg());
        }
    }

    fn result<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || e.to_string());
                None
            }
        }
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            name: self.name,
            checks: self.checks,
            failures: self.failures,
        }
    }
}

fn random_measure(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> DiscreteMeasure {
    let points = (0..n).map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let weights = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    DiscreteMeasure::new(points, weights).expect("positive weights")
}

fn random_table(rng: &mut ChaCha8Rng, rows: usize, out: usize) -> FunctionTable {
    FunctionTable::from_flat(out, (0..rows * out).map(|_| rng.random_range(-3.0..3.0)).collect()).expect("shape")
}

fn young_suite(seed: u64) -> SuiteOutcome {
    let mut s = Suite::new("young");
    let grid = ConjugateGrid::default();
    for p in [1.5, 2.0, 3.0] {
        let Some(phi) = s.result(YoungFunction::normalized_power(p)) else { continue };
        let q = p / (p - 1.0);
        for y in [0.1_f64, 0.5, 1.0, 2.0, 7.5] {
            let want = y.powf(q) / q;
            let got = young::conjugate_at(&phi, y).unwrap_or(f64::NAN);
            s.check((got - want).abs() <= 1e-6 * want, || format!("conjugate of |x|^{p}/{p} at {y}: {got} vs {want}"));
        }
    }
    let pairs = [
        (YoungFunction::normalized_power(2.0), young::complementary(&YoungFunction::normalized_power(2.0).unwrap(), &grid)),
        (YoungFunction::normalized_power(3.0), young::complementary(&YoungFunction::normalized_power(3.0).unwrap(), &grid)),
        (Ok(YoungFunction::exp_minus_linear()), Ok(YoungFunction::entropy())),
    ];
    for (k, (phi, psi)) in pairs.into_iter().enumerate() {
        let (Some(phi), Some(psi)) = (s.result(phi), s.result(psi)) else { continue };
        let r = young::check_young_inequality(&phi, &psi, 2000, seed + k as u64, 5.0);
        s.check(r.max_violation <= 1e-10, || format!("Young inequality for {phi}: violation {}", r.max_violation));
    }
    s.finish()
}

fn gauge_suite(seed: u64) -> SuiteOutcome {
    let mut s = Suite::new("gauge norm");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = GaugeOptions::default();
    for _ in 0..100 {
        let n = rng.random_range(1..12);
        let mu = random_measure(&mut rng, 1, n);
        let f = random_table(&mut rng, mu.len(), 1);
        let p = [1.0, 1.5, 2.0, 3.0][rng.random_range(0..4)];
        let phi = YoungFunction::power(p, 1.0).expect("p >= 1");
        let Some(got) = s.result(orlicz::gauge_norm(&phi, &mu, &f, &opts)) else { continue };
        let want = f
            .as_flat()
            .iter()
            .zip(mu.weights())
            .map(|(v, w)| v.abs().powf(p) * w)
            .sum::<f64>()
            .powf(1.0 / p);
        s.check((got.value - want).abs() <= 1e-8 * want.max(1e-300), || format!("L^{p}: {} vs {want}", got.value));

        let g = random_table(&mut rng, mu.len(), 1);
        let a = rng.random_range(-4.0..4.0);
        let nf = got.value;
        let (Some(ng), Some(nsum), Some(nscaled)) = (
            s.result(orlicz::gauge_norm(&phi, &mu, &g, &opts)),
            s.result(f.add(&g).and_then(|h| orlicz::gauge_norm(&phi, &mu, &h, &opts))),
            s.result(orlicz::gauge_norm(&phi, &mu, &f.scaled(a), &opts)),
        ) else {
            continue;
        };
        s.check(nsum.value <= (nf + ng.value) * (1.0 + 1e-8), || "triangle inequality".into());
        s.check((nscaled.value - a.abs() * nf).abs() <= 1e-8 * (a.abs() * nf).max(1e-300), || "homogeneity".into());

        let psi = young::complementary(&phi, &ConjugateGrid::default());
        if let Ok(psi) = psi {
            if let Some(h) = s.result(orlicz::holder_check(&phi, &psi, &mu, &f, &g, &opts)) {
                s.check(h.holds, || format!("Hölder: {} > {}", h.lhs, h.rhs));
            }
        }
    }
    s.finish()
}

fn gadget_suite(seed: u64) -> SuiteOutcome {
    let mut s = Suite::new("relu gadgets");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mx, mn) = (net::max_gadget(), net::min_gadget());
    for _ in 0..2000 {
        let x = rng.random_range(-50.0..50.0);
        let y = rng.random_range(-50.0..50.0);
        let a = mx.evaluate(&[x, y]).map(|v| v[0]).unwrap_or(f64::NAN);
        let b = mn.evaluate(&[x, y]).map(|v| v[0]).unwrap_or(f64::NAN);
        s.check((a - x.max(y)).abs() <= 1e-12, || format!("max({x}, {y}) = {a}"));
        s.check((b - x.min(y)).abs() <= 1e-12, || format!("min({x}, {y}) = {b}"));
    }
    if let Some(bump) = s.result(net::bump_1d(0.0, 1.0, 0.5)) {
        for (x, want) in [(0.5, 1.0), (-0.5, 0.0), (1.5, 0.0), (-0.25, 0.5), (1.25, 0.5)] {
            let got = bump.evaluate(&[x]).map(|v| v[0]).unwrap_or(f64::NAN);
            s.check((got - want).abs() <= 1e-12, || format!("bump({x}) = {got}, want {want}"));
        }
    }
    s.finish()
}

fn random_shallow(rng: &mut ChaCha8Rng, n0: usize, nl: usize, m: usize) -> Network {
    let mut draw = |r: usize, c: usize| -> Vec<Vec<f64>> { (0..r).map(|_| (0..c).map(|_| rng.random_range(-2.0..2.0)).collect()).collect() };
    let a1 = draw(m, n0);
    let b1 = draw(1, m).remove(0);
    let a2 = draw(nl, m);
    let b2 = draw(1, nl).remove(0);
    Network::new(n0, vec![Layer::new(a1, b1, Activation::Relu), Layer::new(a2, b2, Activation::None)]).expect("valid shapes")
}

fn register_suite(seed: u64) -> SuiteOutcome {
    let mut s = Suite::new("register and clip");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..5 {
        let n0 = rng.random_range(1..=3);
        let nl = rng.random_range(1..=2);
        let m = rng.random_range(1..=16);
        let shallow = random_shallow(&mut rng, n0, nl, m);
        let Some(j) = s.result(AxisBox::cube(n0, -1.0, 1.0)) else { continue };
        let delta = 0.25;
        let Some(domain) = s.result(j.enlarge(delta)) else { continue };
        let Some(reg) = s.result(net::to_register_form(&shallow, &domain)) else { continue };
        s.check(reg.has_register_width(), || format!("register widths {:?}", reg.network().hidden_widths()));
        let params = ClipParams { j: j.clone(), delta, c: -1.0, cap: 1.0 };
        let Some(clipped) = s.result(net::clip_and_localize(&reg, &params)) else { continue };
        s.check(clipped.has_register_width(), || format!("clipped widths {:?}", clipped.network().hidden_widths()));
        for _ in 0..100 {
            let x: Vec<f64> = (0..n0).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (Ok(g), Ok(r), Ok(c)) = (shallow.evaluate(&x), reg.evaluate(&x), clipped.evaluate(&x)) else {
                s.check(false, || "evaluation failed".into());
                continue;
            };
            for k in 0..nl {
                s.check((g[k] - r[k]).abs() <= 1e-9, || format!("register form differs at {x:?}"));
                s.check((c[k] - g[k].clamp(-1.0, 1.0)).abs() <= 1e-9, || format!("clip differs at {x:?}"));
            }
            let far: Vec<f64> = x.iter().map(|v| v.signum() * 1.5 + v).collect();
            if let Ok(c) = clipped.evaluate(&far) {
                s.check(c.iter().all(|v| v.abs() <= 1e-12), || format!("nonzero outside K at {far:?}"));
            }
        }
    }
    s.finish()
}

fn robust_suite(seed: u64) -> SuiteOutcome {
    let mut s = Suite::new("robust bound");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half_sq = YoungFunction::power(2.0, 0.5).expect("valid");
    let opts = GaugeOptions::default();
    let one = TargetFunction::Constant { dim: 1, value: vec![1.0] };
    let Some(zero) = s.result(Network::zero(1, 1)) else { return s.finish() };
    let Some(mu) = s.result(DiscreteMeasure::new(vec![vec![0.0], vec![0.5], vec![1.0]], vec![0.25, 0.25, 0.5])) else {
        return s.finish();
    };
    if let Some(fam) = s.result(MeasureFamily::new(vec![mu])) {
        if let Some(r) = s.result(robust::verify_robust_bound(&fam, &half_sq, &half_sq, &one, &zero, &opts)) {
            s.check((r.sup_l1 - 1.0).abs() <= 1e-10 && (r.holder_rhs - 1.0).abs() <= 1e-10, || {
                format!("equality witness: sup {} rhs {}", r.sup_l1, r.holder_rhs)
            });
        }
    }
    for _ in 0..50 {
        let k = rng.random_range(1..5);
        let members: Vec<DiscreteMeasure> = (0..k)
            .map(|_| {
                let n = rng.random_range(1..8);
                let m = random_measure(&mut rng, 1, n);
                let mass = m.mass();
                DiscreteMeasure::new(m.points().to_vec(), m.weights().iter().map(|w| w / mass).collect()).expect("normalized")
            })
            .collect();
        let Some(fam) = s.result(MeasureFamily::new(members)) else { continue };
        let Some(pair) = s.result(robust::associated_young_pair(&fam, &crate::measure::default_psi_candidates(), &opts)) else {
            continue;
        };
        let f = TargetFunction::SinProduct { dim: 1, frequency: rng.random_range(0.2..2.0) };
        let eta = random_shallow(&mut rng, 1, 1, 4);
        s.result(robust::verify_robust_bound(&fam, &pair.phi, &pair.psi, &f, &eta, &opts));
        s.check(true, String::new);
    }
    s.finish()
}

/// Runs every suite with seeds derived from `seed`.
pub fn run_all(seed: u64) -> Vec<SuiteOutcome> {
    vec![
        young_suite(seed),
        gauge_suite(seed.wrapping_add(1)),
        gadget_suite(seed.wrapping_add(2)),
        register_suite(seed.wrapping_add(3)),
        robust_suite(seed.wrapping_add(4)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass() {
        for outcome in run_all(0) {
            assert!(outcome.passed(), "{outcome}");
            assert!(outcome.checks > 0);
        }
    }

    #[test]
    fn failures_are_reported() {
        let mut s = Suite::new("t");
        s.check(false, || "boom".into());
        let o = s.finish();
        assert!(!o.passed());
        assert_eq!(o.to_string(), "[FAIL] t (1 checks)\n    boom");
    }
}
