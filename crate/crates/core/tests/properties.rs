use orlicz_uat::emit;
use orlicz_uat::fit::TargetFunction;
use orlicz_uat::measure::{DiscreteMeasure, MeasureFamily};
use orlicz_uat::net::{self, Activation, Layer, Network};
use orlicz_uat::orlicz::{self, FunctionTable, GaugeOptions, VectorNorm};
use orlicz_uat::robust;
use orlicz_uat::young::{self, ConjugateGrid, YoungFunction};
use orlicz_uat::AxisBox;
use proptest::prelude::*;

fn phi_strategy() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.0..4.0f64, 0.1..3.0f64).prop_map(|(p, s)| YoungFunction::power(p, s).unwrap()),
        Just(YoungFunction::exp_minus_linear()),
        Just(YoungFunction::entropy()),
    ]
}

/// Measure and an aligned table with `out` columns.
fn instance(out: usize) -> impl Strategy<Value = (DiscreteMeasure, FunctionTable)> {
    (1usize..10).prop_flat_map(move |n| {
        (
            prop::collection::vec(-5.0..5.0f64, n),
            prop::collection::vec(0.01..2.0f64, n),
            prop::collection::vec(-4.0..4.0f64, n * out),
        )
            .prop_map(move |(xs, ws, vs)| {
                // distinct support points
                let pts = xs.iter().enumerate().map(|(i, x)| vec![i as f64 + x / 100.0]).collect();
                (DiscreteMeasure::new(pts, ws).unwrap(), FunctionTable::from_flat(out, vs).unwrap())
            })
    })
}

fn opts(norm: VectorNorm) -> GaugeOptions {
    GaugeOptions { norm, ..GaugeOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gauge_is_homogeneous(phi in phi_strategy(), (mu, f) in instance(2), a in -5.0..5.0f64) {
        let o = opts(VectorNorm::Euclidean);
        let n = orlicz::gauge_norm(&phi, &mu, &f, &o).unwrap().value;
        let na = orlicz::gauge_norm(&phi, &mu, &f.scaled(a), &o).unwrap().value;
        prop_assert!((na - a.abs() * n).abs() <= 1e-8 * (a.abs() * n).max(1e-300));
    }

    #[test]
    fn gauge_triangle(phi in phi_strategy(), (mu, f) in instance(1), seed in 0u64..1000) {
        let g = FunctionTable::from_scalars((0..mu.len()).map(|i| ((i as u64 * 7 + seed) % 11) as f64 - 5.0).collect()).unwrap();
        let o = opts(VectorNorm::Max);
        let n = |t: &FunctionTable| orlicz::gauge_norm(&phi, &mu, t, &o).unwrap().value;
        prop_assert!(n(&f.add(&g).unwrap()) <= (n(&f) + n(&g)) * (1.0 + 1e-8));
    }

    #[test]
    fn gauge_unit_ball((mu, f) in instance(1), phi in phi_strategy()) {
        let o = opts(VectorNorm::Euclidean);
        let r = orlicz::gauge_norm(&phi, &mu, &f, &o).unwrap();
        if r.value == 0.0 {
            prop_assert!(f.as_flat().iter().all(|v| *v == 0.0));
        } else {
            let at = orlicz::modular(&phi, &mu, &f, r.value, VectorNorm::Euclidean).unwrap();
            prop_assert!(at <= 1.0 + 1e-12);
            let inside = orlicz::modular(&phi, &mu, &f, r.value * (1.0 - 1e-6), VectorNorm::Euclidean).unwrap();
            prop_assert!(inside > 1.0 - 1e-9);
        }
    }

    #[test]
    fn young_inequality(p in 1.1..5.0f64, x in 0.0..20.0f64, y in 0.0..20.0f64) {
        let phi = YoungFunction::normalized_power(p).unwrap();
        let psi = young::complementary(&phi, &ConjugateGrid::default()).unwrap();
        prop_assert!(young::young_slack(&phi, &psi, x, y) >= -1e-10 * (1.0 + x * y));
    }

    #[test]
    fn generalized_holder(phi in phi_strategy(), (mu, f) in instance(1), seed in 0u64..1000) {
        let psi = match young::complementary(&phi, &ConjugateGrid::default()) {
            Ok(psi) => psi,
            // power:1 has no finite conjugate
            Err(_) => return Ok(()),
        };
        let g = FunctionTable::from_scalars((0..mu.len()).map(|i| ((i as u64 * 13 + seed) % 7) as f64 * 0.5).collect()).unwrap();
        let h = orlicz::holder_check(&phi, &psi, &mu, &f, &g, &GaugeOptions::default()).unwrap();
        prop_assert!(h.holds, "{} > {}", h.lhs, h.rhs);
    }

    #[test]
    fn gadgets_are_exact(x in -1e3..1e3f64, y in -1e3..1e3f64) {
        prop_assert!((net::max_gadget().evaluate(&[x, y]).unwrap()[0] - x.max(y)).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs())));
        prop_assert!((net::min_gadget().evaluate(&[x, y]).unwrap()[0] - x.min(y)).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs())));
    }

    #[test]
    fn register_form_agrees(
        w1 in prop::collection::vec(-2.0..2.0f64, 6),
        b1 in prop::collection::vec(-1.0..1.0f64, 3),
        w2 in prop::collection::vec(-2.0..2.0f64, 3),
        x in prop::collection::vec(-1.0..1.0f64, 2),
    ) {
        let shallow = Network::new(2, vec![
            Layer::new(w1.chunks(2).map(<[f64]>::to_vec).collect(), b1, Activation::Relu),
            Layer::new(vec![w2], vec![0.3], Activation::None),
        ]).unwrap();
        let domain = AxisBox::cube(2, -1.0, 1.0).unwrap();
        let reg = net::to_register_form(&shallow, &domain).unwrap();
        prop_assert!(reg.has_register_width());
        let (a, b) = (shallow.evaluate(&x).unwrap()[0], reg.evaluate(&x).unwrap()[0]);
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn robust_error_monotone_and_singleton(
        (m1, _) in instance(1),
        (m2, _) in instance(1),
        freq in 0.1..3.0f64,
    ) {
        let f = TargetFunction::SinProduct { dim: 1, frequency: freq };
        let eta = Network::zero(1, 1).unwrap();
        let one = MeasureFamily::new(vec![m1.clone()]).unwrap();
        let both = MeasureFamily::new(vec![m1.clone(), m2]).unwrap();
        let e1 = robust::robust_error(&one, &f, &eta, VectorNorm::Euclidean).unwrap();
        let e2 = robust::robust_error(&both, &f, &eta, VectorNorm::Euclidean).unwrap();
        prop_assert!(e2.sup_l1 >= e1.sup_l1);
        let direct = orlicz::l1_norm(&m1, &f.tabulate(&m1).unwrap(), VectorNorm::Euclidean).unwrap();
        prop_assert_eq!(e1.sup_l1, direct);
    }

    #[test]
    fn json_round_trip_is_exact(vals in prop::collection::vec(-1e300..1e300f64, 1..20)) {
        let t = FunctionTable::from_scalars(vals).unwrap();
        let s = emit::json_string(&t).unwrap();
        let back: FunctionTable = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, t);
    }
}

#[test]
fn duplicates_merge() {
    let m = DiscreteMeasure::new(vec![vec![0.0], vec![-0.0], vec![1.0]], vec![0.25, 0.25, 0.5]).unwrap();
    assert_eq!(m.len(), 2);
    assert_eq!(m.weight_at(&[0.0]), 0.5);
}
