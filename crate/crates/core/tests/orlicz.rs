use orlicz_core::orlicz::*;
use proptest::prelude::*;

fn linearized(r: f64) -> OrliczFunction {
    normalize_by_linearization(&OrliczFunction::power(r).unwrap(), NormalizeMode::Default).unwrap()
}

fn family() -> impl Strategy<Value = OrliczFunction> {
    (1.2f64..3.0, 1.2f64..3.0, 0.05f64..2.0).prop_map(|(r0, r1, b)| {
        normalize_by_linearization(&OrliczFunction::piecewise_power(&[b], &[r0, r1]).unwrap(), NormalizeMode::Default)
            .unwrap()
    })
}

fn vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_homogeneous(m in family(), x in vector(), lambda in 1e-3f64..1e3) {
        let n = luxemburg_norm(&m, &x).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        let ns = luxemburg_norm(&m, &scaled).unwrap();
        prop_assert!((ns - lambda * n).abs() <= 1e-10 * (lambda * n).max(1e-300));
    }

    #[test]
    fn norm_triangle_inequality(m in family(), x in vector(), y in vector()) {
        let k = x.len().min(y.len());
        let sum: Vec<f64> = x[..k].iter().zip(&y[..k]).map(|(a, b)| a + b).collect();
        let lhs = luxemburg_norm(&m, &sum).unwrap();
        let rhs = luxemburg_norm(&m, &x[..k]).unwrap() + luxemburg_norm(&m, &y[..k]).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn norm_is_monotone(m in family(), x in vector(), i in 0usize..12, bump in 0.0f64..10.0) {
        let i = i % x.len();
        let mut y = x.clone();
        y[i] = y[i].abs() + bump;
        prop_assert!(luxemburg_norm(&m, &y).unwrap() >= luxemburg_norm(&m, &x).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn linearized_functions_are_normalized(m in family()) {
        prop_assert!((m.normalization_integral() - 1.0).abs() <= 1e-8);
        prop_assert!(m.is_normalized() && m.has_linear_tail());
        prop_assert!(m.check_invariants(&log_grid(1e-6, 1e3, 400)).is_ok());
    }

    /// If `M(t)/t^(q+ε)` is nondecreasing the integral constant is at most `1/ε`.
    #[test]
    fn elasticity_bounds_integral_constant(
        eps in 0.1f64..0.8,
        extra in prop::collection::vec(0.0f64..1.5, 3),
        b in 0.05f64..1.0,
    ) {
        let q = 1.5;
        let exps: Vec<f64> = extra.iter().map(|e| q + eps + e).collect();
        let m = OrliczFunction::piecewise_power(&[b, 3.0 * b], &exps).unwrap();
        let rep = check_integral_condition(&m, q, &GridSpec::default()).unwrap();
        prop_assert!(rep.pass);
        prop_assert!(rep.constant <= (1.0 / eps) * (1.0 + 1e-6), "C = {} > 1/ε = {}", rep.constant, 1.0 / eps);
    }

    #[test]
    fn young_inequality(m in family(), s in 0.01f64..1.5, t in 0.0f64..5.0) {
        let star = conjugate(&m);
        let bound = star.eval(s);
        if bound.is_finite() {
            prop_assert!(s * t <= m.eval(t) + bound + 1e-12 * (1.0 + s * t));
        }
    }
}

#[test]
fn euclidean_norm_from_square() {
    let m = OrliczFunction::power(2.0).unwrap();
    assert!((luxemburg_norm(&m, &[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn shifted_linear_norm_of_ones() {
    // Σ (1/t − 1)₊ ≤ 1 gives t = n/(n+1)
    let m = OrliczFunction::shifted_linear(1.0).unwrap();
    for n in [1usize, 4, 100] {
        let v = luxemburg_norm(&m, &vec![1.0; n]).unwrap();
        assert!((v - n as f64 / (n as f64 + 1.0)).abs() < 1e-12);
    }
}

#[test]
fn nested_norm_reduces_to_lq_of_row_norms() {
    let m = OrliczFunction::power(2.0).unwrap();
    let rows = [vec![3.0, 4.0], vec![0.0, 12.0]];
    let v = nested_norm(&m, rows.iter().map(Vec::as_slice), 1.5).unwrap();
    assert!((v - lp_norm(&[5.0, 12.0], 1.5)).abs() < 1e-10);
}

#[test]
fn pure_power_integral_constant() {
    for r in [1.7, 2.0, 2.6] {
        let rep = check_integral_condition(&OrliczFunction::power(r).unwrap(), 1.5, &GridSpec::default()).unwrap();
        assert!((rep.constant - 1.0 / (r - 1.5)).abs() < 1e-8 / (r - 1.5));
    }
}

#[test]
fn conditions_agree_on_borderline_and_clear_cases() {
    for (r, expected) in [(1.5, false), (1.9, true), (1.45, false)] {
        let m = linearized(r);
        let a = check_integral_condition(&m, 1.5, &GridSpec::default()).unwrap();
        let b = check_pointwise_condition(&m, 1.5, &GridSpec::default()).unwrap();
        assert_eq!((a.pass, b.pass), (expected, expected), "r = {r}");
    }
}

#[test]
fn dual_condition_is_equality_for_powers() {
    let (r, q) = (2.0, 1.5);
    let m = OrliczFunction::power(r).unwrap();
    let rep = check_pointwise_condition(&m, q, &GridSpec::default()).unwrap();
    let c = rep.c.unwrap();
    let dual = check_dual_condition(&m, q, c, rep.constant, 64).unwrap();
    assert!(dual.pass, "{dual:?}");
}

#[test]
fn limits_vanish_above_exponent() {
    let est = check_limits(&linearized(1.8), 1.5).unwrap();
    assert!(est.value.abs() < 1e-6 && est.first.abs() < 1e-6 && est.second.abs() < 1e-6, "{est:?}");
}

#[test]
fn equivalence_of_scaled_copies() {
    let m = linearized(1.7);
    let n = m.scale_argument(2.0).unwrap().scale_values(3.0).unwrap();
    let grid = log_grid(1e-4, 1e2, 200);
    let c = equivalence_constants(&m, &n, &grid).unwrap();
    assert!(check_equivalence(&m, &n, c.a, c.b, &grid));
}
