use nalgebra::DMatrix;
use proptest::prelude::*;

use sumrule_core::cheb::ChebUExpansion;
use sumrule_core::ensemble::{random_weight, random_whole_line, rng};
use sumrule_core::jacobi::JacobiOperator;
use sumrule_core::lns::{
    a_k_of, band_closed_forms, hankel_toeplitz_psd, hs_identity_check, quadratic_form, r2_condition_report, t_of_j,
    PerturbationDirection,
};
use sumrule_core::sumrules::h_via_trace;

/// Dense `T_k` on rows `lo..=hi` by the matrix recurrence.
fn dense_t(j: &JacobiOperator, k: usize, lo: i64, hi: i64) -> DMatrix<f64> {
    let n = (hi - lo + 1) as usize;
    let m = DMatrix::from_fn(n, n, |r, c| j.entry(lo + r as i64, lo + c as i64));
    let mut prev = DMatrix::identity(n, n) * 2.0;
    if k == 0 {
        return prev;
    }
    let mut cur = m.clone();
    for _ in 1..k {
        let next = &m * &cur - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn whole(seed: u64) -> JacobiOperator {
    let mut r = rng(seed);
    random_whole_line(&mut r, -1, 2, 0.45)
}

#[test]
fn bands_match_dense_matrix() {
    let j = whole(1);
    let (lo, hi) = (-30, 30);
    for l in 1..=6 {
        let band = t_of_j(&j, l).unwrap();
        let t = dense_t(&j, l, lo, hi);
        for i in -12..=12i64 {
            for k in -(l as i64)..=l as i64 {
                let (r, c) = ((i - lo) as usize, (i - k - lo) as usize);
                assert!((band.get(k, i) - t[(r, c)]).abs() < 1e-12, "l={l} k={k} i={i}");
            }
        }
    }
}

#[test]
fn a_k_matches_truncated_trace_difference() {
    let free = JacobiOperator::free(sumrule_core::jacobi::Side::WholeLine);
    for seed in 0..5 {
        let j = whole(seed);
        let (lo, hi) = (-40, 40);
        for k in 1..=10 {
            let diff = dense_t(&j, k, lo, hi) - dense_t(&free, k, lo, hi);
            let want = diff.trace() / k as f64;
            assert!((a_k_of(&j, k).unwrap() - want).abs() < 1e-11, "seed {seed} k={k}");
        }
    }
}

#[test]
fn closed_forms_rejects_small_l() {
    assert!(band_closed_forms(&whole(2), 1).is_err());
    assert!(a_k_of(&JacobiOperator::half_line([], [(0, 1.0)]).unwrap(), 1).is_err());
}

#[test]
fn hankel_toeplitz_free_is_zero() {
    let free = JacobiOperator::free(sumrule_core::jacobi::Side::WholeLine);
    let (m, min) = hankel_toeplitz_psd(&free, 5).unwrap();
    assert!(m.iter().all(|&v| v == 0.0));
    assert_eq!(min, 0.0);
}

fn direction() -> impl Strategy<Value = PerturbationDirection> {
    (prop::collection::vec(-1.0..1.0f64, 4), prop::collection::vec(-1.0..1.0f64, 4)).prop_map(|(dp, dq)| {
        PerturbationDirection::new((-1..3).zip(dp).collect::<Vec<_>>(), (-1..3).zip(dq).collect::<Vec<_>>())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hs_identity_holds(seed in 0u64..10_000, l in 1usize..5) {
        let hs = hs_identity_check(&whole(seed), l).unwrap();
        prop_assert!(hs.residual <= 1e-10 * (1.0 + hs.lhs.abs()));
        prop_assert!(hs.rhs >= 0.0);
    }

    #[test]
    fn whole_line_h_is_nonnegative(seed in 0u64..10_000, wseed in 0u64..10_000) {
        let a = random_weight(&mut rng(wseed), 6);
        prop_assert!(h_via_trace(&whole(seed), &a).unwrap() >= -1e-10);
    }

    #[test]
    fn hankel_toeplitz_is_psd(seed in 0u64..10_000) {
        let (m, min) = hankel_toeplitz_psd(&whole(seed), 6).unwrap();
        prop_assert!(min >= -1e-10);
        prop_assert!((&m - m.transpose()).amax() == 0.0);
    }

    #[test]
    fn quadratic_form_nonnegative(d in direction(), wseed in 0u64..10_000) {
        let a = random_weight(&mut rng(wseed), 6);
        prop_assert!(quadratic_form(&a, &d) >= -1e-12);
    }

    #[test]
    fn r2_report_is_twice_quadratic_form(d in direction(), l in 1usize..6) {
        let (q, p) = r2_condition_report(&d, l);
        let qf = quadratic_form(&ChebUExpansion::u_squared(l), &d);
        prop_assert!((q + p - 2.0 * qf).abs() <= 1e-12 * (1.0 + qf));
    }
}
