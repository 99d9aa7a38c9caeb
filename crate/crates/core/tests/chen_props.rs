mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use chenwarp_core::chen::{
    check_lemma, chen_classical, chen_warped, classify_equality, dminimal_identity, lemma_beta,
    rearrangement_identities, ChenError, LemmaInstance, WarpedCase,
};
use chenwarp_core::geomcore::Matrix;
use chenwarp_core::immersion::{build_chart, second_fundamental_form, SpaceForm, WarpedChart};
use chenwarp_core::invariants::{curvature_intrinsic, scalar_tau, warp_laplacian, SubspaceSel};
use chenwarp_core::sampling::{self, halton_box};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn random_alphas(rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    let n = rng.gen_range(2..=8);
    let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    if rng.gen_bool(0.2) {
        // force the equality configuration
        let s = a[0] + a[1];
        a[2..].iter_mut().for_each(|x| *x = s);
    }
    a
}

#[test]
fn lemma_randomized_suite() {
    let mut rng = sampling::rng(7);
    let mut equalities = 0;
    for _ in 0..100_000 {
        let alphas = random_alphas(&mut rng);
        let out = check_lemma(&LemmaInstance::from_alphas(alphas.clone())).unwrap();
        assert!(out.holds, "{alphas:?}");
        assert_eq!(out.equality, out.condition_matches, "{alphas:?}");
        equalities += out.equality as usize;
    }
    assert!(equalities > 10_000);
}

proptest! {
    #[test]
    fn beta_satisfies_the_hypothesis(a in prop::collection::vec(-10.0f64..10.0, 2..10)) {
        let beta = lemma_beta(&a);
        let n = a.len() as f64;
        let s: f64 = a.iter().sum();
        let s2: f64 = a.iter().map(|x| x * x).sum();
        prop_assert!((s * s - (n - 1.0) * (s2 + beta)).abs() <= 1e-9 * (1.0 + s * s + (n - 1.0) * s2));
    }

    #[test]
    fn rearrangements_are_identities(
        n in 3usize..=8,
        n1_frac in 0.0f64..1.0,
        q in 1usize..=4,
        seed in any::<u64>(),
    ) {
        prop_assume!(n >= 4);
        let n1 = 3 + ((n - 4) as f64 * n1_frac).round() as usize;
        let mut rng = sampling::rng(seed);
        let h: Vec<Matrix> = (0..q)
            .map(|_| {
                let mut m = Matrix::zeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        let v = rng.gen_range(-5.0..5.0);
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                    }
                }
                m
            })
            .collect();
        let scale: f64 = h.iter().map(|m| m.frobenius().powi(2)).sum();
        let (a, b) = rearrangement_identities(&h, n1).unwrap();
        prop_assert!(a <= 1e-12 * scale && b <= 1e-12 * scale);
    }
}

#[test]
fn dminimal_identity_on_totally_geodesic_examples() {
    let chart = great_sphere();
    for u in halton_box(16, &chart.domain, 0.05) {
        let p = second_fundamental_form(&chart, &u).unwrap();
        let w = warp_laplacian(&chart, &u).unwrap();
        let d = dminimal_identity(&p, w.lap_ratio, &chart.ambient).unwrap();
        assert!(d.lhs.abs() < 1e-12);
        assert!(d.residual <= 1e-8, "{d:?}");
    }
    let plane = build_chart(&spec(
        &["t"],
        &["s"],
        "1",
        &["t", "s", "0"],
        SpaceForm::euclidean(3),
        &[("t", -1.0, 1.0), ("s", -1.0, 1.0)],
    ))
    .unwrap();
    let p = second_fundamental_form(&plane, &[0.2, 0.1]).unwrap();
    let d = dminimal_identity(&p, 0.0, &plane.ambient).unwrap();
    assert_eq!(d.residual, 0.0);
}

#[test]
fn clifford_torus_is_not_dminimal() {
    // each block trace is ±1 although the full trace vanishes
    let chart = clifford_s3();
    let p = second_fundamental_form(&chart, &[1.0, 2.0]).unwrap();
    let w = warp_laplacian(&chart, &[1.0, 2.0]).unwrap();
    assert!(matches!(
        dminimal_identity(&p, w.lap_ratio, &chart.ambient),
        Err(ChenError::PreconditionError(_))
    ));
}

#[test]
fn classical_inequality_on_the_round_three_sphere() {
    let chart = s3_warped();
    let u = [1.2, 0.9, 2.0];
    let p = second_fundamental_form(&chart, &u).unwrap();
    let r = curvature_intrinsic(&chart, &u).unwrap();
    let rep = chen_classical(&p, &r, &chart.ambient).unwrap();
    assert!((rep.lhs - 1.0).abs() < 1e-6);
    assert!((rep.rhs + 0.75).abs() < 1e-6);
    assert!((rep.slack - 1.75).abs() < 1e-6);
    let df = rep.delta_form.unwrap();
    assert!((df.delta - 2.0).abs() < 1e-6);
    assert!((df.bound - 2.25).abs() < 1e-9);
}

#[test]
fn classical_inequality_totally_geodesic_plane() {
    let plane = build_chart(&spec(
        &["t"],
        &["s"],
        "1",
        &["t", "s", "0"],
        SpaceForm::euclidean(3),
        &[("t", -1.0, 1.0), ("s", -1.0, 1.0)],
    ))
    .unwrap();
    let p = second_fundamental_form(&plane, &[0.3, -0.2]).unwrap();
    let r = curvature_intrinsic(&plane, &[0.3, -0.2]).unwrap();
    let rep = chen_classical(&p, &r, &plane.ambient).unwrap();
    assert_eq!((rep.lhs, rep.rhs), (0.0, 0.0));
    assert!(rep.equality);
    assert!(rep.pattern.matches);
    assert_eq!(rep.pattern.mu, (0.0, 0.0, 0.0));
}

#[test]
fn classical_inequality_in_dimension_two() {
    let chart = build_chart(&spec(
        &["t"],
        &["s"],
        "sin(t)",
        &["sin(t)*cos(s)", "sin(t)*sin(s)", "cos(t)"],
        SpaceForm::euclidean(3),
        &[("t", 0.0, PI), ("s", 0.0, 2.0 * PI)],
    ))
    .unwrap();
    let p = second_fundamental_form(&chart, &[1.0, 1.0]).unwrap();
    let r = curvature_intrinsic(&chart, &[1.0, 1.0]).unwrap();
    let rep = chen_classical(&p, &r, &chart.ambient).unwrap();
    assert!((rep.lhs - 1.0).abs() < 1e-9);
    assert!((rep.rhs - 0.5).abs() < 1e-9);
}

#[test]
fn displayed_classical_form_fails_when_scalar_curvature_is_negative() {
    // n = 2 and K = −1: inf K = −1 but the bound reads ½τ = −½
    let chart = hyperbolic_warp();
    let p = second_fundamental_form(&chart, &[0.1, 0.2]).unwrap();
    let r = curvature_intrinsic(&chart, &[0.1, 0.2]).unwrap();
    let rep = chen_classical(&p, &r, &chart.ambient).unwrap();
    assert!((rep.slack + 0.5).abs() < 1e-9, "{}", rep.slack);
    // the δ-form of the same inequality holds with equality
    assert!(rep.delta_form.unwrap().slack.abs() < 1e-9);
}

#[test]
fn warped_case_ii_on_the_round_three_sphere() {
    let chart = s3_warped();
    let u = [FRAC_PI_2, 1.0, 2.0];
    let p = second_fundamental_form(&chart, &u).unwrap();
    let r = curvature_intrinsic(&chart, &u).unwrap();
    let w = warp_laplacian(&chart, &u).unwrap();
    let rep = chen_warped(&p, &r, w.lap_ratio, &chart.ambient, WarpedCase::Ii).unwrap();
    assert!(rep.lhs.abs() < 1e-9);
    assert!((rep.rhs - 2.5).abs() < 1e-9);
    assert!((rep.slack - 2.5).abs() < 1e-6);
    assert!(!rep.equality);
    assert_eq!(rep.corollary_holds, None);
}

#[test]
fn warped_equality_on_the_great_sphere() {
    let chart = great_sphere();
    for u in halton_box(8, &chart.domain, 0.05) {
        let p = second_fundamental_form(&chart, &u).unwrap();
        let r = curvature_intrinsic(&chart, &u).unwrap();
        let w = warp_laplacian(&chart, &u).unwrap();
        let rep = chen_warped(&p, &r, w.lap_ratio, &chart.ambient, WarpedCase::Ii).unwrap();
        assert!(rep.slack.abs() <= 1e-7, "{}", rep.slack);
        assert!(rep.equality);
        assert_eq!(rep.corollary_holds, Some(true));
        let d = classify_equality(&p, p.n1);
        assert!(d.mixed_tg && d.d1_minimal && d.d2_minimal && d.minimal);
    }
}

#[test]
fn warped_case_dimension_errors() {
    let chart = s3_warped();
    let u = [1.0, 1.0, 1.0];
    let p = second_fundamental_form(&chart, &u).unwrap();
    let r = curvature_intrinsic(&chart, &u).unwrap();
    let err = chen_warped(&p, &r, 2.0, &chart.ambient, WarpedCase::I).unwrap_err();
    assert!(matches!(err, ChenError::CaseDimensionError(_)));
    let torus = torus_of_revolution();
    let p = second_fundamental_form(&torus, &[1.0, 1.0]).unwrap();
    let r = curvature_intrinsic(&torus, &[1.0, 1.0]).unwrap();
    let err = chen_warped(&p, &r, 0.0, &torus.ambient, WarpedCase::Ii).unwrap_err();
    assert_eq!(err.to_string(), "case ii requires n₂ ≥ 2");
}

fn reports(chart: &WarpedChart, u: &[f64]) -> Vec<(String, f64, f64)> {
    let p = second_fundamental_form(chart, u).unwrap();
    let r = curvature_intrinsic(chart, u).unwrap();
    let w = warp_laplacian(chart, u).unwrap();
    let tau = scalar_tau(&r, &SubspaceSel::All).unwrap();
    let mut out = Vec::new();
    let c = chen_classical(&p, &r, &chart.ambient).unwrap();
    out.push(("chen13".to_string(), c.slack, tau));
    out.push(("chen13_delta".to_string(), c.delta_form.unwrap().slack, 0.0));
    for (case, ok) in [(WarpedCase::I, p.n1 >= 2), (WarpedCase::Ii, p.n2() >= 2)] {
        if ok {
            let rep = chen_warped(&p, &r, w.lap_ratio, &chart.ambient, case).unwrap();
            out.push((format!("{case:?}"), rep.slack, 0.0));
        }
    }
    out
}

#[test]
fn inequalities_hold_where_they_apply() {
    for (name, chart) in all_charts() {
        for u in halton_box(12, &chart.domain, 0.05) {
            for (which, slack, tau) in reports(&chart, &u) {
                // the displayed classical form is only implied by the δ-form
                // when the scalar curvature is non-negative
                if which == "chen13" && tau < 0.0 {
                    continue;
                }
                assert!(slack >= -1e-6, "{name} {which} at {u:?}: {slack}");
            }
        }
    }
}

fn scaled(chart: &WarpedChart, lambda: f64) -> WarpedChart {
    let mut spec = chart.spec.clone();
    spec.components = spec.components.iter().map(|c| format!("{lambda}*({c})")).collect();
    spec.warp = format!("{lambda}*({})", spec.warp);
    build_chart(&spec).unwrap()
}

#[test]
fn slack_scales_inversely_with_the_square_of_the_immersion() {
    for chart in [s3_warped(), torus_of_revolution(), exp_tube(), catenoid_strip()] {
        for lambda in [0.5, 2.0] {
            let big = scaled(&chart, lambda);
            for u in halton_box(4, &chart.domain, 0.05) {
                let p = second_fundamental_form(&chart, &u).unwrap();
                let q = second_fundamental_form(&big, &u).unwrap();
                assert!((q.mean_h2 - p.mean_h2 / (lambda * lambda)).abs() < 1e-9);
                for ((w0, s0, _), (w1, s1, _)) in reports(&chart, &u).into_iter().zip(reports(&big, &u)) {
                    assert_eq!(w0, w1);
                    assert!((s1 - s0 / (lambda * lambda)).abs() < 1e-6 * (1.0 + s0.abs()), "{w0}: {s0} {s1}");
                    assert_eq!(s0 > 1e-9, s1 > 1e-9);
                }
            }
        }
    }
}
