use std::f64::consts::PI;

use proptest::prelude::*;
use vacuumlab::weights::*;
use vacuumlab::Verdict;

fn cheb(n: usize) -> Grid1d {
    Grid1d::chebyshev(n, 2.0).unwrap()
}

#[test]
fn scaling_is_homogeneous() {
    let g: WeightedGrid = cheb(32).into();
    let WeightedGrid::Interval(ref gi) = g else {
        unreachable!()
    };
    let f = gi.sample(|x| (3.0 * x).sin() + x * x);
    let spec = WeightedNormSpec::new(2, 1.5).unwrap();
    let a = weighted_norm(&f, &spec, &g).unwrap();
    let scaled: Vec<f64> = f.iter().map(|v| 2.5 * v).collect();
    let b = weighted_norm(&scaled, &spec, &g).unwrap();
    assert!((b - 2.5 * a).abs() < 1e-12 * b);
}

#[test]
fn fractional_sine_matches_brute_force_oracle() {
    // trapezoid double integral of |sin πx - sin πy|²/|x-y|² on a fine uniform grid
    let m = 2000;
    let h = 2.0 / m as f64;
    let pts: Vec<f64> = (0..=m).map(|i| -1.0 + i as f64 * h).collect();
    let tw = |i: usize| if i == 0 || i == m { 0.5 * h } else { h };
    let mut semi = 0.0;
    for i in 0..=m {
        for j in 0..=m {
            if i != j {
                let d = (PI * pts[i]).sin() - (PI * pts[j]).sin();
                semi += tw(i) * tw(j) * d * d / (pts[i] - pts[j]).powi(2);
            }
        }
    }
    // the excluded diagonal strip carries π² cos²(πx) h per unit length
    let strip: f64 = (0..=m)
        .map(|i| tw(i) * PI * PI * (PI * pts[i]).cos().powi(2) * h)
        .sum();
    let oracle = (1.0 + semi + strip).sqrt();
    let mut errs = Vec::new();
    for n in [32, 64, 128] {
        let g = cheb(n);
        let u = g.sample(|x| (PI * x).sin());
        let r = fractional_norm(&u, 0.5, &g).unwrap();
        errs.push(((r.total - oracle) / oracle).abs());
    }
    assert!(errs[2] < 0.02, "{errs:?}");
    assert!(errs[2] < errs[0]);
}

fn admissible_fields() -> Vec<Box<dyn Fn(f64) -> f64>> {
    let d = |x: f64| 0.25 * (1.0 - x * x);
    vec![
        Box::new(move |x| d(x)),
        Box::new(move |x| d(x) * (PI * x).sin()),
        Box::new(move |x| d(x) * (PI * x).cos()),
        Box::new(move |x| d(x) * x.exp()),
        Box::new(move |x| d(x) * (1.0 + x * x * x)),
        Box::new(move |x| d(x) * d(x)),
        Box::new(move |x| (PI * x).sin()),
        Box::new(move |x| d(x) / (2.0 + x)),
        Box::new(move |x| d(x) * (2.0 * x).cosh()),
        Box::new(move |x| d(x) * (3.0 * x).sin() * x),
    ]
}

#[test]
fn hardy_ratio_is_refinement_stable() {
    for (i, u) in admissible_fields().iter().enumerate() {
        for k in [1, 2] {
            let st = hardy_refinement(u, k, 2.0, Family::Jacobi, &[32, 64, 128]).unwrap();
            assert_eq!(st.verdict, Verdict::Pass, "field {i}, k {k}: {st:?}");
        }
    }
}

#[test]
fn hardy_sine_times_weight_on_uniform_grids() {
    let u = |x: f64| 0.25 * (1.0 - x * x) * (PI * x).sin();
    let st = hardy_refinement(u, 1, 2.0, Family::Uniform, &[64, 128, 256]).unwrap();
    assert_eq!(st.verdict, Verdict::Pass, "{st:?}");
}

#[test]
fn hardy_constant_is_expected_failure() {
    let st = hardy_refinement(|_| 1.0, 1, 2.0, Family::Jacobi, &[16, 32, 64]).unwrap();
    assert_eq!(st.verdict, Verdict::ExpectedFail, "{st:?}");
    assert!(st.ratios.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn embedding_ratio_of_t5_is_stable() {
    let t5 = |x: f64| 16.0 * x.powi(5) - 20.0 * x.powi(3) + 5.0 * x;
    let st = embedding_refinement(t5, (2, 1, 3.0), 2.0, Family::Jacobi, &[16, 32, 64]).unwrap();
    assert_eq!(st.verdict, Verdict::Pass, "{st:?}");
    let g = cheb(16);
    let z = embedding_check(&vec![0.0; 17], 2, 1, 3.0, &g).unwrap();
    assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
}

#[test]
fn embedding_ratio_of_smooth_field_on_uniform_grids() {
    let f = |x: f64| (2.0 * x).sin() + 0.5;
    let st = embedding_refinement(f, (2, 1, 3.0), 2.0, Family::Uniform, &[64, 128, 256]).unwrap();
    assert_eq!(st.verdict, Verdict::Pass, "{st:?}");
}

#[test]
fn mollified_step_converges_and_obeys_log_bound() {
    let g = cheb(96);
    let u0 = g.sample(|x| (x / 0.15).tanh());
    let kappas: Vec<f64> = [3.0, 4.0, 5.0, 6.0]
        .iter()
        .map(|e: &f64| (-e).exp())
        .collect();
    let st = mollifier_growth(&u0, &kappas[..3], &g).unwrap();
    assert!(st.bounded(), "{st:?}");
    let st = mollifier_growth(&u0, &kappas, &g).unwrap();
    assert!(st.distances.windows(2).all(|w| w[1] < w[0]), "{st:?}");
}

#[test]
fn ball_weighted_norm_of_constant() {
    let b: WeightedGrid = BallGrid::new(8, 1.0).unwrap().into();
    let one = vec![1.0; b.len()];
    let v = weighted_norm(&one, &WeightedNormSpec::new(0, 1.0).unwrap(), &b).unwrap();
    // ∫_B ¼(1-r²) = π·(1/3 - 1/5) = 2π/15
    assert!((v * v - 2.0 * PI / 15.0).abs() < 1e-12);
    assert!(weighted_norm(&one, &WeightedNormSpec::new(1, 1.0).unwrap(), &b).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norms_are_homogeneous_and_subadditive(
        a in proptest::collection::vec(-1.0f64..1.0, 6),
        b in proptest::collection::vec(-1.0f64..1.0, 6),
        lambda in -4.0f64..4.0,
        k in 0usize..4,
        s in 0.0f64..4.0,
    ) {
        let g = cheb(24);
        let field = |c: &[f64]| g.sample(|x| c.iter().enumerate().map(|(j, cj)| cj * (j as f64 * x).cos()).sum());
        let (fa, fb) = (field(&a), field(&b));
        let wg: WeightedGrid = g.clone().into();
        let spec = WeightedNormSpec::new(k, s).unwrap();
        let na = weighted_norm(&fa, &spec, &wg).unwrap();
        let nb = weighted_norm(&fb, &spec, &wg).unwrap();
        let sum: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| x + y).collect();
        let ns = weighted_norm(&sum, &spec, &wg).unwrap();
        prop_assert!(ns <= (na + nb) * (1.0 + 1e-10) + 1e-14);
        let scaled: Vec<f64> = fa.iter().map(|x| lambda * x).collect();
        let nl = weighted_norm(&scaled, &spec, &wg).unwrap();
        prop_assert!((nl - lambda.abs() * na).abs() <= 1e-10 * nl.max(1e-300) + 1e-14);
    }

    #[test]
    fn distance_identities_for_any_gamma(gamma in 1.01f64..8.0, n in 4usize..40) {
        let g = Grid1d::chebyshev(n, gamma).unwrap();
        let r = vacuumlab::weights::distance_identities(&g);
        prop_assert!(r.slope_excess <= 1e-14 && r.curvature_deviation <= 1e-14 && r.cancellation <= 1e-14);
    }
}
