use vacuumlab::affine::*;
use vacuumlab::{Error, Mat3};

fn forward(gamma: f64, adot: Mat3<f64>, t_end: f64, dt: f64) -> Trajectory<AffineState<f64>> {
    let s = AffineState::new(Mat3::identity(), adot, gamma).unwrap();
    integrate_affine(&s, t_end, dt, Integrator::default()).unwrap()
}

#[test]
fn det_grows_cubically() {
    for gamma in [1.2, 1.5] {
        let traj = forward(gamma, Mat3::identity(), 1000.0, 0.5);
        let p = det_growth_exponent(&traj, 10.0, 1000.0).unwrap();
        assert!((p - 3.0).abs() <= 0.05, "gamma {gamma}: slope {p}");
    }
}

#[test]
fn velocity_is_cauchy_for_gamma_two() {
    let traj = forward(2.0, Mat3::zeros(), 400.0, 1.0);
    let at = |t: f64| traj.states.iter().find(|s| (s.t - t).abs() < 1e-9).unwrap();
    let d1 = (at(100.0).adot - at(200.0).adot).norm_fro();
    let d2 = (at(200.0).adot - at(400.0).adot).norm_fro();
    assert!(d2 < 0.5 * d1, "{d1} {d2}");
    let acc = |t: f64| affine_rhs(at(t)).unwrap().norm_fro();
    assert!(acc(400.0) < acc(100.0));
}

#[test]
fn scalar_profile_is_asymptotically_linear() {
    let s = ScalarAffineState::<f64>::new(1.0, 0.0, 2.0, 1).unwrap();
    let traj = integrate_affine(&s, 100.0, 0.5, Integrator::default()).unwrap();
    let last = traj.last().unwrap();
    // α'² = 2(1 - 1/α): the limit speed is √2, so α(T)/T settles near 1.3
    let ratio = last.alpha / last.t;
    assert!(ratio > 1.0 && ratio < 1.5, "ratio {ratio}");
    let limit = (2.0 * (1.0 - 1.0 / last.alpha)).sqrt();
    assert!((last.alphadot - limit).abs() < 1e-9);
}

#[test]
fn velocity_limit_rate_gamma_three_halves() {
    let traj = forward(1.5, Mat3::identity(), 1.0e4, 2.0);
    let prof = extract_asymptotics(&traj, &ExtractionOptions::default()).unwrap();
    let r = &prof.residual_rates[0];
    assert!((r.fitted - (-1.5)).abs() <= 0.15, "{r:?}");
    assert!(prof.a1_spd);
}

#[test]
fn logarithmic_boundary_case() {
    let traj = forward(4.0 / 3.0, Mat3::identity(), 1.0e4, 2.0);
    let prof = extract_asymptotics(&traj, &ExtractionOptions::default()).unwrap();
    assert!(prof.a0.is_none());
    let pos = prof
        .residual_rates
        .iter()
        .find(|r| r.quantity.contains("A1 t|"))
        .unwrap();
    assert_eq!(pos.model, RateModel::Logarithmic, "{pos:?}");
    assert!(pos.rss_log.unwrap() < pos.rss_power);
}

#[test]
fn isotropic_limit_is_scalar_multiple_of_identity() {
    let traj = forward(2.0, Mat3::identity(), 2000.0, 1.0);
    let prof = extract_asymptotics(&traj, &ExtractionOptions::default()).unwrap();
    let s = ScalarAffineState::new(1.0, 1.0, 2.0, 3).unwrap();
    let st = integrate_affine(&s, 2000.0, 2000.0, Integrator::default()).unwrap();
    // energy: α'²/2 + α^{-3}/3 is conserved
    let limit = (1.0f64 + 2.0 / 3.0).sqrt();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert!(prof.a1.m[i][j].abs() < 1e-10);
            }
        }
        assert!(
            (prof.a1.m[i][i] - limit).abs() < 1e-6,
            "{} vs {limit}",
            prof.a1.m[i][i]
        );
    }
    assert!(st.last().unwrap().alphadot < limit);
}

#[test]
fn short_horizon_is_rejected() {
    let traj = forward(1.5, Mat3::identity(), 20.0, 0.5);
    let opts = ExtractionOptions {
        tail_tolerance: 1e-4,
        ..Default::default()
    };
    assert!(matches!(
        extract_asymptotics(&traj, &opts),
        Err(Error::InsufficientHorizon { .. })
    ));
}

fn roundtrip(a1: Mat3<f64>, a0: Mat3<f64>, gamma: f64) -> (AffineState<f64>, AsymptoticProfile) {
    let init =
        shoot_prescribed_asymptotics(&a1, &a0, gamma, 2000.0, &ShootingOptions::default()).unwrap();
    let traj = integrate_affine(
        &init,
        4000.0,
        2.0,
        Integrator::Adaptive {
            rtol: 1e-13,
            atol: 1e-14,
        },
    )
    .unwrap();
    let prof = extract_asymptotics(&traj, &ExtractionOptions::default()).unwrap();
    (init, prof)
}

#[test]
fn shooting_recovers_prescribed_asymptotes() {
    let a1 = Mat3::identity();
    let (_, prof) = roundtrip(a1, Mat3::zeros(), 2.0);
    let err = (prof.a1 - a1).max_abs().max(prof.a0.unwrap().max_abs());
    assert!(err < 1e-3, "err {err}");
    let pos = prof
        .residual_rates
        .iter()
        .find(|r| r.quantity.contains("A0"))
        .unwrap();
    assert!((pos.fitted + 2.0).abs() < 0.2, "{pos:?}");

    let (_, prof) = roundtrip(Mat3::identity(), Mat3::identity(), 3.0);
    assert!((prof.a0.unwrap() - Mat3::identity()).max_abs() < 1e-3);
    assert!((prof.a1 - Mat3::identity()).max_abs() < 1e-3);
}

#[test]
fn shooting_preserves_diagonal_structure() {
    let a1 = Mat3::from_diag([1.0, 2.0, 3.0]);
    let (init, prof) = roundtrip(a1, Mat3::zeros(), 2.0);
    assert!(init.a.is_diagonal(1e-14) && init.adot.is_diagonal(1e-14));
    assert!(prof.a1.is_diagonal(1e-12));
    assert!((prof.a1 - a1).max_abs() < 1e-3);
}

#[test]
fn shooting_preconditions() {
    let opts = ShootingOptions::default();
    assert!(
        shoot_prescribed_asymptotics(&Mat3::identity(), &Mat3::zeros(), 1.5, 1000.0, &opts)
            .is_err()
    );
    let bad = Mat3::from_diag([1.0, -1.0, 1.0]);
    assert!(shoot_prescribed_asymptotics(&bad, &Mat3::zeros(), 2.0, 1000.0, &opts).is_err());
    assert!(matches!(
        shoot_prescribed_asymptotics(&Mat3::identity(), &Mat3::zeros(), 2.0, 2.0, &opts),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn profile_serialises_to_json() {
    let traj = forward(2.0, Mat3::identity(), 500.0, 1.0);
    let prof = extract_asymptotics(&traj, &ExtractionOptions::default()).unwrap();
    let json = serde_json::to_string(&prof).unwrap();
    let back: AsymptoticProfile = serde_json::from_str(&json).unwrap();
    assert_eq!(back, prof);
}
