//! Affine expanding motions: the matrix ODE `A'' = det(A)^{1-γ} A^{-T}`, its isotropic
//! reduction `α'' = α^{-dγ+(d-1)}`, and extraction of the large-time profile
//! `A(t) ≈ A₁ t + A₀`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_log_model, fit_power_law};
use crate::linalg::Mat3;
use crate::ode::{rk4_step, Dopri5, OdeSystem, Rk4Work};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineState<T> {
    pub a: Mat3<T>,
    pub adot: Mat3<T>,
    pub gamma: T,
    pub t: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarAffineState<T> {
    pub alpha: T,
    pub alphadot: T,
    pub gamma: T,
    pub dim: u8,
    pub t: T,
}

impl<T: Real> AffineState<T> {
    pub fn new(a: Mat3<T>, adot: Mat3<T>, gamma: T) -> Result<Self> {
        if !(gamma > T::one()) {
            return Err(Error::Domain(format!("gamma must exceed 1, got {gamma}")));
        }
        let s = Self {
            a,
            adot,
            gamma,
            t: T::zero(),
        };
        s.check_det()?;
        Ok(s)
    }

    pub fn det(&self) -> T {
        self.a.det()
    }

    fn check_det(&self) -> Result<()> {
        let det = self.a.det();
        let threshold = T::epsilon() * self.a.max_abs().powi(3).max(T::one());
        if !(det > threshold) {
            return Err(Error::Singular {
                det: det.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

impl<T: Real> ScalarAffineState<T> {
    pub fn new(alpha: T, alphadot: T, gamma: T, dim: u8) -> Result<Self> {
        if !(gamma > T::one()) {
            return Err(Error::Domain(format!("gamma must exceed 1, got {gamma}")));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::Domain(format!(
                "dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if !(alpha > T::zero()) {
            return Err(Error::Domain(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            alphadot,
            gamma,
            dim,
            t: T::zero(),
        })
    }

    /// Exponent `-dγ + (d-1)` of the isotropic equation.
    pub fn exponent(&self) -> T {
        let d = T::from_u8(self.dim).unwrap_or_else(T::one);
        -d * self.gamma + d - T::one()
    }
}

/// `det(A)^{1-γ} A^{-T}`.
pub fn affine_rhs<T: Real>(state: &AffineState<T>) -> Result<Mat3<T>> {
    state.check_det()?;
    let det = state.a.det();
    let inv_t = state.a.inverse_transpose()?;
    Ok(inv_t.scale(det.powf(T::one() - state.gamma)))
}

/// `α^{-dγ+(d-1)}`.
pub fn scalar_rhs<T: Real>(state: &ScalarAffineState<T>) -> Result<T> {
    if !(state.alpha > T::zero()) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {}",
            state.alpha
        )));
    }
    Ok(state.alpha.powf(state.exponent()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Integrator {
    /// Dormand–Prince 5(4) with the given tolerances; output every `dt`.
    Adaptive { rtol: f64, atol: f64 },
    /// Classical RK4 with step `dt`.
    FixedRk4,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Adaptive {
            rtol: 1e-12,
            atol: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn last(&self) -> Option<&S> {
        self.states.last()
    }
    pub fn len(&self) -> usize {
        self.states.len()
    }
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Anything that can seed [`integrate_affine`].
pub trait AffinePhase<T: Real>: Sized + Copy {
    fn time(&self) -> T;
    fn pack(&self) -> Vec<T>;
    fn unpack(&self, t: T, y: &[T]) -> Self;
    fn rhs(&self, y: &[T], dy: &mut [T]);
    fn validate(&self, t: T, y: &[T]) -> Result<()>;
}

impl<T: Real> AffinePhase<T> for AffineState<T> {
    fn time(&self) -> T {
        self.t
    }
    fn pack(&self) -> Vec<T> {
        let mut y = self.a.to_row_major().to_vec();
        y.extend_from_slice(&self.adot.to_row_major());
        y
    }
    fn unpack(&self, t: T, y: &[T]) -> Self {
        Self {
            a: Mat3::from_row_major(&y[..9]),
            adot: Mat3::from_row_major(&y[9..18]),
            gamma: self.gamma,
            t,
        }
    }
    fn rhs(&self, y: &[T], dy: &mut [T]) {
        let a = Mat3::from_row_major(&y[..9]);
        dy[..9].copy_from_slice(&y[9..18]);
        let det = a.det();
        // Non-positive determinants are caught by `validate`; NaN propagates a rejection.
        let acc = match a.inverse_transpose() {
            Ok(inv) if det > T::zero() => inv.scale(det.powf(T::one() - self.gamma)).to_row_major(),
            _ => [T::nan(); 9],
        };
        dy[9..18].copy_from_slice(&acc);
    }
    fn validate(&self, t: T, y: &[T]) -> Result<()> {
        let a = Mat3::from_row_major(&y[..9]);
        let det = a.det();
        if !(det > T::zero()) || !det.is_finite() {
            return Err(Error::StepFailure {
                t: t.to_f64_lossy(),
                reason: format!("det A = {det} left GL+ (collapse)"),
            });
        }
        Ok(())
    }
}

impl<T: Real> AffinePhase<T> for ScalarAffineState<T> {
    fn time(&self) -> T {
        self.t
    }
    fn pack(&self) -> Vec<T> {
        vec![self.alpha, self.alphadot]
    }
    fn unpack(&self, t: T, y: &[T]) -> Self {
        Self {
            alpha: y[0],
            alphadot: y[1],
            t,
            ..*self
        }
    }
    fn rhs(&self, y: &[T], dy: &mut [T]) {
        dy[0] = y[1];
        dy[1] = if y[0] > T::zero() {
            y[0].powf(self.exponent())
        } else {
            T::nan()
        };
    }
    fn validate(&self, t: T, y: &[T]) -> Result<()> {
        if !(y[0] > T::zero()) || !y[0].is_finite() {
            return Err(Error::StepFailure {
                t: t.to_f64_lossy(),
                reason: format!("alpha = {} is not positive", y[0]),
            });
        }
        Ok(())
    }
}

struct PhaseSystem<'a, P> {
    seed: &'a P,
    n: usize,
}

impl<T: Real, P: AffinePhase<T>> OdeSystem<T> for PhaseSystem<'_, P> {
    fn dim(&self) -> usize {
        self.n
    }
    fn rhs(&self, _t: T, y: &[T], dy: &mut [T]) {
        self.seed.rhs(y, dy)
    }
}

/// Integrates from `initial.time()` to `t_end` (forward or backward), recording a state
/// every `dt`. Every accepted internal step is checked for positivity of `det A` (resp. `α`).
pub fn integrate_affine<T: Real, P: AffinePhase<T>>(
    initial: &P,
    t_end: T,
    dt: T,
    integrator: Integrator,
) -> Result<Trajectory<P>> {
    if !(dt > T::zero()) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let t0 = initial.time();
    if t_end == t0 {
        return Err(Error::Domain("empty integration interval".into()));
    }
    let mut y = initial.pack();
    initial.validate(t0, &y)?;
    let sys = PhaseSystem {
        seed: initial,
        n: y.len(),
    };
    let span = (t_end - t0).abs();
    let n_out = (span / dt).ceil().to_usize().unwrap_or(1).max(1);
    let dir = if t_end > t0 { T::one() } else { -T::one() };
    let mut states = Vec::with_capacity(n_out + 1);
    states.push(initial.unpack(t0, &y));
    match integrator {
        Integrator::Adaptive { rtol, atol } => {
            let solver = Dopri5::with_tolerances(T::lit(rtol), T::lit(atol));
            let mut h = dt.min(T::lit(1e-2));
            let mut t = t0;
            for k in 1..=n_out {
                let target = if k == n_out {
                    t_end
                } else {
                    t0 + dir * dt * T::from_usize_lossy(k)
                };
                solver.integrate(&sys, t, &mut y, target, &mut h, |ts, ys| {
                    initial.validate(ts, ys)
                })?;
                t = target;
                states.push(initial.unpack(t, &y));
            }
        }
        Integrator::FixedRk4 => {
            let mut w = Rk4Work::new(y.len());
            let mut t = t0;
            for k in 1..=n_out {
                let target = if k == n_out {
                    t_end
                } else {
                    t0 + dir * dt * T::from_usize_lossy(k)
                };
                rk4_step(&sys, t, &mut y, target - t, &mut w);
                t = target;
                initial.validate(t, &y)?;
                states.push(initial.unpack(t, &y));
            }
        }
    }
    Ok(Trajectory { states })
}

/// Least-squares slope of `log det A` against `log t` on the samples with `t ∈ [t_lo, t_hi]`.
pub fn det_growth_exponent<T: Real>(
    traj: &Trajectory<AffineState<T>>,
    t_lo: f64,
    t_hi: f64,
) -> Option<f64> {
    let (t, d): (Vec<f64>, Vec<f64>) = traj
        .states
        .iter()
        .map(|s| (s.t.to_f64_lossy(), s.a.det().to_f64_lossy()))
        .filter(|(t, _)| *t >= t_lo && *t <= t_hi)
        .unzip();
    fit_power_law(&t, &d).map(|f| f.slope)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RateModel {
    PowerLaw,
    Logarithmic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub quantity: String,
    pub model: RateModel,
    pub fitted: f64,
    /// `None` for the logarithmic model, which has no exponent.
    pub predicted: Option<f64>,
    pub rss_power: f64,
    pub rss_log: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticProfile {
    pub gamma: f64,
    pub a1: Mat3<f64>,
    pub a0: Option<Mat3<f64>>,
    pub fitted_det_exponent: f64,
    pub tail_estimate: f64,
    pub residual_rates: Vec<RateFit>,
    pub a1_spd: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionOptions {
    /// Largest admissible norm of the estimated tail `∫_T^∞ A''`.
    pub tail_tolerance: f64,
    /// Fits use samples in `[fit_window_start·T, T]`.
    pub fit_window_start: f64,
    pub spd_tolerance: f64,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        Self {
            tail_tolerance: 1e-2,
            fit_window_start: 0.1,
            spd_tolerance: 1e-8,
        }
    }
}

/// Extracts `A₁ = A'(T) + ∫_T^∞ A''` and, when the remainder is integrable twice, `A₀`.
///
/// The tail is bounded through the measured growth `det A ~ t^p`: with
/// `|A''(t)| ~ c t^{-q}`, `q = γp - 2`, the tail of `A''` is `|A''(T)| T/(q-1)` and the
/// tail of `(τ - T) A''` is `|A''(T)| T²/((q-1)(q-2))`.
pub fn extract_asymptotics<T: Real>(
    traj: &Trajectory<AffineState<T>>,
    opts: &ExtractionOptions,
) -> Result<AsymptoticProfile> {
    let last = traj
        .last()
        .ok_or_else(|| Error::Domain("empty trajectory".into()))?
        .clone();
    let t_end = last.t.to_f64_lossy();
    if !(t_end > 0.0) {
        return Err(Error::Domain("trajectory must end at positive time".into()));
    }
    let gamma = last.gamma.to_f64_lossy();
    let t_lo = opts.fit_window_start * t_end;
    let states: Vec<(f64, Mat3<f64>, Mat3<f64>)> = traj
        .states
        .iter()
        .map(|s| (s.t.to_f64_lossy(), s.a.cast::<f64>(), s.adot.cast::<f64>()))
        .collect();
    let window: Vec<&(f64, Mat3<f64>, Mat3<f64>)> =
        states.iter().filter(|s| s.0 >= t_lo && s.0 > 0.0).collect();
    if window.len() < 8 {
        return Err(Error::InsufficientHorizon {
            tail: f64::INFINITY,
            tol: opts.tail_tolerance,
        });
    }
    let (wt, wd): (Vec<f64>, Vec<f64>) = window.iter().map(|s| (s.0, s.1.det())).unzip();
    let p = fit_power_law(&wt, &wd).map(|f| f.slope).unwrap_or(f64::NAN);

    let a_end = last.a.cast::<f64>();
    let adot_end = last.adot.cast::<f64>();
    let acc = affine_rhs(&AffineState {
        a: a_end,
        adot: adot_end,
        gamma,
        t: t_end,
    })?;
    let q = gamma * p - 2.0;
    if !(q > 1.0) {
        return Err(Error::InsufficientHorizon {
            tail: f64::INFINITY,
            tol: opts.tail_tolerance,
        });
    }
    let tail = acc.scale(t_end / (q - 1.0));
    let tail_norm = tail.norm_fro();
    if tail_norm > opts.tail_tolerance {
        return Err(Error::InsufficientHorizon {
            tail: tail_norm,
            tol: opts.tail_tolerance,
        });
    }
    let a1 = adot_end + tail;
    // det A ~ t³ for every γ > 1, so the offset exists exactly when 3γ - 4 > 0
    let a0 = if 3.0 * gamma - 4.0 > 1e-9 && q > 2.0 {
        let remainder = acc.scale(t_end * t_end / ((q - 1.0) * (q - 2.0)));
        Some(a_end - a1.scale(t_end) - remainder)
    } else {
        None
    };

    let mut warnings = Vec::new();
    let ev = a1.symmetric_eigenvalues();
    let a1_spd = ev[0] > opts.spd_tolerance;
    if !a1_spd {
        warnings.push(format!(
            "symmetrised A1 is not positive definite: eigenvalues {ev:?}"
        ));
    }

    let mut rates = Vec::new();
    let vel: Vec<f64> = window.iter().map(|s| (s.2 - a1).norm_fro()).collect();
    if let Some(f) = fit_power_law(&wt, &vel) {
        rates.push(RateFit {
            quantity: "|A'(t) - A1|".into(),
            model: RateModel::PowerLaw,
            fitted: f.slope,
            predicted: Some(-3.0 * gamma + 3.0),
            rss_power: f.rss,
            rss_log: None,
        });
    }
    match a0 {
        Some(a0m) => {
            let pos: Vec<f64> = window
                .iter()
                .map(|s| (s.1 - a1.scale(s.0) - a0m).norm_fro())
                .collect();
            if let Some(f) = fit_power_law(&wt, &pos) {
                rates.push(RateFit {
                    quantity: "|A(t) - (A1 t + A0)|".into(),
                    model: RateModel::PowerLaw,
                    fitted: f.slope,
                    predicted: Some(-3.0 * gamma + 4.0),
                    rss_power: f.rss,
                    rss_log: None,
                });
            }
        }
        None => {
            let pos: Vec<f64> = window
                .iter()
                .map(|s| (s.1 - a1.scale(s.0)).norm_fro())
                .collect();
            if let (Some(pw), Some(lg)) = (fit_power_law(&wt, &pos), fit_log_model(&wt, &pos)) {
                let log_wins = lg.rss < pw.rss;
                rates.push(RateFit {
                    quantity: "|A(t) - A1 t|".into(),
                    model: if log_wins {
                        RateModel::Logarithmic
                    } else {
                        RateModel::PowerLaw
                    },
                    fitted: if log_wins { lg.slope } else { pw.slope },
                    predicted: if log_wins {
                        None
                    } else {
                        Some(-3.0 * gamma + 4.0)
                    },
                    rss_power: pw.rss,
                    rss_log: Some(lg.rss),
                });
            }
        }
    }

    Ok(AsymptoticProfile {
        gamma,
        a1,
        a0,
        fitted_det_exponent: p,
        tail_estimate: tail_norm,
        residual_rates: rates,
        a1_spd,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingOptions {
    /// Bound on `|A''(T_start)|·T_start`.
    pub start_tolerance: f64,
    /// Allowed mismatch at `t = 0` between shots from `T_start` and `2 T_start`.
    pub roundtrip_tolerance: f64,
    pub integrator: Integrator,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            start_tolerance: 1e-3,
            roundtrip_tolerance: 1e-6,
            integrator: Integrator::Adaptive {
                rtol: 1e-13,
                atol: 1e-14,
            },
        }
    }
}

fn shoot_once(
    a1: &Mat3<f64>,
    a0: &Mat3<f64>,
    gamma: f64,
    t_start: f64,
    integrator: Integrator,
) -> Result<AffineState<f64>> {
    let a_lin = a1.scale(t_start) + *a0;
    let acc = affine_rhs(&AffineState {
        a: a_lin,
        adot: *a1,
        gamma,
        t: t_start,
    })?;
    // leading corrections of the asymptotic expansion, q = 3γ - 2
    let q = 3.0 * gamma - 2.0;
    let a = a_lin + acc.scale(t_start * t_start / ((q - 1.0) * (q - 2.0)));
    let adot = *a1 - acc.scale(t_start / (q - 1.0));
    let seed = AffineState {
        a,
        adot,
        gamma,
        t: t_start,
    };
    let traj = integrate_affine(&seed, 0.0, t_start, integrator)?;
    let mut s = *traj.last().expect("non-empty trajectory");
    s.t = 0.0;
    Ok(s)
}

/// Recovers the data at `t = 0` of the unique solution with `A(t) ≈ A₁t + A₀` (γ ≥ 2)
/// by backward integration from `T_start`.
pub fn shoot_prescribed_asymptotics(
    a1: &Mat3<f64>,
    a0: &Mat3<f64>,
    gamma: f64,
    t_start: f64,
    opts: &ShootingOptions,
) -> Result<AffineState<f64>> {
    if gamma < 2.0 {
        return Err(Error::Domain(format!(
            "prescribed asymptotics require gamma >= 2, got {gamma}"
        )));
    }
    let ev = a1.symmetric_eigenvalues();
    if !(ev[0] > 0.0) || (*a1 - a1.transpose()).max_abs() > 1e-12 * a1.max_abs() {
        return Err(Error::Domain(format!(
            "A1 must be symmetric positive definite, eigenvalues {ev:?}"
        )));
    }
    let a_lin = a1.scale(t_start) + *a0;
    let acc = affine_rhs(&AffineState {
        a: a_lin,
        adot: *a1,
        gamma,
        t: t_start,
    })?;
    let start_defect = acc.norm_fro() * t_start;
    if start_defect > opts.start_tolerance {
        return Err(Error::Precondition(format!(
            "|A''(T_start)| T_start = {start_defect:e} exceeds {:e}; increase T_start",
            opts.start_tolerance
        )));
    }
    let s1 = shoot_once(a1, a0, gamma, t_start, opts.integrator)?;
    let s2 = shoot_once(a1, a0, gamma, 2.0 * t_start, opts.integrator)?;
    let mismatch = (s1.a - s2.a).max_abs().max((s1.adot - s2.adot).max_abs());
    if mismatch > opts.roundtrip_tolerance {
        return Err(Error::NonConvergence(format!(
            "shots from T = {t_start} and {} disagree by {mismatch:e} at t = 0",
            2.0 * t_start
        )));
    }
    Ok(s2)
}

/// Isotropic profile `α(t)` with the running integral `β_p(t) = ∫₀ᵗ α^{-p}`, tabulated by RK4
/// and evaluated by cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct AlphaHistory {
    pub seed: ScalarAffineState<f64>,
    pub power: f64,
    pub h: f64,
    samples: Vec<[f64; 3]>,
}

impl AlphaHistory {
    pub fn new(seed: ScalarAffineState<f64>, power: f64, t_end: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && t_end >= 0.0) {
            return Err(Error::Domain(
                "AlphaHistory needs h > 0 and t_end >= 0".into(),
            ));
        }
        let n = (t_end / h).ceil() as usize + 2;
        let expo = seed.exponent();
        let sys = (3usize, move |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = y[0].powf(expo);
            dy[2] = y[0].powf(-power);
        });
        let mut y = [seed.alpha, seed.alphadot, 0.0];
        let mut w = Rk4Work::new(3);
        let mut samples = Vec::with_capacity(n + 1);
        samples.push(y);
        for i in 0..n {
            rk4_step(&sys, i as f64 * h, &mut y, h, &mut w);
            if !(y[0] > 0.0) {
                return Err(Error::StepFailure {
                    t: (i + 1) as f64 * h,
                    reason: "alpha collapsed".into(),
                });
            }
            samples.push(y);
        }
        Ok(Self {
            seed,
            power,
            h,
            samples,
        })
    }

    /// `(α, α', β_p)` at time `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let s = (t / self.h).max(0.0);
        let i = (s.floor() as usize).min(self.samples.len() - 2);
        let u = s - i as f64;
        let h = self.h;
        let expo = self.seed.exponent();
        let y0 = self.samples[i];
        let y1 = self.samples[i + 1];
        let d0 = [y0[1], y0[0].powf(expo), y0[0].powf(-self.power)];
        let d1 = [y1[1], y1[0].powf(expo), y1[0].powf(-self.power)];
        let h00 = 2.0 * u * u * u - 3.0 * u * u + 1.0;
        let h10 = u * u * u - 2.0 * u * u + u;
        let h01 = -2.0 * u * u * u + 3.0 * u * u;
        let h11 = u * u * u - u * u;
        let herm = |k: usize| h00 * y0[k] + h10 * h * d0[k] + h01 * y1[k] + h11 * h * d1[k];
        (herm(0), herm(1), herm(2))
    }
}

/// Trapezoid approximation of `∫ α^{-(1+δ)}` over a scalar trajectory.
pub fn inverse_power_integral<T: Real>(traj: &Trajectory<ScalarAffineState<T>>, delta: f64) -> f64 {
    traj.states
        .windows(2)
        .map(|w| {
            let f0 = w[0].alpha.to_f64_lossy().powf(-(1.0 + delta));
            let f1 = w[1].alpha.to_f64_lossy().powf(-(1.0 + delta));
            0.5 * (f0 + f1) * (w[1].t - w[0].t).to_f64_lossy()
        })
        .sum()
}

/// General affine motion `A(t) = α(t) Λ` with `Λ = diag(S)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralAffineSpec<T> {
    pub s: [T; 3],
    pub alpha_state: ScalarAffineState<T>,
}

impl<T: Real> GeneralAffineSpec<T> {
    pub fn new(s: [T; 3], alpha_state: ScalarAffineState<T>) -> Result<Self> {
        if s.iter().any(|x| !(*x > T::zero())) {
            return Err(Error::Domain("stretch factors S_i must be positive".into()));
        }
        Ok(Self { s, alpha_state })
    }
    pub fn lambda(&self) -> Mat3<T> {
        Mat3::from_diag(self.s)
    }
    /// `M = Λ²`
    pub fn m(&self) -> Mat3<T> {
        let l = self.lambda();
        l * l
    }
    /// `M²`
    pub fn m_squared(&self) -> Mat3<T> {
        let m = self.m();
        m * m
    }
    /// `M³`
    pub fn m_cubed(&self) -> Mat3<T> {
        self.m_squared() * self.m()
    }
}

/// CSV with columns `t, A[ij] (row-major), Adot[ij], detA`.
pub fn trajectory_csv<T: Real>(traj: &Trajectory<AffineState<T>>) -> String {
    let mut out = String::from("t");
    for name in ["A", "Adot"] {
        for i in 0..3 {
            for j in 0..3 {
                let _ = write!(out, ",{name}{i}{j}");
            }
        }
    }
    out.push_str(",detA\n");
    for s in &traj.states {
        let _ = write!(out, "{}", s.t.to_f64_lossy());
        for v in
            s.a.to_row_major()
                .iter()
                .chain(s.adot.to_row_major().iter())
        {
            let _ = write!(out, ",{}", v.to_f64_lossy());
        }
        let _ = writeln!(out, ",{}", s.a.det().to_f64_lossy());
    }
    out
}
