//! Curl transport along flows with `∂_t(α² Λ² v)` a Lagrangian gradient.
//!
//! The test flows are `η^i = x^i + ε β(t) U^i / S_i²` with `β = ∫₀ᵗ α^{-2}`, so `α² S_i² v^i = ε U^i`
//! is frozen and both the differential and the integrated curl laws hold exactly. Residuals
//! then measure only the time discretisation: `v` by second-order differences of `η`, the
//! time integrals by the cumulative trapezoid rule.

use serde::{Deserialize, Serialize};

use super::field::Field3;
use super::identities::IdentityOutcome;
use super::NodeGeometry;
use crate::affine::{AlphaHistory, GeneralAffineSpec, ScalarAffineState};
use crate::error::{Error, Result};
use crate::fit::observed_order;
use crate::linalg::{Mat3, Vec3};
use crate::report::{CheckReport, Verdict};

/// Residual time series of one curl check; each entry is the max over sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurlTransportReport {
    pub dt: f64,
    pub times: Vec<f64>,
    /// `α² curl_η v - curl u₀ - ∫ α² Q`
    pub transport: Vec<f64>,
    /// `curl δη - β curl u₀ - ∫ α^{-2} ∫ α² Q - ∫ (middle term)`
    pub integrated: Vec<f64>,
    /// Same with the middle term entering with the opposite sign.
    pub integrated_flipped: Vec<f64>,
}

impl CurlTransportReport {
    pub fn max_transport(&self) -> f64 {
        self.transport.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_integrated(&self) -> f64 {
        self.integrated.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_flipped(&self) -> f64 {
        self.integrated_flipped.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.max_transport().max(self.max_integrated())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralCurlReport {
    pub s: [f64; 3],
    /// Zero-based component.
    pub component: usize,
    pub residuals: CurlTransportReport,
}

fn pq(c: usize) -> (usize, usize) {
    ((c + 1) % 3, (c + 2) % 3)
}

/// `[curl_η (S² W)]^c` from `h[r][k] = W^k,_r`.
fn weighted_curl_eta(a: &Mat3<f64>, h: &Mat3<f64>, s2: &[f64; 3]) -> Vec3<f64> {
    [0, 1, 2].map(|c| {
        let (p, q) = pq(c);
        (0..3)
            .map(|r| s2[q] * a[(r, p)] * h[(r, q)] - s2[p] * a[(r, q)] * h[(r, p)])
            .sum()
    })
}

/// `ε_{cjk} ∂_t A^r_j S_k² v^k,_r` with `∂_t A^r_j = -A^r_l v^l,_m A^m_j`.
fn quadratic_term(a: &Mat3<f64>, hv: &Mat3<f64>, s2: &[f64; 3]) -> Vec3<f64> {
    [0, 1, 2].map(|c| {
        let (p, q) = pq(c);
        let mut s = 0.0;
        for r in 0..3 {
            for j in 0..3 {
                let f = s2[p] * hv[(r, p)] * a[(j, q)] - s2[q] * hv[(r, q)] * a[(j, p)];
                for l in 0..3 {
                    s += f * hv[(j, l)] * a[(r, l)];
                }
            }
        }
        s
    })
}

/// `S_p² v^p,_r (A^r_q - δ^r_q) - S_q² v^q,_r (A^r_p - δ^r_p)`
fn middle_term(a: &Mat3<f64>, hv: &Mat3<f64>, s2: &[f64; 3]) -> Vec3<f64> {
    let d = *a - Mat3::identity();
    [0, 1, 2].map(|c| {
        let (p, q) = pq(c);
        (0..3)
            .map(|r| s2[p] * hv[(r, p)] * d[(r, q)] - s2[q] * hv[(r, q)] * d[(r, p)])
            .sum()
    })
}

fn cumulative_trapezoid(f: &[Vec3<f64>], dt: f64) -> Vec<Vec3<f64>> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = [0.0; 3];
    out.push(acc);
    for w in f.windows(2) {
        for i in 0..3 {
            acc[i] += 0.5 * dt * (w[0][i] + w[1][i]);
        }
        out.push(acc);
    }
    out
}

fn max_diff(a: &Vec3<f64>, b: &Vec3<f64>) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}

fn residual_series(
    u: &dyn Field3,
    eps: f64,
    s: [f64; 3],
    seed: ScalarAffineState<f64>,
    points: &[Vec3<f64>],
    t_end: f64,
    dt: f64,
    component: Option<usize>,
) -> Result<CurlTransportReport> {
    if (seed.alpha - 1.0).abs() > 1e-14 {
        return Err(Error::Precondition(format!(
            "curl transport flows start from alpha = 1, got {}",
            seed.alpha
        )));
    }
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(Error::Domain(
            "curl transport needs dt > 0 and t_end > 0".into(),
        ));
    }
    let n = ((t_end / dt).round() as usize).max(2);
    let history = AlphaHistory::new(seed, 2.0, n as f64 * dt + dt, (dt / 16.0).min(1e-3))?;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let samples: Vec<(f64, f64, f64)> = times.iter().map(|&t| history.eval(t)).collect();
    let beta: Vec<f64> = samples.iter().map(|s| s.2).collect();
    let beta_dot: Vec<f64> = (0..=n)
        .map(|i| {
            if i == 0 {
                (-3.0 * beta[0] + 4.0 * beta[1] - beta[2]) / (2.0 * dt)
            } else if i == n {
                (3.0 * beta[n] - 4.0 * beta[n - 1] + beta[n - 2]) / (2.0 * dt)
            } else {
                (beta[i + 1] - beta[i - 1]) / (2.0 * dt)
            }
        })
        .collect();
    let s2 = [s[0] * s[0], s[1] * s[1], s[2] * s[2]];
    let pick = |r: &Vec3<f64>, o: &Vec3<f64>| match component {
        Some(c) => (r[c] - o[c]).abs(),
        None => max_diff(r, o),
    };

    let mut transport = vec![0.0f64; n + 1];
    let mut integrated = vec![0.0f64; n + 1];
    let mut flipped = vec![0.0f64; n + 1];
    for x in points {
        let gu = u.gradient(x);
        let hu = Mat3::from_fn(|k, i| eps * gu[(k, i)] / s2[i]);
        let curl_u0 = weighted_curl_eta(&Mat3::identity(), &hu, &s2);
        let mut lhs_transport = Vec::with_capacity(n + 1);
        let mut quad = Vec::with_capacity(n + 1);
        let mut middle = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let alpha2 = samples[i].0 * samples[i].0;
            let geo = NodeGeometry::new(Mat3::identity() + hu.scale(beta[i]))?;
            let hv = hu.scale(beta_dot[i]);
            let c = weighted_curl_eta(&geo.inv, &hv, &s2);
            lhs_transport.push(c.map(|v| alpha2 * v));
            quad.push(quadratic_term(&geo.inv, &hv, &s2).map(|v| alpha2 * v));
            middle.push(middle_term(&geo.inv, &hv, &s2));
        }
        let i1 = cumulative_trapezoid(&quad, dt);
        let inner: Vec<Vec3<f64>> = i1
            .iter()
            .zip(&samples)
            .map(|(v, s)| v.map(|w| w / (s.0 * s.0)))
            .collect();
        let i2 = cumulative_trapezoid(&inner, dt);
        let i3 = cumulative_trapezoid(&middle, dt);
        for i in 0..=n {
            let rhs_t = [0, 1, 2].map(|c| curl_u0[c] + i1[i][c]);
            transport[i] = transport[i].max(pick(&lhs_transport[i], &rhs_t));
            let curl_deta = weighted_curl_eta(&Mat3::identity(), &hu.scale(beta[i]), &s2);
            let base = [0, 1, 2].map(|c| beta[i] * curl_u0[c] + i2[i][c]);
            let rhs = [0, 1, 2].map(|c| base[c] + i3[i][c]);
            let rhs_flipped = [0, 1, 2].map(|c| base[c] - i3[i][c]);
            integrated[i] = integrated[i].max(pick(&curl_deta, &rhs));
            flipped[i] = flipped[i].max(pick(&curl_deta, &rhs_flipped));
        }
    }
    Ok(CurlTransportReport {
        dt,
        times,
        transport,
        integrated,
        integrated_flipped: flipped,
    })
}

/// Isotropic curl law for `η = x + ε β(t) U`, with `u₀ = ε U`.
pub fn curl_transport_check(
    u: &dyn Field3,
    eps: f64,
    seed: ScalarAffineState<f64>,
    points: &[Vec3<f64>],
    t_end: f64,
    dt: f64,
) -> Result<CurlTransportReport> {
    residual_series(u, eps, [1.0; 3], seed, points, t_end, dt, None)
}

/// Component `component` (zero-based) of the `S`-weighted law for `𝛈 = (S₁²η¹, S₂²η², S₃²η³)`.
pub fn general_affine_curl_check(
    u: &dyn Field3,
    eps: f64,
    spec: &GeneralAffineSpec<f64>,
    component: usize,
    points: &[Vec3<f64>],
    t_end: f64,
    dt: f64,
) -> Result<GeneralCurlReport> {
    if component > 2 {
        return Err(Error::Domain(format!(
            "curl component must be 0, 1 or 2, got {component}"
        )));
    }
    let residuals = residual_series(
        u,
        eps,
        spec.s,
        spec.alpha_state,
        points,
        t_end,
        dt,
        Some(component),
    )?;
    Ok(GeneralCurlReport {
        s: spec.s,
        component,
        residuals,
    })
}

fn study(label: String, dts: &[f64], reports: &[CurlTransportReport]) -> IdentityOutcome {
    let dev: Vec<f64> = reports.iter().map(|r| r.max_residual()).collect();
    let exact = dev.iter().all(|d| *d <= 1e-12);
    let fitted_order = if exact {
        None
    } else {
        observed_order(dts, &dev)
    };
    let ok = exact || fitted_order.is_some_and(|p| (p - 2.0).abs() <= 0.3);
    IdentityOutcome {
        report: CheckReport {
            check_name: "curl_transport".into(),
            field_spec: label,
            resolutions: dts.to_vec(),
            deviations: dev,
            fitted_order,
            verdict: Verdict::from_bool(ok),
        },
        displayed_deviation: reports.last().map(|r| r.max_flipped()),
    }
}

/// `dt`-refinement of [`curl_transport_check`]; the displayed deviation is the integrated
/// residual with the middle term's sign flipped, at the finest step.
pub fn curl_transport_study(
    u: &dyn Field3,
    eps: f64,
    seed: ScalarAffineState<f64>,
    points: &[Vec3<f64>],
    t_end: f64,
    dts: &[f64],
) -> Result<IdentityOutcome> {
    let reports = dts
        .iter()
        .map(|&dt| curl_transport_check(u, eps, seed, points, t_end, dt))
        .collect::<Result<Vec<_>>>()?;
    Ok(study(
        format!("{} eps={eps} T={t_end}", u.describe()),
        dts,
        &reports,
    ))
}

pub fn general_affine_curl_study(
    u: &dyn Field3,
    eps: f64,
    spec: &GeneralAffineSpec<f64>,
    component: usize,
    points: &[Vec3<f64>],
    t_end: f64,
    dts: &[f64],
) -> Result<IdentityOutcome> {
    let reports = dts
        .iter()
        .map(|&dt| {
            general_affine_curl_check(u, eps, spec, component, points, t_end, dt)
                .map(|r| r.residuals)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = study(
        format!(
            "{} eps={eps} S={:?} component={component} T={t_end}",
            u.describe(),
            spec.s
        ),
        dts,
        &reports,
    );
    out.report.check_name = "general_affine_curl".into();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom3d::field::{random_points, FourierField};

    fn seed() -> ScalarAffineState<f64> {
        ScalarAffineState::new(1.0, 1.0, 2.0, 3).unwrap()
    }

    #[test]
    fn irrotational_data_gives_zero() {
        let u = FourierField::identity();
        let r = curl_transport_check(&u, 0.1, seed(), &random_points(1, 5, 0.8), 1.0, 0.1).unwrap();
        assert!(r.max_residual() < 1e-14, "{r:?}");
    }

    #[test]
    fn rotation_data_converges() {
        let u = FourierField::rotation([0.0, 0.0, 1.0]);
        let o = curl_transport_study(
            &u,
            0.2,
            seed(),
            &random_points(2, 5, 0.8),
            1.0,
            &[0.1, 0.05, 0.025],
        )
        .unwrap();
        assert_eq!(o.report.verdict, Verdict::Pass, "{:?}", o.report);
    }

    #[test]
    fn unit_stretch_matches_isotropic() {
        let u = FourierField::random(3, 3, 0.3, 2.0, false);
        let pts = random_points(3, 4, 0.8);
        let iso = curl_transport_check(&u, 0.1, seed(), &pts, 0.5, 0.05).unwrap();
        let spec = GeneralAffineSpec::new([1.0; 3], seed()).unwrap();
        let mut worst = vec![0.0f64; iso.times.len()];
        for c in 0..3 {
            let g = general_affine_curl_check(&u, 0.1, &spec, c, &pts, 0.5, 0.05).unwrap();
            for (w, v) in worst.iter_mut().zip(&g.residuals.transport) {
                *w = w.max(*v);
            }
        }
        assert_eq!(worst, iso.transport);
    }
}
