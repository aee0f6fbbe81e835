//! Explicit Runge–Kutta integrators for first-order systems `y' = f(t, y)`.
//!
//! `rk4_step` is the classical fixed-step scheme used by the PDE stepper and the
//! convergence studies. `Dopri5` is the embedded 5(4) Dormand–Prince pair with
//! standard step-size control; it integrates exactly to requested output times.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub trait OdeSystem<T: Real> {
    fn dim(&self) -> usize;
    fn rhs(&self, t: T, y: &[T], dy: &mut [T]);
}

impl<T: Real, F> OdeSystem<T> for (usize, F)
where
    F: Fn(T, &[T], &mut [T]),
{
    fn dim(&self) -> usize {
        self.0
    }
    fn rhs(&self, t: T, y: &[T], dy: &mut [T]) {
        (self.1)(t, y, dy)
    }
}

/// Scratch buffers for [`rk4_step`].
#[derive(Debug, Clone)]
pub struct Rk4Work<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T: Real> Rk4Work<T> {
    pub fn new(n: usize) -> Self {
        Self {
            k1: vec![T::zero(); n],
            k2: vec![T::zero(); n],
            k3: vec![T::zero(); n],
            k4: vec![T::zero(); n],
            tmp: vec![T::zero(); n],
        }
    }
}

pub fn rk4_step<T: Real, S: OdeSystem<T> + ?Sized>(
    sys: &S,
    t: T,
    y: &mut [T],
    h: T,
    w: &mut Rk4Work<T>,
) {
    let n = y.len();
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    sys.rhs(t, y, &mut w.k1);
    for i in 0..n {
        w.tmp[i] = y[i] + half * h * w.k1[i];
    }
    sys.rhs(t + half * h, &w.tmp, &mut w.k2);
    for i in 0..n {
        w.tmp[i] = y[i] + half * h * w.k2[i];
    }
    sys.rhs(t + half * h, &w.tmp, &mut w.k3);
    for i in 0..n {
        w.tmp[i] = y[i] + h * w.k3[i];
    }
    sys.rhs(t + h, &w.tmp, &mut w.k4);
    for i in 0..n {
        y[i] += h * sixth * (w.k1[i] + T::lit(2.0) * (w.k2[i] + w.k3[i]) + w.k4[i]);
    }
}

/// Dormand–Prince 5(4) with PI-free classical step control.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5<T> {
    pub rtol: T,
    pub atol: T,
    pub h_min: T,
    pub max_steps: usize,
}

impl<T: Real> Default for Dopri5<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-11),
            atol: T::lit(1e-12),
            h_min: T::lit(1e-14),
            max_steps: 5_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b* (fifth minus fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl<T: Real> Dopri5<T> {
    pub fn with_tolerances(rtol: T, atol: T) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Advances `y` from `t0` to exactly `t1` (either direction). `h` carries the step-size
    /// guess between calls and is updated in place. `accept` runs after every accepted
    /// step and may abort the integration.
    pub fn integrate<S, F>(
        &self,
        sys: &S,
        t0: T,
        y: &mut [T],
        t1: T,
        h: &mut T,
        mut accept: F,
    ) -> Result<usize>
    where
        S: OdeSystem<T> + ?Sized,
        F: FnMut(T, &[T]) -> Result<()>,
    {
        let n = y.len();
        let dir = if t1 >= t0 { T::one() } else { -T::one() };
        let mut t = t0;
        let mut k = vec![vec![T::zero(); n]; 7];
        let mut tmp = vec![T::zero(); n];
        let mut y5 = vec![T::zero(); n];
        let mut steps = 0usize;
        if *h == T::zero() {
            *h = ((t1 - t0).abs() * T::lit(1e-3)).max(T::lit(1e-6));
        }
        *h = h.abs();
        sys.rhs(t, y, &mut k[0]);
        while (t1 - t) * dir > T::zero() {
            if steps >= self.max_steps {
                return Err(Error::StepFailure {
                    t: t.to_f64_lossy(),
                    reason: "maximum number of steps exceeded".into(),
                });
            }
            let remaining = (t1 - t).abs();
            let last = *h >= remaining;
            let hs = if last { remaining } else { *h } * dir;

            let stage = |acc: &mut Vec<T>, coeffs: &[(usize, f64)], k: &Vec<Vec<T>>| {
                for i in 0..n {
                    let mut s = y[i];
                    for &(j, c) in coeffs {
                        s += hs * T::lit(c) * k[j][i];
                    }
                    acc[i] = s;
                }
            };
            stage(&mut tmp, &[(0, A21)], &k);
            sys.rhs(t + T::lit(C2) * hs, &tmp, &mut k[1]);
            stage(&mut tmp, &[(0, A31), (1, A32)], &k);
            sys.rhs(t + T::lit(C3) * hs, &tmp, &mut k[2]);
            stage(&mut tmp, &[(0, A41), (1, A42), (2, A43)], &k);
            sys.rhs(t + T::lit(C4) * hs, &tmp, &mut k[3]);
            stage(&mut tmp, &[(0, A51), (1, A52), (2, A53), (3, A54)], &k);
            sys.rhs(t + T::lit(C5) * hs, &tmp, &mut k[4]);
            stage(
                &mut tmp,
                &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)],
                &k,
            );
            sys.rhs(t + hs, &tmp, &mut k[5]);
            stage(&mut y5, &[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)], &k);
            sys.rhs(t + hs, &y5, &mut k[6]);

            let mut err = T::zero();
            for i in 0..n {
                let e = hs
                    * (T::lit(E1) * k[0][i]
                        + T::lit(E3) * k[2][i]
                        + T::lit(E4) * k[3][i]
                        + T::lit(E5) * k[4][i]
                        + T::lit(E6) * k[5][i]
                        + T::lit(E7) * k[6][i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                err += (e / sc) * (e / sc);
            }
            err = (err / T::from_usize_lossy(n.max(1))).sqrt();
            if !err.is_finite() {
                *h = *h * T::lit(0.1);
                if *h < self.h_min {
                    return Err(Error::StepFailure {
                        t: t.to_f64_lossy(),
                        reason: "non-finite error estimate".into(),
                    });
                }
                continue;
            }
            let fac = if err == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * err.powf(T::lit(-0.2)))
                    .min(T::lit(5.0))
                    .max(T::lit(0.2))
            };
            if err <= T::one() {
                t = if last { t1 } else { t + hs };
                y.copy_from_slice(&y5);
                let (head, tail) = k.split_at_mut(6);
                head[0].copy_from_slice(&tail[0]);
                steps += 1;
                accept(t, y)?;
                if !last {
                    *h = *h * fac;
                }
            } else {
                *h = *h * fac.min(T::one());
                if *h < self.h_min {
                    return Err(Error::StepFailure {
                        t: t.to_f64_lossy(),
                        reason: "step size underflow".into(),
                    });
                }
            }
        }
        Ok(steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_is_fourth_order_on_exponential() {
        let sys = (1usize, |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = -y[0]);
        let err = |n: usize| {
            let mut y = [1.0];
            let h = 1.0 / n as f64;
            let mut w = Rk4Work::new(1);
            for i in 0..n {
                rk4_step(&sys, i as f64 * h, &mut y, h, &mut w);
            }
            (y[0] - (-1.0f64).exp()).abs()
        };
        let order = (err(10) / err(20)).log2();
        assert!((order - 4.0).abs() < 0.2, "order {order}");
    }

    #[test]
    fn dopri_hits_end_time_and_is_accurate() {
        let sys = (2usize, |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        });
        let mut y = [0.0, 1.0];
        let mut h = 0.0;
        Dopri5::default()
            .integrate(&sys, 0.0, &mut y, 10.0, &mut h, |_, _| Ok(()))
            .unwrap();
        assert!((y[0] - 10f64.sin()).abs() < 1e-9);
        // backward
        Dopri5::default()
            .integrate(&sys, 10.0, &mut y, 0.0, &mut h, |_, _| Ok(()))
            .unwrap();
        assert!(y[0].abs() < 1e-9 && (y[1] - 1.0).abs() < 1e-9);
    }
}
