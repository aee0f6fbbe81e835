//! Manufactured family `η = x + ε sin(kπx) e^{-λt}` with closed-form derivatives and the
//! exact forcing that makes it solve the momentum equation.

use std::f64::consts::PI;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::solver::Solver1d;
use super::{momentum_residual, PerturbationField1D};
use crate::error::{Error, Result};
use crate::fit::{observed_order, pairwise_orders};
use crate::weights::{Family, Grid1d};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedSolution {
    pub epsilon: f64,
    pub mode: f64,
    pub decay: f64,
    pub gamma: f64,
}

impl ManufacturedSolution {
    pub fn new(epsilon: f64, gamma: f64) -> Self {
        Self {
            epsilon,
            mode: 1.0,
            decay: 1.0,
            gamma,
        }
    }

    fn amp(&self, t: f64) -> f64 {
        self.epsilon * (-self.decay * t).exp()
    }

    pub fn deta(&self, x: f64, t: f64) -> f64 {
        self.amp(t) * (self.mode * PI * x).sin()
    }

    pub fn eta(&self, x: f64, t: f64) -> f64 {
        x + self.deta(x, t)
    }

    pub fn eta_x(&self, x: f64, t: f64) -> f64 {
        1.0 + self.amp(t) * self.mode * PI * (self.mode * PI * x).cos()
    }

    pub fn eta_xx(&self, x: f64, t: f64) -> f64 {
        -self.amp(t) * (self.mode * PI).powi(2) * (self.mode * PI * x).sin()
    }

    pub fn v(&self, x: f64, t: f64) -> f64 {
        -self.decay * self.deta(x, t)
    }

    pub fn v_t(&self, x: f64, t: f64) -> f64 {
        self.decay * self.decay * self.deta(x, t)
    }

    /// Left side of the momentum equation on the exact solution, term by term as written
    /// (no use of the `x + (γ/(γ-1)) d_x = 0` cancellation).
    pub fn forcing(&self, x: f64, t: f64, alpha: f64, alphadot: f64) -> f64 {
        let g = self.gamma;
        let c = (g - 1.0) / (2.0 * g);
        let d = c * (1.0 - x * x);
        let dx = -2.0 * c * x;
        let ex = self.eta_x(x, t);
        alpha.powf(g + 1.0) * self.v_t(x, t)
            + 2.0 * alpha.powf(g) * alphadot * self.v(x, t)
            + self.eta(x, t)
            + g / (g - 1.0) * dx * ex.powf(-g)
            - g * d * ex.powf(-g - 1.0) * self.eta_xx(x, t)
    }
}

/// Errors against a resolution parameter with the fitted and pairwise orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub resolutions: Vec<f64>,
    pub errors: Vec<f64>,
    pub pairwise_orders: Vec<f64>,
    pub fitted_order: f64,
}

impl ConvergenceStudy {
    pub fn from_errors(resolutions: Vec<f64>, errors: Vec<f64>) -> Result<Self> {
        let fitted_order = observed_order(&resolutions, &errors)
            .ok_or_else(|| Error::NonConvergence("order fit needs two positive errors".into()))?;
        Ok(Self {
            pairwise_orders: pairwise_orders(&resolutions, &errors),
            resolutions,
            errors,
            fitted_order,
        })
    }
}

impl ManufacturedSolution {
    pub fn forcing_fn(self) -> super::solver::Forcing {
        Arc::new(move |x, t, a, ad| self.forcing(x, t, a, ad))
    }

    /// Field sampled from the exact solution at `t = 0` with `α(0) = 1`.
    pub fn initial_field(&self, grid: Arc<Grid1d>, alphadot0: f64) -> Result<PerturbationField1D> {
        let v0 = grid.sample(|x| self.v(x, 0.0));
        let deta = grid.sample(|x| self.deta(x, 0.0));
        let mut f = PerturbationField1D::new(grid, v0, alphadot0)?;
        f.deta = deta;
        Ok(f)
    }

    fn forced_solver(&self, grid: Arc<Grid1d>, cfl: f64) -> Solver1d {
        Solver1d::new(grid, cfl).with_forcing(self.forcing_fn())
    }

    /// Runs the forced solver to `t_end` with step `t_end/steps`; returns the max nodal error in
    /// `(δη, v)` against the exact solution.
    pub fn solve_error(
        &self,
        grid: Arc<Grid1d>,
        t_end: f64,
        steps: usize,
        cfl: f64,
    ) -> Result<f64> {
        let solver = self.forced_solver(Arc::clone(&grid), cfl);
        let mut f = self.initial_field(Arc::clone(&grid), 1.0)?;
        let dt = t_end / steps as f64;
        for k in 0..steps {
            solver.step(&mut f, dt)?;
            f.t = (k + 1) as f64 * dt;
        }
        let mut err: f64 = 0.0;
        for (i, x) in grid.nodes.iter().enumerate() {
            err = err.max((f.deta[i] - self.deta(*x, t_end)).abs());
            err = err.max((f.v[i] - self.v(*x, t_end)).abs());
        }
        Ok(err)
    }

    /// Residual of the momentum equation against the forcing at `t_star`, on the numerical
    /// solution, with `v_t` taken by centered differences of the computed velocity.
    pub fn numerical_residual(
        &self,
        grid: Arc<Grid1d>,
        t_star: f64,
        dt: f64,
        cfl: f64,
    ) -> Result<f64> {
        let steps = (t_star / dt).round() as usize;
        if steps == 0 || ((steps as f64) * dt - t_star).abs() > 1e-9 * t_star {
            return Err(Error::Domain(format!(
                "t_star {t_star} is not a multiple of dt {dt}"
            )));
        }
        let solver = self.forced_solver(Arc::clone(&grid), cfl);
        let mut f = self.initial_field(Arc::clone(&grid), 1.0)?;
        let mut prev = f.v.clone();
        for k in 0..steps {
            prev.copy_from_slice(&f.v);
            solver.step(&mut f, dt)?;
            f.t = (k + 1) as f64 * dt;
        }
        let centre = f.clone();
        solver.step(&mut f, dt)?;
        let vt: Vec<f64> =
            f.v.iter()
                .zip(&prev)
                .map(|(a, b)| (a - b) / (2.0 * dt))
                .collect();
        let r = momentum_residual(&centre, Some(&vt))?;
        let (a, ad) = (centre.alpha(), centre.alphadot());
        Ok(grid
            .nodes
            .iter()
            .zip(&r)
            .map(|(x, ri)| (ri - self.forcing(*x, t_star, a, ad)).abs())
            .fold(0.0, f64::max))
    }

    /// Residual of the exact solution sampled on the grid with exact `v_t`; isolates the
    /// spatial differentiation error.
    pub fn sampled_residual(
        &self,
        grid: Arc<Grid1d>,
        t: f64,
        alpha: f64,
        alphadot: f64,
    ) -> Result<f64> {
        let v = grid.sample(|x| self.v(x, t));
        let mut f = PerturbationField1D::new(Arc::clone(&grid), v, alphadot)?;
        f.deta = grid.sample(|x| self.deta(x, t));
        f.alpha_state.alpha = alpha;
        f.t = t;
        let vt = grid.sample(|x| self.v_t(x, t));
        let r = momentum_residual(&f, Some(&vt))?;
        Ok(grid
            .nodes
            .iter()
            .zip(&r)
            .map(|(x, ri)| (ri - self.forcing(*x, t, alpha, alphadot)).abs())
            .fold(0.0, f64::max))
    }
}

/// dt-halving study of the residual with time-differenced `v_t` (expected order 2).
pub fn residual_time_study(
    m: &ManufacturedSolution,
    n: usize,
    t_star: f64,
    dts: &[f64],
) -> Result<ConvergenceStudy> {
    let grid = Arc::new(Grid1d::chebyshev(n, m.gamma)?);
    let errors = dts
        .iter()
        .map(|&dt| m.numerical_residual(Arc::clone(&grid), t_star, dt, f64::INFINITY))
        .collect::<Result<Vec<_>>>()?;
    ConvergenceStudy::from_errors(dts.to_vec(), errors)
}

/// dt-halving study of the RK4 solution error at `t_end` (expected order 4).
pub fn solver_time_study(
    m: &ManufacturedSolution,
    n: usize,
    t_end: f64,
    steps: &[usize],
) -> Result<ConvergenceStudy> {
    let grid = Arc::new(Grid1d::chebyshev(n, m.gamma)?);
    let errors = steps
        .iter()
        .map(|&s| m.solve_error(Arc::clone(&grid), t_end, s, f64::INFINITY))
        .collect::<Result<Vec<_>>>()?;
    ConvergenceStudy::from_errors(steps.iter().map(|&s| t_end / s as f64).collect(), errors)
}

/// Spatial refinement of the sampled residual; resolutions are `1/n`.
pub fn residual_space_study(
    m: &ManufacturedSolution,
    family: Family,
    ns: &[usize],
    t: f64,
) -> Result<ConvergenceStudy> {
    let errors = ns
        .iter()
        .map(|&n| m.sampled_residual(Arc::new(Grid1d::new(family, n, m.gamma)?), t, 1.3, 0.8))
        .collect::<Result<Vec<_>>>()?;
    ConvergenceStudy::from_errors(ns.iter().map(|&n| 1.0 / n as f64).collect(), errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_agree_with_finite_differences() {
        let m = ManufacturedSolution::new(0.01, 2.0);
        let (x, t, h) = (0.3, 0.7, 1e-5);
        let fd_x = (m.eta(x + h, t) - m.eta(x - h, t)) / (2.0 * h);
        assert!((fd_x - m.eta_x(x, t)).abs() < 1e-9);
        let fd_xx = (m.eta_x(x + h, t) - m.eta_x(x - h, t)) / (2.0 * h);
        assert!((fd_xx - m.eta_xx(x, t)).abs() < 1e-8);
        let fd_t = (m.eta(x, t + h) - m.eta(x, t - h)) / (2.0 * h);
        assert!((fd_t - m.v(x, t)).abs() < 1e-10);
        let fd_tt = (m.v(x, t + h) - m.v(x, t - h)) / (2.0 * h);
        assert!((fd_tt - m.v_t(x, t)).abs() < 1e-10);
    }

    #[test]
    fn zero_amplitude_needs_no_forcing() {
        let m = ManufacturedSolution::new(0.0, 3.0);
        for x in [-1.0, -0.2, 0.5, 1.0] {
            assert!(m.forcing(x, 0.4, 1.7, 0.3).abs() < 1e-15);
        }
    }
}
