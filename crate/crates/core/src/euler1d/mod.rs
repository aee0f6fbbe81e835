//! Lagrangian perturbation `η = x + δη` of the 1-d affine flow: momentum residuals, the
//! weighted energies of each γ-regime, and an RK4 solver.

pub mod manufactured;
pub mod solver;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::affine::ScalarAffineState;
use crate::error::{Error, Result};
use crate::weights::Grid1d;

pub use manufactured::{
    residual_space_study, residual_time_study, solver_time_study, ConvergenceStudy,
    ManufacturedSolution,
};
pub use solver::{
    assess, run_stability_experiment, run_until, Forcing, GuardEvent, OutputSample, Perturbation,
    PerturbationKind, Run1d, Snapshot, Solver1d, StabilityConfig, StabilityOutcome,
};

/// Default guard on `‖η_x - 1‖_∞`.
pub const GUARD_BOUND: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct PerturbationField1D {
    pub deta: Vec<f64>,
    pub v: Vec<f64>,
    pub alpha_state: ScalarAffineState<f64>,
    pub gamma: f64,
    pub t: f64,
    pub grid: Arc<Grid1d>,
}

impl PerturbationField1D {
    /// `δη = 0`, `v = u₀`, `α(0) = 1`.
    pub fn new(grid: Arc<Grid1d>, u0: Vec<f64>, alphadot0: f64) -> Result<Self> {
        if u0.len() != grid.len() {
            return Err(Error::Domain(format!(
                "velocity has {} values for {} nodes",
                u0.len(),
                grid.len()
            )));
        }
        let gamma = grid.gamma;
        Ok(Self {
            deta: vec![0.0; grid.len()],
            v: u0,
            alpha_state: ScalarAffineState::new(1.0, alphadot0, gamma, 1)?,
            gamma,
            t: 0.0,
            grid,
        })
    }

    pub fn zero(grid: Arc<Grid1d>, alphadot0: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![0.0; n], alphadot0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_state.alpha
    }

    pub fn alphadot(&self) -> f64 {
        self.alpha_state.alphadot
    }

    pub fn eta_x(&self) -> Vec<f64> {
        self.grid
            .derivative(&self.deta)
            .iter()
            .map(|d| 1.0 + d)
            .collect()
    }

    /// Largest `|η_x - 1|` and the node where it occurs.
    pub fn guard_deviation(&self) -> (f64, usize) {
        self.grid
            .derivative(&self.deta)
            .iter()
            .enumerate()
            .fold(
                (0.0, 0),
                |(m, k), (i, d)| if d.abs() > m { (d.abs(), i) } else { (m, k) },
            )
    }

    pub fn check_guard(&self, bound: f64) -> Result<()> {
        let (dev, node) = self.guard_deviation();
        if !(dev <= bound) {
            return Err(Error::Guard {
                t: self.t,
                node,
                x: self.grid.nodes[node],
                deviation: dev,
                bound,
            });
        }
        Ok(())
    }
}

/// Spatial operator `η + (γ/(γ-1)) d_x η_x^{-γ} - γ d η_x^{-γ-1} η_xx`, written as
/// `δη + x(1 - η_x^{-γ}) - γ d η_x^{-γ-1} δη_xx` so the identity map is an exact zero.
pub fn spatial_operator(
    grid: &Grid1d,
    gamma: f64,
    deta: &[f64],
    deta_x: &[f64],
    deta_xx: &[f64],
    out: &mut [f64],
) {
    for i in 0..out.len() {
        let ex = 1.0 + deta_x[i];
        let p = ex.powf(-gamma);
        out[i] =
            deta[i] + grid.nodes[i] * (1.0 - p) - gamma * grid.d_values[i] * p / ex * deta_xx[i];
    }
}

fn operator_of(field: &PerturbationField1D) -> Vec<f64> {
    let g = &field.grid;
    let dx = g.derivative(&field.deta);
    let dxx = g.derivative(&dx);
    let mut n = vec![0.0; g.len()];
    spatial_operator(g, field.gamma, &field.deta, &dx, &dxx, &mut n);
    n
}

fn guarded(field: &PerturbationField1D) -> Result<()> {
    field.check_guard(GUARD_BOUND)
}

/// `α^{γ+1} v_t + 2α^γ α̇ v + η + (γ/(γ-1)) d_x η_x^{-γ} - γ d η_x^{-γ-1} η_xx` at the nodes.
/// With `vt = None` the time-derivative term is omitted, leaving the force the solver balances.
pub fn momentum_residual(field: &PerturbationField1D, vt: Option<&[f64]>) -> Result<Vec<f64>> {
    guarded(field)?;
    let (a, ad, g) = (field.alpha(), field.alphadot(), field.gamma);
    let n = operator_of(field);
    let ag = a.powf(g);
    Ok((0..n.len())
        .map(|i| {
            let t = vt.map_or(0.0, |vt| a * ag * vt[i]);
            t + 2.0 * ag * ad * field.v[i] + n[i]
        })
        .collect())
}

/// The momentum equation divided by `α^{γ-3}`: `α⁴ v_t + 2α³ α̇ v + α^{3-γ}(…)`, for `γ > 3`.
pub fn momentum_residual_rescaled(
    field: &PerturbationField1D,
    vt: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if !(field.gamma > 3.0) {
        return Err(Error::Regime(format!(
            "rescaled momentum equation needs gamma > 3, got {}",
            field.gamma
        )));
    }
    guarded(field)?;
    let (a, ad, g) = (field.alpha(), field.alphadot(), field.gamma);
    let n = operator_of(field);
    let a3 = a.powi(3);
    let w = a.powf(3.0 - g);
    Ok((0..n.len())
        .map(|i| {
            let t = vt.map_or(0.0, |vt| a * a3 * vt[i]);
            t + 2.0 * a3 * ad * field.v[i] + w * n[i]
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Gamma2,
    GammaGt3,
    #[serde(rename = "gamma_1to3")]
    Gamma1To3,
}

impl Regime {
    pub fn for_gamma(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::Domain(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(if gamma == 2.0 {
            Self::Gamma2
        } else if gamma > 3.0 {
            Self::GammaGt3
        } else {
            Self::Gamma1To3
        })
    }

    fn admits(self, gamma: f64) -> bool {
        match self {
            Self::Gamma2 => gamma == 2.0,
            Self::GammaGt3 => gamma > 3.0,
            Self::Gamma1To3 => gamma > 1.0 && gamma <= 3.0,
        }
    }

    /// Number `a` of lower-order pairs `b = 0..=a`; the top term carries `∂^{a+1} δη`.
    pub fn derivative_count(self, gamma: f64) -> usize {
        match self {
            Self::Gamma2 => 5,
            Self::GammaGt3 => 4,
            // smallest integer strictly above (3γ-2)/(γ-1)
            Self::Gamma1To3 => ((3.0 * gamma - 2.0) / (gamma - 1.0)).floor() as usize + 1,
        }
    }

    /// Default `α`-power on the velocity terms.
    pub fn velocity_alpha_power(self, gamma: f64) -> f64 {
        match self {
            Self::GammaGt3 => 2.0,
            _ => 0.5 * (gamma + 1.0),
        }
    }

    /// `α`-power on the top `δη` term.
    pub fn top_alpha_power(self, gamma: f64) -> f64 {
        match self {
            Self::GammaGt3 => 0.5 * (3.0 - gamma),
            _ => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Gamma2 => "gamma2",
            Self::GammaGt3 => "gamma_gt3",
            Self::Gamma1To3 => "gamma_1to3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Deta,
    V,
}

/// One summand `‖α^p d^q ∂^b f‖₀²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summand {
    pub key: String,
    pub component: Component,
    pub b: usize,
    /// `q`, the power of `d` inside the norm.
    pub d_power: f64,
    /// `p`, the power of `α` inside the norm.
    pub alpha_power: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub t: f64,
    pub regime: Regime,
    pub summands: Vec<Summand>,
    pub total: f64,
}

impl EnergyReport {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.summands.iter().find(|s| s.key == key).map(|s| s.value)
    }
}

/// Term layout of a regime: `(component, b, d_power, alpha_power)`.
pub fn energy_terms(
    regime: Regime,
    gamma: f64,
    velocity_alpha_power: Option<f64>,
) -> Vec<(Component, usize, f64, f64)> {
    let a = regime.derivative_count(gamma);
    let q = |b: usize| (1.0 + b as f64 * (gamma - 1.0)) / (2.0 * gamma - 2.0);
    let pv = velocity_alpha_power.unwrap_or_else(|| regime.velocity_alpha_power(gamma));
    let mut terms = vec![(
        Component::Deta,
        a + 1,
        q(a + 1),
        regime.top_alpha_power(gamma),
    )];
    for b in 0..=a {
        terms.push((Component::V, b, q(b), pv));
        terms.push((Component::Deta, b, q(b), 0.0));
    }
    terms
}

pub fn term_key(component: Component, b: usize) -> String {
    match component {
        Component::Deta => format!("deta_d{b}"),
        Component::V => format!("v_d{b}"),
    }
}

/// Every summand of the regime's energy `e(t)` on the field.
pub fn energy(
    field: &PerturbationField1D,
    regime: Regime,
    velocity_alpha_power: Option<f64>,
) -> Result<EnergyReport> {
    if !regime.admits(field.gamma) {
        return Err(Error::Regime(format!(
            "regime {} does not apply to gamma = {}",
            regime.name(),
            field.gamma
        )));
    }
    let g = &field.grid;
    let terms = energy_terms(regime, field.gamma, velocity_alpha_power);
    let top = regime.derivative_count(field.gamma) + 1;
    if g.max_derivative() < top {
        return Err(Error::Resolution(format!(
            "energy needs {top} derivatives but {} supports {}",
            g.grid_id(),
            g.max_derivative()
        )));
    }
    let deta = g.derivatives(&field.deta, top)?;
    let v = g.derivatives(&field.v, top - 1)?;
    let alpha = field.alpha();
    let mut summands = Vec::with_capacity(terms.len());
    for (component, b, q, p) in terms {
        let f = match component {
            Component::Deta => &deta[b],
            Component::V => &v[b],
        };
        let value = alpha.powf(2.0 * p) * g.weighted_l2_sq(f, 2.0 * q)?;
        summands.push(Summand {
            key: term_key(component, b),
            component,
            b,
            d_power: q,
            alpha_power: p,
            value,
        });
    }
    let total = summands.iter().map(|s| s.value).sum();
    Ok(EnergyReport {
        t: field.t,
        regime,
        summands,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(gamma: f64, n: usize) -> PerturbationField1D {
        PerturbationField1D::zero(Arc::new(Grid1d::chebyshev(n, gamma).unwrap()), 0.7).unwrap()
    }

    #[test]
    fn identity_map_is_an_exact_steady_state() {
        for gamma in [1.4, 2.0, 4.0] {
            let mut f = field(gamma, 24);
            f.alpha_state.alpha = 3.7;
            let r = momentum_residual(&f, None).unwrap();
            assert!(r.iter().all(|v| *v == 0.0));
        }
        let f = field(4.0, 24);
        assert!(momentum_residual_rescaled(&f, None)
            .unwrap()
            .iter()
            .all(|v| *v == 0.0));
        assert!(matches!(
            momentum_residual_rescaled(&field(2.0, 8), None),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn rescaled_form_is_the_divided_equation() {
        let mut f = field(4.5, 20);
        f.deta = f.grid.sample(|x| 0.01 * (2.0 * x).sin());
        f.v = f.grid.sample(|x| 0.02 * x * x);
        f.alpha_state.alpha = 2.3;
        let vt = f.grid.sample(|x| 0.1 * x.cos());
        let full = momentum_residual(&f, Some(&vt)).unwrap();
        let resc = momentum_residual_rescaled(&f, Some(&vt)).unwrap();
        let s = 2.3f64.powf(4.5 - 3.0);
        for (a, b) in full.iter().zip(&resc) {
            assert!((a - s * b).abs() <= 1e-13 * a.abs().max(1e-3));
        }
    }

    #[test]
    fn derivative_counts() {
        assert_eq!(Regime::Gamma2.derivative_count(2.0), 5);
        assert_eq!(Regime::GammaGt3.derivative_count(5.0), 4);
        assert_eq!(Regime::Gamma1To3.derivative_count(3.0), 4);
        assert_eq!(Regime::Gamma1To3.derivative_count(2.5), 4);
        assert_eq!(Regime::Gamma1To3.derivative_count(1.5), 6);
        assert_eq!(Regime::for_gamma(2.0).unwrap(), Regime::Gamma2);
        assert_eq!(Regime::for_gamma(5.0).unwrap(), Regime::GammaGt3);
        assert_eq!(Regime::for_gamma(1.2).unwrap(), Regime::Gamma1To3);
    }

    #[test]
    fn gamma2_terms_match_the_definition() {
        let t = energy_terms(Regime::Gamma2, 2.0, None);
        assert_eq!(t.len(), 13);
        assert_eq!(t[0], (Component::Deta, 6, 3.5, 0.0));
        assert!(t
            .iter()
            .filter(|x| x.0 == Component::V)
            .all(|x| x.3 == 1.5 && x.2 == 0.5 * (1.0 + x.1 as f64)));
        let t5 = energy_terms(Regime::GammaGt3, 5.0, None);
        assert_eq!(t5[0], (Component::Deta, 5, (25.0 - 4.0) / 8.0, -1.0));
    }

    #[test]
    fn guard_violation_reports_node() {
        let mut f = field(2.0, 16);
        f.deta = f.grid.sample(|x| 0.3 * x * x * x);
        let e = momentum_residual(&f, None).unwrap_err();
        match e {
            Error::Guard { node, x, .. } => assert!(node == 0 || node == 16, "{node} {x}"),
            other => panic!("{other:?}"),
        }
    }
}
