//! Explicit RK4 for `(δη, v, α, α̇)` with a CFL check, the `‖η_x - 1‖_∞` guard, an optional
//! exponential mode filter, optional manufactured forcing, and checkpointable run state.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{energy, spatial_operator, EnergyReport, PerturbationField1D, Regime, GUARD_BOUND};
use crate::error::{Error, Result};
use crate::ode::{rk4_step, Rk4Work};
use crate::report::Verdict;
use crate::weights::diff::Matrix;
use crate::weights::{Family, Grid1d};

/// `F(x, t, α, α̇)` added to the right side of the momentum equation.
pub type Forcing = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;

pub struct Solver1d {
    pub grid: Arc<Grid1d>,
    pub gamma: f64,
    /// Integrate the `α^{γ-3}`-divided form (used for `γ > 3`).
    pub rescaled: bool,
    pub cfl: f64,
    pub guard_bound: f64,
    filter: Option<Matrix>,
    forcing: Option<Forcing>,
}

impl std::fmt::Debug for Solver1d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Solver1d")
            .field("grid", &self.grid.grid_id())
            .field("rescaled", &self.rescaled)
            .field("cfl", &self.cfl)
            .field("filter", &self.filter.is_some())
            .field("forcing", &self.forcing.is_some())
            .finish()
    }
}

/// Exponential filter acting on Chebyshev modes above `0.9 N`.
fn chebyshev_filter(n: usize) -> Matrix {
    let m = n + 1;
    let nf = n as f64;
    let kc = (0.9 * nf).floor();
    let sigma = |k: usize| {
        let k = k as f64;
        if k <= kc {
            1.0
        } else {
            (-36.0 * ((k - kc) / (nf - kc)).powi(8)).exp()
        }
    };
    // node j sits at cos(π(N-j)/N)
    let tk = |k: usize, j: usize| (k as f64 * PI * (n - j) as f64 / nf).cos();
    let c = |i: usize| if i == 0 || i == n { 2.0 } else { 1.0 };
    let mut data = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let mut s = 0.0;
            for k in 0..m {
                s += tk(k, i) * sigma(k) * 2.0 / (nf * c(k)) * tk(k, j) / c(j);
            }
            data[i * m + j] = s;
        }
    }
    Matrix { n: m, data }
}

impl Solver1d {
    pub fn new(grid: Arc<Grid1d>, cfl: f64) -> Self {
        let gamma = grid.gamma;
        Self {
            grid,
            gamma,
            rescaled: gamma > 3.0,
            cfl,
            guard_bound: GUARD_BOUND,
            filter: None,
            forcing: None,
        }
    }

    pub fn with_filter(mut self, on: bool) -> Self {
        self.filter = match (on, self.grid.family) {
            (true, Family::Jacobi) => Some(chebyshev_filter(self.grid.n)),
            _ => None,
        };
        self
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn filtered(&self) -> bool {
        self.filter.is_some()
    }

    /// `cfl · h_min / max √(γ d η_x^{-γ-1})` for the given `η_x`.
    fn cfl_bound_for(&self, eta_x: impl Iterator<Item = f64>) -> f64 {
        let speed = eta_x
            .zip(&self.grid.d_values)
            .map(|(ex, d)| (self.gamma * d * ex.powf(-self.gamma - 1.0)).sqrt())
            .fold(0.0, f64::max);
        self.cfl * self.grid.h_min() / speed
    }

    pub fn cfl_bound(&self, field: &PerturbationField1D) -> f64 {
        self.cfl_bound_for(field.eta_x().into_iter())
    }

    /// CFL bound valid for every state admitted by the guard (`η_x ≥ 1 - bound`).
    pub fn guarded_dt(&self) -> f64 {
        let worst = 1.0 - self.guard_bound;
        self.cfl_bound_for(std::iter::repeat(worst).take(self.grid.len()))
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64], scratch: &mut [Vec<f64>; 3]) {
        let m = self.grid.len();
        let (deta, rest) = y.split_at(m);
        let (v, ab) = rest.split_at(m);
        let (alpha, alphadot) = (ab[0], ab[1]);
        let [dx, dxx, n] = scratch;
        self.grid.derivative_into(deta, dx);
        self.grid.derivative_into(dx, dxx);
        spatial_operator(&self.grid, self.gamma, deta, dx, dxx, n);
        if let Some(f) = &self.forcing {
            for (ni, x) in n.iter_mut().zip(&self.grid.nodes) {
                *ni -= f(*x, t, alpha, alphadot);
            }
        }
        let damp = 2.0 * alphadot / alpha;
        let scale = if self.rescaled {
            alpha.powi(-4) * alpha.powf(3.0 - self.gamma)
        } else {
            alpha.powf(-self.gamma - 1.0)
        };
        dy[..m].copy_from_slice(v);
        for i in 0..m {
            dy[m + i] = -damp * v[i] - scale * n[i];
        }
        dy[2 * m] = alphadot;
        dy[2 * m + 1] = alpha.powf(-self.gamma);
    }

    /// Advances the field by `dt`. Checks the CFL bound first and the guard afterwards.
    pub fn step(&self, field: &mut PerturbationField1D, dt: f64) -> Result<()> {
        let mut work = StepWork::new(self.grid.len());
        self.step_with(field, dt, &mut work)
    }

    fn step_with(
        &self,
        field: &mut PerturbationField1D,
        dt: f64,
        work: &mut StepWork,
    ) -> Result<()> {
        let bound = self.cfl_bound(field);
        if !(dt > 0.0 && dt <= bound * (1.0 + 1e-12)) {
            return Err(Error::Cfl { dt, bound });
        }
        let m = self.grid.len();
        work.y[..m].copy_from_slice(&field.deta);
        work.y[m..2 * m].copy_from_slice(&field.v);
        work.y[2 * m] = field.alpha_state.alpha;
        work.y[2 * m + 1] = field.alpha_state.alphadot;
        let scratch = std::cell::RefCell::new(std::mem::take(&mut work.scratch));
        let sys = (2 * m + 2, |t: f64, y: &[f64], dy: &mut [f64]| {
            self.rhs(t, y, dy, &mut scratch.borrow_mut())
        });
        rk4_step(&sys, field.t, &mut work.y, dt, &mut work.rk);
        work.scratch = scratch.into_inner();
        if let Some(fm) = &self.filter {
            fm.apply(&work.y[..m], &mut field.deta);
            fm.apply(&work.y[m..2 * m], &mut field.v);
        } else {
            field.deta.copy_from_slice(&work.y[..m]);
            field.v.copy_from_slice(&work.y[m..2 * m]);
        }
        field.alpha_state.alpha = work.y[2 * m];
        field.alpha_state.alphadot = work.y[2 * m + 1];
        field.t += dt;
        field.alpha_state.t = field.t;
        field.check_guard(self.guard_bound)
    }
}

struct StepWork {
    y: Vec<f64>,
    rk: Rk4Work<f64>,
    scratch: [Vec<f64>; 3],
}

impl StepWork {
    fn new(m: usize) -> Self {
        Self {
            y: vec![0.0; 2 * m + 2],
            rk: Rk4Work::new(2 * m + 2),
            scratch: [vec![0.0; m], vec![0.0; m], vec![0.0; m]],
        }
    }
}

/// Diagnostics recorded at each output step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSample {
    pub step: u64,
    pub t: f64,
    pub alpha: f64,
    pub alphadot: f64,
    pub sup_v: f64,
    pub sup_deta: f64,
    /// `‖α^w v‖_∞` with the regime's velocity weight `w`.
    pub sup_weighted_v: f64,
    /// `e(t) + ‖α^w v‖²_{W^{1,∞}} + ‖δη‖²_{W^{1,∞}}`
    pub e_proxy: f64,
    pub guard_deviation: f64,
    /// Largest `|δη(x,t) - δη(x,0)| / ((∫₀ᵗ α^{-w}) max_s |α^w v(x,s)|)` over the nodes.
    pub ft_ratio: f64,
    pub energy: EnergyReport,
}

/// Full restartable state of a run; time is `step · dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub gamma: f64,
    pub n: usize,
    pub family: Family,
    pub cfl: f64,
    pub filter: bool,
    pub alphadot0: f64,
    pub velocity_alpha_power: f64,
    pub step: u64,
    pub dt: f64,
    pub alpha: f64,
    pub alphadot: f64,
    pub weight_integral: f64,
    pub deta: Vec<f64>,
    pub v: Vec<f64>,
    pub deta0: Vec<f64>,
    pub max_weighted_v: Vec<f64>,
}

/// A run in progress: solver, field and the running quantities of the pointwise bound
/// `|δη(x,t) - δη(x,0)| ≤ (∫₀ᵗ α^{-w}) max_s |α^w v(x,s)|`.
pub struct Run1d {
    pub solver: Solver1d,
    pub field: PerturbationField1D,
    pub dt: f64,
    pub step: u64,
    pub regime: Regime,
    pub velocity_alpha_power: f64,
    pub alphadot0: f64,
    deta0: Vec<f64>,
    weight_integral: f64,
    max_weighted_v: Vec<f64>,
    work: StepWork,
}

impl Run1d {
    pub fn new(
        solver: Solver1d,
        field: PerturbationField1D,
        dt: f64,
        velocity_alpha_power: Option<f64>,
    ) -> Result<Self> {
        let regime = Regime::for_gamma(field.gamma)?;
        let w = velocity_alpha_power.unwrap_or_else(|| regime.velocity_alpha_power(field.gamma));
        let guarded = solver.guarded_dt();
        if !(dt > 0.0 && dt <= guarded * (1.0 + 1e-12)) {
            return Err(Error::Cfl { dt, bound: guarded });
        }
        let a = field.alpha();
        let max_weighted_v = field.v.iter().map(|v| a.powf(w) * v.abs()).collect();
        let m = field.grid.len();
        Ok(Self {
            deta0: field.deta.clone(),
            alphadot0: field.alphadot(),
            solver,
            field,
            dt,
            step: 0,
            regime,
            velocity_alpha_power: w,
            weight_integral: 0.0,
            max_weighted_v,
            work: StepWork::new(m),
        })
    }

    pub fn advance(&mut self, n_steps: u64) -> Result<()> {
        let w = self.velocity_alpha_power;
        for _ in 0..n_steps {
            let a_old = self.field.alpha();
            self.solver
                .step_with(&mut self.field, self.dt, &mut self.work)?;
            self.step += 1;
            self.field.t = self.step as f64 * self.dt;
            self.field.alpha_state.t = self.field.t;
            let a_new = self.field.alpha();
            self.weight_integral += 0.5 * self.dt * (a_old.powf(-w) + a_new.powf(-w));
            let aw = a_new.powf(w);
            for (m, v) in self.max_weighted_v.iter_mut().zip(&self.field.v) {
                *m = m.max(aw * v.abs());
            }
        }
        Ok(())
    }

    pub fn sample(&self) -> Result<OutputSample> {
        let f = &self.field;
        let g = &f.grid;
        let sup = |x: &[f64]| x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let aw = f.alpha().powf(self.velocity_alpha_power);
        let sup_v = sup(&f.v);
        let sup_deta = sup(&f.deta);
        let vx = g.derivative(&f.v);
        let dx = g.derivative(&f.deta);
        let energy = energy(f, self.regime, Some(self.velocity_alpha_power))?;
        let w1inf_v = aw * sup_v.max(sup(&vx));
        let w1inf_d = sup_deta.max(sup(&dx));
        let mut ft_ratio: f64 = 0.0;
        for i in 0..f.deta.len() {
            let lhs = (f.deta[i] - self.deta0[i]).abs();
            let bound = self.weight_integral * self.max_weighted_v[i];
            if lhs > 0.0 {
                ft_ratio = ft_ratio.max(if bound > 0.0 {
                    lhs / bound
                } else {
                    f64::INFINITY
                });
            }
        }
        Ok(OutputSample {
            step: self.step,
            t: f.t,
            alpha: f.alpha(),
            alphadot: f.alphadot(),
            sup_v,
            sup_deta,
            sup_weighted_v: aw * sup_v,
            e_proxy: energy.total + w1inf_v * w1inf_v + w1inf_d * w1inf_d,
            guard_deviation: sup(&dx),
            ft_ratio,
            energy,
        })
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            gamma: self.field.gamma,
            n: self.field.grid.n,
            family: self.field.grid.family,
            cfl: self.solver.cfl,
            filter: self.solver.filtered(),
            alphadot0: self.alphadot0,
            velocity_alpha_power: self.velocity_alpha_power,
            step: self.step,
            dt: self.dt,
            alpha: self.field.alpha(),
            alphadot: self.field.alphadot(),
            weight_integral: self.weight_integral,
            deta: self.field.deta.clone(),
            v: self.field.v.clone(),
            deta0: self.deta0.clone(),
            max_weighted_v: self.max_weighted_v.clone(),
        }
    }

    pub fn from_snapshot(s: &Snapshot) -> Result<Self> {
        let grid = Arc::new(Grid1d::new(s.family, s.n, s.gamma)?);
        let m = grid.len();
        for (name, len) in [
            ("deta", s.deta.len()),
            ("v", s.v.len()),
            ("deta0", s.deta0.len()),
            ("max_weighted_v", s.max_weighted_v.len()),
        ] {
            if len != m {
                return Err(Error::Domain(format!(
                    "snapshot field {name} has {len} values for {m} nodes"
                )));
            }
        }
        let solver = Solver1d::new(Arc::clone(&grid), s.cfl).with_filter(s.filter);
        let mut field = PerturbationField1D::new(grid, s.v.clone(), s.alphadot0)?;
        field.deta = s.deta.clone();
        field.alpha_state.alpha = s.alpha;
        field.alpha_state.alphadot = s.alphadot;
        field.t = s.step as f64 * s.dt;
        field.alpha_state.t = field.t;
        let regime = Regime::for_gamma(s.gamma)?;
        Ok(Self {
            solver,
            field,
            dt: s.dt,
            step: s.step,
            regime,
            velocity_alpha_power: s.velocity_alpha_power,
            alphadot0: s.alphadot0,
            deta0: s.deta0.clone(),
            weight_integral: s.weight_integral,
            max_weighted_v: s.max_weighted_v.clone(),
            work: StepWork::new(m),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerturbationKind {
    /// `ε sin(mode·πx)`
    Fourier,
    /// `ε (1 - x²)²`
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub kind: PerturbationKind,
    pub amplitude: f64,
    #[serde(default = "one_usize")]
    pub mode: usize,
}

fn one_usize() -> usize {
    1
}

impl Perturbation {
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            PerturbationKind::Fourier => self.amplitude * (self.mode as f64 * PI * x).sin(),
            PerturbationKind::Bump => self.amplitude * (1.0 - x * x).powi(2),
        }
    }
}

fn default_cfl() -> f64 {
    0.5
}
fn default_alphadot0() -> f64 {
    1.0
}
fn default_growth() -> f64 {
    10.0
}
fn default_decay() -> f64 {
    0.25
}
fn default_budget() -> f64 {
    1.0
}
fn default_family() -> Family {
    Family::Jacobi
}

/// Velocity-perturbation experiment on the identity map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub gamma: f64,
    /// Number of intervals; the grid has `n_nodes + 1` points.
    pub n_nodes: usize,
    #[serde(default = "default_family")]
    pub family: Family,
    /// Fixed time step; the guarded CFL step is used when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub t_end: f64,
    #[serde(default = "default_alphadot0")]
    pub alphadot0: f64,
    pub perturbation: Perturbation,
    #[serde(default)]
    pub filter: bool,
    pub output_every: usize,
    /// PASS needs `max e(t) ≤ energy_growth_limit · e(0)`.
    #[serde(default = "default_growth")]
    pub energy_growth_limit: f64,
    /// PASS needs `‖v(·,T)‖_∞ < decay_fraction · max_t ‖v(·,t)‖_∞`.
    #[serde(default = "default_decay")]
    pub decay_fraction: f64,
    /// Largest admissible `e(0)`.
    #[serde(default = "default_budget")]
    pub energy_budget: f64,
    #[serde(default)]
    pub velocity_alpha_power: Option<f64>,
}

impl StabilityConfig {
    pub fn new(gamma: f64, n_nodes: usize, t_end: f64, perturbation: Perturbation) -> Self {
        Self {
            gamma,
            n_nodes,
            family: Family::Jacobi,
            dt: None,
            cfl: default_cfl(),
            t_end,
            alphadot0: default_alphadot0(),
            perturbation,
            filter: false,
            output_every: 1000,
            energy_growth_limit: default_growth(),
            decay_fraction: default_decay(),
            energy_budget: default_budget(),
            velocity_alpha_power: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        if !(self.gamma > 1.0) {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if !(self.t_end > 0.0) {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(self.cfl > 0.0) {
            return bad(format!("cfl must be positive, got {}", self.cfl));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        if self.output_every == 0 {
            return bad("output_every must be at least 1".into());
        }
        if !(self.perturbation.amplitude.is_finite()) {
            return bad("perturbation amplitude must be finite".into());
        }
        if !(self.alphadot0 >= 0.0) {
            return bad(format!(
                "alphadot0 must be nonnegative, got {}",
                self.alphadot0
            ));
        }
        Ok(())
    }

    pub fn build_run(&self) -> Result<Run1d> {
        self.validate()?;
        let grid = Arc::new(Grid1d::new(self.family, self.n_nodes, self.gamma)?);
        let solver = Solver1d::new(Arc::clone(&grid), self.cfl).with_filter(self.filter);
        let dt = self.dt.unwrap_or_else(|| solver.guarded_dt());
        let u0 = grid.sample(|x| self.perturbation.eval(x));
        let field = PerturbationField1D::new(grid, u0, self.alphadot0)?;
        Run1d::new(solver, field, dt, self.velocity_alpha_power)
    }

    pub fn total_steps(&self, dt: f64) -> u64 {
        (self.t_end / dt - 1e-9).ceil().max(0.0) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardEvent {
    pub t: f64,
    pub node: usize,
    pub x: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityOutcome {
    pub samples: Vec<OutputSample>,
    pub dt: f64,
    pub verdict: Verdict,
    pub blow_up: Option<GuardEvent>,
    pub max_energy_ratio: f64,
    pub final_velocity_fraction: f64,
    pub max_guard_deviation: f64,
    pub max_ft_ratio: f64,
}

/// Advances `run` to step `total_steps`, sampling every `output_every` steps and at the end.
pub fn run_until(
    run: &mut Run1d,
    total_steps: u64,
    output_every: usize,
    mut on_sample: impl FnMut(&OutputSample),
) -> Result<(Vec<OutputSample>, Option<GuardEvent>)> {
    let every = output_every.max(1) as u64;
    let mut samples = Vec::new();
    if run.step == 0 {
        let s = run.sample()?;
        on_sample(&s);
        samples.push(s);
    }
    while run.step < total_steps {
        let next = ((run.step / every + 1) * every).min(total_steps);
        if let Err(e) = run.advance(next - run.step) {
            return match e {
                Error::Guard {
                    t,
                    node,
                    x,
                    deviation,
                    ..
                } => Ok((
                    samples,
                    Some(GuardEvent {
                        t,
                        node,
                        x,
                        deviation,
                    }),
                )),
                other => Err(other),
            };
        }
        let s = run.sample()?;
        on_sample(&s);
        samples.push(s);
    }
    Ok((samples, None))
}

/// Verdict over a sample series: bounded energy growth, decaying velocity, no guard trip.
pub fn assess(
    samples: &[OutputSample],
    blow_up: &Option<GuardEvent>,
    cfg: &StabilityConfig,
    dt: f64,
) -> StabilityOutcome {
    let e0 = samples.first().map_or(0.0, |s| s.energy.total);
    let emax = samples.iter().map(|s| s.energy.total).fold(0.0, f64::max);
    let max_energy_ratio = if e0 > 0.0 {
        emax / e0
    } else if emax == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let vmax = samples.iter().map(|s| s.sup_v).fold(0.0, f64::max);
    let vend = samples.last().map_or(0.0, |s| s.sup_v);
    let final_velocity_fraction = if vmax > 0.0 { vend / vmax } else { 0.0 };
    let max_guard_deviation = samples
        .iter()
        .map(|s| s.guard_deviation)
        .fold(0.0, f64::max);
    let max_ft_ratio = samples.iter().map(|s| s.ft_ratio).fold(0.0, f64::max);
    let ok = blow_up.is_none()
        && max_energy_ratio <= cfg.energy_growth_limit
        && (vmax == 0.0 || final_velocity_fraction < cfg.decay_fraction)
        && max_ft_ratio <= 1.0 + 1e-6;
    StabilityOutcome {
        samples: samples.to_vec(),
        dt,
        verdict: Verdict::from_bool(ok),
        blow_up: blow_up.clone(),
        max_energy_ratio,
        final_velocity_fraction,
        max_guard_deviation,
        max_ft_ratio,
    }
}

pub fn run_stability_experiment(cfg: &StabilityConfig) -> Result<StabilityOutcome> {
    let mut run = cfg.build_run()?;
    let e0 = run.sample()?.energy.total;
    if e0 > cfg.energy_budget {
        return Err(Error::Precondition(format!(
            "initial energy {e0:e} exceeds the configured budget {:e}",
            cfg.energy_budget
        )));
    }
    let total = cfg.total_steps(run.dt);
    let (samples, blow_up) = run_until(&mut run, total, cfg.output_every, |_| {})?;
    Ok(assess(&samples, &blow_up, cfg, run.dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_keeps_low_modes() {
        let n = 20;
        let f = chebyshev_filter(n);
        let g = Grid1d::chebyshev(n, 2.0).unwrap();
        let p = g.sample(|x| 1.0 + x - 3.0 * x.powi(4));
        let q = f.apply_vec(&p);
        for (a, b) in p.iter().zip(&q) {
            assert!((a - b).abs() < 1e-12);
        }
        // T_N is strongly damped
        let tn = g.sample(|x| (n as f64 * x.acos()).cos());
        let q = f.apply_vec(&tn);
        assert!(q.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let grid = Arc::new(Grid1d::chebyshev(16, 2.0).unwrap());
        let s = Solver1d::new(Arc::clone(&grid), 0.5);
        let mut f = PerturbationField1D::zero(grid, 1.0).unwrap();
        let b = s.cfl_bound(&f);
        assert!(matches!(s.step(&mut f, 2.0 * b), Err(Error::Cfl { .. })));
        s.step(&mut f, b).unwrap();
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = StabilityConfig::new(
            2.0,
            32,
            5.0,
            Perturbation {
                kind: PerturbationKind::Fourier,
                amplitude: 1e-3,
                mode: 1,
            },
        );
        let s = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<StabilityConfig>(&s).unwrap(), cfg);
    }
}
