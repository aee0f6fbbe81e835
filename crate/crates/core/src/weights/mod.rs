//! Grids carrying the distance weight `d`, weighted quadrature, and numerical checks of the
//! weighted embedding, Hardy and mollifier inequalities.

pub mod ball;
pub mod diff;
pub mod mollify;
pub mod norms;
pub mod quadrature;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use diff::{
    barycentric_row, barycentric_weights, chebyshev_diff_matrix, chebyshev_nodes, fd4_derivative,
    Matrix,
};
use quadrature::{clenshaw_curtis_weights, gauss_jacobi, simpson_weights};

pub use ball::BallGrid;
pub use mollify::{mollifier_growth, mollify_initial_data, MollifierGrowth};
pub use norms::{
    embedding_check, embedding_refinement, fractional_norm, hardy_check, hardy_refinement,
    norm_report, weighted_norm, EmbeddingReport, FractionalNorm, HardyReport, NormReport,
    RefinementStudy, WeightedNormSpec,
};

/// The distance-like weight `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistanceWeight {
    /// `((γ-1)/(2γ)) (1 - x²)` on `(-1, 1)`.
    Interval { gamma: f64 },
    /// `(scale/4) (1 - |x|²)` on the unit ball; `scale = S₁S₂S₃` for stretched affine flows.
    Ball { scale: f64 },
}

impl DistanceWeight {
    pub fn interval(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::Domain(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self::Interval { gamma })
    }

    pub fn unit_ball() -> Self {
        Self::Ball { scale: 1.0 }
    }

    /// `(γ-1)/(2γ)` on the interval, `scale/4` on the ball.
    pub fn coefficient(&self) -> f64 {
        match *self {
            Self::Interval { gamma } => (gamma - 1.0) / (2.0 * gamma),
            Self::Ball { scale } => 0.25 * scale,
        }
    }

    pub fn eval(&self, r2: f64) -> f64 {
        self.coefficient() * (1.0 - r2)
    }

    pub fn d(&self, x: f64) -> f64 {
        self.eval(x * x)
    }

    pub fn d_x(&self, x: f64) -> f64 {
        -2.0 * self.coefficient() * x
    }

    pub fn d_xx(&self) -> f64 {
        -2.0 * self.coefficient()
    }

    /// Gradient of the ball weight: `-(scale/2) x`.
    pub fn grad(&self, x: &[f64; 3]) -> [f64; 3] {
        let c = -2.0 * self.coefficient();
        [c * x[0], c * x[1], c * x[2]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Chebyshev–Gauss–Lobatto collocation with Gauss–Jacobi quadrature per weight exponent.
    Jacobi,
    /// Equispaced nodes, fourth-order differences, composite Simpson.
    Uniform,
}

/// Structured-text grid description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: u8,
    pub family: Family,
    pub n: usize,
    pub gamma: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<WeightedGrid> {
        match self.dim {
            1 => Ok(WeightedGrid::Interval(Grid1d::new(
                self.family,
                self.n,
                self.gamma,
            )?)),
            3 => Ok(WeightedGrid::Ball(BallGrid::new(self.n, 1.0)?)),
            d => Err(Error::Domain(format!(
                "grid dimension must be 1 or 3, got {d}"
            ))),
        }
    }
}

/// Cached quadrature for `∫ d^s f`: nodes, weights already multiplied by `d^s`, and the
/// interpolation rows taking nodal values to the quadrature nodes.
#[derive(Debug)]
pub struct WeightedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    interp: Vec<Vec<f64>>,
}

impl WeightedRule {
    pub fn sample(&self, values: &[f64]) -> Vec<f64> {
        self.interp
            .iter()
            .map(|row| row.iter().zip(values).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// One-dimensional grid on `[-1, 1]`.
#[derive(Debug)]
pub struct Grid1d {
    pub family: Family,
    /// Number of intervals; there are `n + 1` nodes.
    pub n: usize,
    pub gamma: f64,
    pub weight: DistanceWeight,
    pub nodes: Vec<f64>,
    pub quad_weights: Vec<f64>,
    pub d_values: Vec<f64>,
    pub h: f64,
    dmat: Option<Matrix>,
    bary: Vec<f64>,
    rules: Mutex<HashMap<u64, Arc<WeightedRule>>>,
}

impl Clone for Grid1d {
    fn clone(&self) -> Self {
        Self {
            family: self.family,
            n: self.n,
            gamma: self.gamma,
            weight: self.weight,
            nodes: self.nodes.clone(),
            quad_weights: self.quad_weights.clone(),
            d_values: self.d_values.clone(),
            h: self.h,
            dmat: self.dmat.clone(),
            bary: self.bary.clone(),
            rules: Mutex::new(HashMap::new()),
        }
    }
}

impl Grid1d {
    pub fn new(family: Family, n: usize, gamma: f64) -> Result<Self> {
        let weight = DistanceWeight::interval(gamma)?;
        match family {
            Family::Jacobi => {
                if n < 2 {
                    return Err(Error::Resolution(format!(
                        "spectral grid needs n >= 2, got {n}"
                    )));
                }
                let nodes = chebyshev_nodes(n);
                let quad_weights = clenshaw_curtis_weights(n);
                let d_values = nodes.iter().map(|x| weight.d(*x)).collect();
                Ok(Self {
                    family,
                    n,
                    gamma,
                    weight,
                    nodes,
                    quad_weights,
                    d_values,
                    h: 2.0 / n as f64,
                    dmat: Some(chebyshev_diff_matrix(n)),
                    bary: barycentric_weights(n),
                    rules: Mutex::new(HashMap::new()),
                })
            }
            Family::Uniform => {
                if n < 4 || n % 2 != 0 {
                    return Err(Error::Resolution(format!(
                        "uniform grid needs an even n >= 4, got {n}"
                    )));
                }
                let h = 2.0 / n as f64;
                let nodes: Vec<f64> = (0..=n).map(|j| -1.0 + j as f64 * h).collect();
                let d_values = nodes.iter().map(|x| weight.d(*x)).collect();
                Ok(Self {
                    family,
                    n,
                    gamma,
                    weight,
                    quad_weights: simpson_weights(n, h)?,
                    nodes,
                    d_values,
                    h,
                    dmat: None,
                    bary: Vec::new(),
                    rules: Mutex::new(HashMap::new()),
                })
            }
        }
    }

    pub fn chebyshev(n: usize, gamma: f64) -> Result<Self> {
        Self::new(Family::Jacobi, n, gamma)
    }

    pub fn uniform(n: usize, gamma: f64) -> Result<Self> {
        Self::new(Family::Uniform, n, gamma)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn grid_id(&self) -> String {
        let fam = match self.family {
            Family::Jacobi => "jacobi",
            Family::Uniform => "uniform",
        };
        format!("interval-{fam}-n{}-gamma{}", self.n, self.gamma)
    }

    /// Smallest node spacing.
    pub fn h_min(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Highest derivative order the differentiation rule supports.
    pub fn max_derivative(&self) -> usize {
        match self.family {
            Family::Jacobi => self.n,
            Family::Uniform => 4,
        }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|x| f(*x)).collect()
    }

    pub fn derivative_into(&self, f: &[f64], out: &mut [f64]) {
        match &self.dmat {
            Some(d) => d.apply(f, out),
            None => out.copy_from_slice(&fd4_derivative(f, self.h)),
        }
    }

    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        self.derivative_into(f, &mut out);
        out
    }

    /// `[f, f', …, f^{(k)}]`.
    pub fn derivatives(&self, f: &[f64], k: usize) -> Result<Vec<Vec<f64>>> {
        if k > self.max_derivative() {
            return Err(Error::Resolution(format!(
                "{k} derivatives requested but {} supports at most {}",
                self.grid_id(),
                self.max_derivative()
            )));
        }
        let mut out = Vec::with_capacity(k + 1);
        out.push(f.to_vec());
        for b in 0..k {
            let next = self.derivative(&out[b]);
            out.push(next);
        }
        Ok(out)
    }

    /// Value at `t` of the grid's interpolant of `values`.
    pub fn interpolate(&self, values: &[f64], t: f64) -> f64 {
        match self.family {
            Family::Jacobi => barycentric_row(&self.nodes, &self.bary, t)
                .iter()
                .zip(values)
                .map(|(a, b)| a * b)
                .sum(),
            Family::Uniform => {
                // local cubic Lagrange interpolation
                let s = ((t + 1.0) / self.h).clamp(0.0, self.n as f64);
                let i0 = (s.floor() as isize - 1).clamp(0, self.n as isize - 3) as usize;
                let mut acc = 0.0;
                for j in i0..i0 + 4 {
                    let mut l = 1.0;
                    for m in i0..i0 + 4 {
                        if m != j {
                            l *= (t - self.nodes[m]) / (self.nodes[j] - self.nodes[m]);
                        }
                    }
                    acc += l * values[j];
                }
                acc
            }
        }
    }

    /// Quadrature for `∫ d^s (·)` with `s > -1`.
    pub fn weighted_rule(&self, s: f64) -> Result<Arc<WeightedRule>> {
        if !(s > -1.0) {
            return Err(Error::Domain(format!(
                "weight exponent must exceed -1, got {s}"
            )));
        }
        let key = s.to_bits();
        if let Some(r) = self.rules.lock().expect("rule cache poisoned").get(&key) {
            return Ok(Arc::clone(r));
        }
        let rule = match self.family {
            Family::Jacobi => {
                // d^s = c^s (1-x)^s (1+x)^s: exact for the polynomial integrands of degree 2N
                let gj = gauss_jacobi(self.n + 2, s, s)?;
                let c = self.weight.coefficient().powf(s);
                let interp = gj
                    .nodes
                    .iter()
                    .map(|t| barycentric_row(&self.nodes, &self.bary, *t))
                    .collect();
                WeightedRule {
                    weights: gj.weights.iter().map(|w| w * c).collect(),
                    nodes: gj.nodes,
                    interp,
                }
            }
            Family::Uniform => {
                if s < 0.0 {
                    return Err(Error::Resolution(
                        "negative weight exponents need the jacobi family (d vanishes at the end nodes)".into(),
                    ));
                }
                let weights = self
                    .quad_weights
                    .iter()
                    .zip(&self.d_values)
                    .map(|(w, d)| if s == 0.0 { *w } else { w * d.powf(s) })
                    .collect();
                let m = self.len();
                let interp = (0..m)
                    .map(|i| {
                        let mut row = vec![0.0; m];
                        row[i] = 1.0;
                        row
                    })
                    .collect();
                WeightedRule {
                    nodes: self.nodes.clone(),
                    weights,
                    interp,
                }
            }
        };
        let rule = Arc::new(rule);
        self.rules
            .lock()
            .expect("rule cache poisoned")
            .insert(key, Arc::clone(&rule));
        Ok(rule)
    }

    /// `∫ d^s |f|²`.
    pub fn weighted_l2_sq(&self, f: &[f64], s: f64) -> Result<f64> {
        let rule = self.weighted_rule(s)?;
        Ok(rule
            .sample(f)
            .iter()
            .zip(&rule.weights)
            .map(|(v, w)| w * v * v)
            .sum())
    }

    /// `Σ_{b≤k} ∫ d^s |∂^b f|²`.
    pub fn weighted_hk_sq(&self, f: &[f64], k: usize, s: f64) -> Result<f64> {
        let ders = self.derivatives(f, k)?;
        ders.iter().map(|g| self.weighted_l2_sq(g, s)).sum()
    }
}

/// Interval or ball sample set.
#[derive(Debug, Clone)]
pub enum WeightedGrid {
    Interval(Grid1d),
    Ball(BallGrid),
}

impl WeightedGrid {
    pub fn dim(&self) -> u8 {
        match self {
            Self::Interval(_) => 1,
            Self::Ball(_) => 3,
        }
    }
    pub fn quad_weights(&self) -> &[f64] {
        match self {
            Self::Interval(g) => &g.quad_weights,
            Self::Ball(g) => &g.quad_weights,
        }
    }
    pub fn d_values(&self) -> &[f64] {
        match self {
            Self::Interval(g) => &g.d_values,
            Self::Ball(g) => &g.d_values,
        }
    }
    pub fn h(&self) -> f64 {
        match self {
            Self::Interval(g) => g.h,
            Self::Ball(g) => g.h,
        }
    }
    pub fn grid_id(&self) -> String {
        match self {
            Self::Interval(g) => g.grid_id(),
            Self::Ball(g) => g.grid_id(),
        }
    }
    pub fn len(&self) -> usize {
        self.quad_weights().len()
    }
    pub fn is_empty(&self) -> bool {
        self.quad_weights().is_empty()
    }
}

impl From<Grid1d> for WeightedGrid {
    fn from(g: Grid1d) -> Self {
        Self::Interval(g)
    }
}

impl From<BallGrid> for WeightedGrid {
    fn from(g: BallGrid) -> Self {
        Self::Ball(g)
    }
}

/// Worst violations of the interval weight identities over the nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceIdentityReport {
    /// `max(|d_x| - (γ-1)/γ, 0)`
    pub slope_excess: f64,
    /// `max |d_xx + (γ-1)/γ|`
    pub curvature_deviation: f64,
    /// `max |x + (γ/(γ-1)) d_x|`
    pub cancellation: f64,
}

pub fn distance_identities(grid: &Grid1d) -> DistanceIdentityReport {
    let g = grid.gamma;
    let bound = (g - 1.0) / g;
    let mut r = DistanceIdentityReport {
        slope_excess: 0.0,
        curvature_deviation: 0.0,
        cancellation: 0.0,
    };
    for &x in &grid.nodes {
        let dx = grid.weight.d_x(x);
        r.slope_excess = r.slope_excess.max(dx.abs() - bound).max(0.0);
        r.curvature_deviation = r
            .curvature_deviation
            .max((grid.weight.d_xx() + bound).abs());
        r.cancellation = r.cancellation.max((x + g / (g - 1.0) * dx).abs());
    }
    r
}
