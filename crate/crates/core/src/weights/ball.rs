//! Product quadrature on the unit ball: radial Gauss–Jacobi times Gauss–Legendre in `cos θ`
//! times a uniform rule in `φ`.

use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_jacobi, gauss_legendre};
use super::DistanceWeight;
use crate::error::{Error, Result};

/// Quadrature nodes and weights (weights include any `d^s` factor).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRule {
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl BallRule {
    pub fn integrate(&self, f: impl Fn(&[f64; 3]) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct BallGrid {
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub weight: DistanceWeight,
    pub nodes: Vec<[f64; 3]>,
    pub quad_weights: Vec<f64>,
    pub d_values: Vec<f64>,
    pub h: f64,
}

fn angular(n_theta: usize, n_phi: usize) -> Result<Vec<([f64; 3], f64)>> {
    let gl = gauss_legendre(n_theta)?;
    let mut out = Vec::with_capacity(n_theta * n_phi);
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    for (ct, wt) in gl.nodes.iter().zip(&gl.weights) {
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        for k in 0..n_phi {
            let phi = (k as f64 + 0.5) * dphi;
            out.push(([st * phi.cos(), st * phi.sin(), *ct], wt * dphi));
        }
    }
    Ok(out)
}

impl BallGrid {
    /// `n` radial nodes, `n` polar nodes and `2n` azimuthal nodes. `scale` is `S₁S₂S₃`.
    pub fn new(n: usize, scale: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Resolution(format!(
                "ball grid needs n >= 2, got {n}"
            )));
        }
        if !(scale > 0.0) {
            return Err(Error::Domain(format!(
                "weight scale must be positive, got {scale}"
            )));
        }
        let weight = DistanceWeight::Ball { scale };
        let rule = Self::rule_for(n, n, 2 * n, 0.0, &weight)?;
        let d_values = rule
            .nodes
            .iter()
            .map(|x| weight.eval(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]))
            .collect();
        Ok(Self {
            n_r: n,
            n_theta: n,
            n_phi: 2 * n,
            weight,
            nodes: rule.nodes,
            quad_weights: rule.weights,
            d_values,
            h: 1.0 / n as f64,
        })
    }

    fn rule_for(
        n_r: usize,
        n_theta: usize,
        n_phi: usize,
        s: f64,
        weight: &DistanceWeight,
    ) -> Result<BallRule> {
        // r = (1+t)/2: r² dr = (1+t)²/8 dt and (1 - r) = (1 - t)/2
        let radial = gauss_jacobi(n_r, s, 2.0)?;
        let ang = angular(n_theta, n_phi)?;
        let c = weight.coefficient();
        let mut nodes = Vec::with_capacity(n_r * ang.len());
        let mut weights = Vec::with_capacity(n_r * ang.len());
        for (t, wr) in radial.nodes.iter().zip(&radial.weights) {
            let r = 0.5 * (1.0 + t);
            let radial_w = wr / 8.0 * (0.5 * c * (1.0 + r)).powf(s);
            for (dir, wa) in &ang {
                nodes.push([r * dir[0], r * dir[1], r * dir[2]]);
                weights.push(radial_w * wa);
            }
        }
        Ok(BallRule { nodes, weights })
    }

    /// Rule for `∫_B d^s f`, with the `(1 - r)^s` factor absorbed by the radial Jacobi weight.
    pub fn weighted_rule(&self, s: f64) -> Result<BallRule> {
        Self::rule_for(self.n_r, self.n_theta, self.n_phi, s, &self.weight)
    }

    pub fn grid_id(&self) -> String {
        format!("ball-n{}x{}x{}", self.n_r, self.n_theta, self.n_phi)
    }
}
