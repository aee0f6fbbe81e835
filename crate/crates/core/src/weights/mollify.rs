//! Mollification `u₀^κ = ρ_{1/|ln κ|} * E(u₀)` with a C² reflection extension past `±1`.

use serde::{Deserialize, Serialize};

use super::quadrature::gauss_legendre;
use super::Grid1d;
use crate::error::{Error, Result};

/// Largest admissible `κ`: the reflection extension reaches `2/3` beyond each end.
pub const KAPPA_MAX: f64 = 0.22313016014842982; // e^{-3/2}

const KERNEL_POINTS: usize = 96;

/// Hestenes-type reflection, exact for quadratics: `u(1+s) ↦ 6u(1-s) - 8u(1-2s) + 3u(1-3s)`.
fn extended(grid: &Grid1d, u: &[f64], y: f64) -> f64 {
    if y > 1.0 {
        let s = y - 1.0;
        6.0 * grid.interpolate(u, 1.0 - s) - 8.0 * grid.interpolate(u, 1.0 - 2.0 * s)
            + 3.0 * grid.interpolate(u, 1.0 - 3.0 * s)
    } else if y < -1.0 {
        let s = -1.0 - y;
        6.0 * grid.interpolate(u, -1.0 + s) - 8.0 * grid.interpolate(u, -1.0 + 2.0 * s)
            + 3.0 * grid.interpolate(u, -1.0 + 3.0 * s)
    } else {
        grid.interpolate(u, y)
    }
}

pub fn mollify_initial_data(u0: &[f64], kappa: f64, grid: &Grid1d) -> Result<Vec<f64>> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Domain(format!(
            "kappa must lie in (0, 1), got {kappa}"
        )));
    }
    if kappa >= KAPPA_MAX {
        return Err(Error::Domain(format!(
            "kappa = {kappa} gives a kernel wider than the extension (need kappa < e^(-3/2))"
        )));
    }
    if u0.len() != grid.len() {
        return Err(Error::Domain(format!(
            "field has {} values for {} nodes",
            u0.len(),
            grid.len()
        )));
    }
    let eps = 1.0 / kappa.ln().abs();
    let rule = gauss_legendre(KERNEL_POINTS)?;
    let bump: Vec<f64> = rule
        .nodes
        .iter()
        .map(|z| (-1.0 / (1.0 - z * z)).exp())
        .collect();
    // unit mass with respect to the discrete rule, so constants are reproduced exactly
    let mass: f64 = bump.iter().zip(&rule.weights).map(|(b, w)| b * w).sum();
    let kw: Vec<f64> = bump
        .iter()
        .zip(&rule.weights)
        .map(|(b, w)| b * w / mass)
        .collect();
    Ok(grid
        .nodes
        .iter()
        .map(|x| {
            rule.nodes
                .iter()
                .zip(&kw)
                .map(|(z, w)| w * extended(grid, u0, x - eps * z))
                .sum()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierGrowth {
    pub kappas: Vec<f64>,
    /// `‖u₀^κ‖₂ / (|ln κ|² ‖u₀‖₀)`
    pub ratios: Vec<f64>,
    /// `‖u₀^κ - u₀‖₀`
    pub distances: Vec<f64>,
}

impl MollifierGrowth {
    /// Bounded when no ratio exceeds the one at the largest `κ` by more than 5%.
    pub fn bounded(&self) -> bool {
        match self.ratios.first() {
            Some(r0) => self.ratios.iter().all(|r| r.is_finite() && *r <= 1.05 * r0),
            None => true,
        }
    }
}

/// Norm growth of the mollified data over a decreasing sequence of `κ`.
pub fn mollifier_growth(u0: &[f64], kappas: &[f64], grid: &Grid1d) -> Result<MollifierGrowth> {
    let base = grid.weighted_hk_sq(u0, 0, 0.0)?.sqrt();
    let mut out = MollifierGrowth {
        kappas: kappas.to_vec(),
        ratios: Vec::new(),
        distances: Vec::new(),
    };
    for &k in kappas {
        let m = mollify_initial_data(u0, k, grid)?;
        let h2 = grid.weighted_hk_sq(&m, 2, 0.0)?.sqrt();
        out.ratios.push(h2 / (k.ln().powi(2) * base));
        let diff: Vec<f64> = m.iter().zip(u0).map(|(a, b)| a - b).collect();
        out.distances
            .push(grid.weighted_hk_sq(&diff, 0, 0.0)?.sqrt());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_preserved() {
        let g = Grid1d::chebyshev(24, 2.0).unwrap();
        let u = vec![2.5; 25];
        let m = mollify_initial_data(&u, (-4.0f64).exp(), &g).unwrap();
        assert!(m.iter().all(|v| (v - 2.5).abs() < 1e-13));
    }

    #[test]
    fn kappa_domain() {
        let g = Grid1d::chebyshev(8, 2.0).unwrap();
        let u = vec![0.0; 9];
        assert!(mollify_initial_data(&u, 1.0, &g).is_err());
        assert!(mollify_initial_data(&u, 0.0, &g).is_err());
        assert!(mollify_initial_data(&u, 0.5, &g).is_err());
    }

    #[test]
    fn extension_reproduces_quadratics() {
        let g = Grid1d::chebyshev(8, 2.0).unwrap();
        let u = g.sample(|x| 1.0 + x - 2.0 * x * x);
        for y in [1.1, 1.5, -1.3] {
            let e = extended(&g, &u, y);
            assert!((e - (1.0 + y - 2.0 * y * y)).abs() < 1e-12);
        }
    }
}
