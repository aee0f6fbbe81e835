//! Three-dimensional Lagrangian geometry: cofactor and Jacobian calculus, the Lagrangian
//! gradient, divergence and curl, the tangential operator `∂̄ = x × ∇`, identity checks on
//! sampled and analytic fields, the curl transport law and the weighted 3-d energies.
//!
//! Gradients are stored as `grad[k][i] = ∂_k F^i`. With that layout `a = cof(grad)` holds
//! `a^k_i` at `[k][i]`, and `A = grad^{-T}` holds `A^k_i` at `[k][i]`.

pub mod cube;
pub mod curl;
pub mod energy;
pub mod field;
pub mod identities;
pub mod jet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cross, Mat3, PermutationSymbol, Vec3};
use crate::report::{CheckReport, Verdict};

pub use curl::{
    curl_transport_check, curl_transport_study, general_affine_curl_check,
    general_affine_curl_study, CurlTransportReport, GeneralCurlReport,
};
pub use energy::{energy3d_eval, energy3d_terms, Energy3dReport, EnergyTerm3d, TermKind3d};
pub use field::{random_points, Family3, Field3, FourierField, Poly3, ScalarField3, VecPoly3};
pub use identities::{
    cofactor_linearization_check, lemma_aenergy_check, lemma_aenergy_sides, lemma_aenergy_study,
    lemma_atan_check, lemma_tan_check, piola_check, spatial_identities_check,
    tangential_derivative, tangential_gradient, time_identities_check, time_identities_study,
    IdentityOutcome,
};

/// Rows are `η,₂×η,₃`, `η,₃×η,₁`, `η,₁×η,₂`; defined for singular input too.
pub fn cofactor(grad: &Mat3<f64>) -> Mat3<f64> {
    grad.cofactor()
}

/// `∂̄ f = x × ∇f` for a scalar with gradient `g`.
pub fn tangential(x: &Vec3<f64>, g: &Vec3<f64>) -> Vec3<f64> {
    cross(x, g)
}

/// Norm used by the `‖∇δη‖_∞ ≤ ϑ` guard: the larger of the row-sum and column-sum norms, so
/// it bounds both `G` and `Gᵀ` in a submultiplicative norm.
pub fn guard_norm(g: &Mat3<f64>) -> f64 {
    g.norm_inf().max(g.transpose().norm_inf())
}

/// `J` range implied by the guard: `[(1-ϑ)³, (1+ϑ)³]`.
pub fn jacobian_range(theta: f64) -> (f64, f64) {
    ((1.0 - theta).powi(3), (1.0 + theta).powi(3))
}

/// `‖A - I‖ ≤ ϑ/(1-ϑ)` under the guard.
pub fn inverse_deviation_bound(theta: f64) -> f64 {
    theta / (1.0 - theta)
}

/// Derived quantities at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeGeometry {
    pub grad: Mat3<f64>,
    pub a: Mat3<f64>,
    /// `A = (∇η)^{-1}` stored as `A^k_i` at `[k][i]`.
    pub inv: Mat3<f64>,
    pub jac: f64,
}

impl NodeGeometry {
    pub fn new(grad: Mat3<f64>) -> Result<Self> {
        let jac = grad.det();
        if !(jac > 0.0) {
            return Err(Error::Domain(format!(
                "Jacobian must be positive, got {jac:e}"
            )));
        }
        let a = grad.cofactor();
        Ok(Self {
            grad,
            a,
            inv: a.scale(1.0 / jac),
            jac,
        })
    }

    /// `P[k][j] = W^k,_r A^r_j` from `hw[r][k] = W^k,_r`.
    pub fn lagrangian_grad(&self, hw: &Mat3<f64>) -> Mat3<f64> {
        lagrangian_grad(&self.inv, hw)
    }
}

pub fn lagrangian_grad(inv: &Mat3<f64>, hw: &Mat3<f64>) -> Mat3<f64> {
    Mat3::from_fn(|k, j| (0..3).map(|r| hw[(r, k)] * inv[(r, j)]).sum())
}

/// `div_η W = tr P`
pub fn div_eta(p: &Mat3<f64>) -> f64 {
    p.trace()
}

/// `[curl_η W]_i = ε_{ijk} P[k][j]`
pub fn curl_eta(p: &Mat3<f64>) -> Vec3<f64> {
    let mut c = [0.0; 3];
    for (i, ci) in c.iter_mut().enumerate() {
        for j in 0..3 {
            for k in 0..3 {
                *ci += PermutationSymbol::value::<f64>(i, j, k) * p[(k, j)];
            }
        }
    }
    c
}

/// Plain curl from `grad[k][i] = ∂_k W^i`.
pub fn curl(grad: &Mat3<f64>) -> Vec3<f64> {
    [
        grad[(1, 2)] - grad[(2, 1)],
        grad[(2, 0)] - grad[(0, 2)],
        grad[(0, 1)] - grad[(1, 0)],
    ]
}

/// `η` sampled at nodes with its derived caches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorField3D {
    pub label: String,
    pub nodes: Vec<Vec3<f64>>,
    pub geometry: Vec<NodeGeometry>,
}

impl TensorField3D {
    pub fn from_field(f: &dyn Field3, nodes: Vec<Vec3<f64>>) -> Result<Self> {
        let geometry = nodes
            .iter()
            .map(|x| NodeGeometry::new(f.gradient(x)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            label: f.describe(),
            nodes,
            geometry,
        })
    }

    /// Largest `guard_norm(∇η - I)` over the nodes.
    pub fn guard_deviation(&self) -> f64 {
        self.geometry
            .iter()
            .map(|g| guard_norm(&(g.grad - Mat3::identity())))
            .fold(0.0, f64::max)
    }
}

/// `v` sampled at the nodes of its `η` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityField3D {
    pub grad_v: Vec<Mat3<f64>>,
}

impl VelocityField3D {
    pub fn from_field(v: &dyn Field3, eta: &TensorField3D) -> Self {
        Self {
            grad_v: eta.nodes.iter().map(|x| v.gradient(x)).collect(),
        }
    }

    pub fn curl_eta(&self, eta: &TensorField3D) -> Result<Vec<Vec3<f64>>> {
        if self.grad_v.len() != eta.geometry.len() {
            return Err(Error::Domain(
                "velocity and eta sampled on different node sets".into(),
            ));
        }
        Ok(self
            .grad_v
            .iter()
            .zip(&eta.geometry)
            .map(|(h, g)| curl_eta(&g.lagrangian_grad(h)))
            .collect())
    }

    pub fn div_eta(&self, eta: &TensorField3D) -> Result<Vec<f64>> {
        if self.grad_v.len() != eta.geometry.len() {
            return Err(Error::Domain(
                "velocity and eta sampled on different node sets".into(),
            ));
        }
        Ok(self
            .grad_v
            .iter()
            .zip(&eta.geometry)
            .map(|(h, g)| div_eta(&g.lagrangian_grad(h)))
            .collect())
    }
}

/// Largest `|J - ⅓ η^r,_s a^s_r| / max|J|` over the nodes.
pub fn jacobian_identity_check(field: &TensorField3D) -> CheckReport {
    let scale = field
        .geometry
        .iter()
        .map(|g| g.jac.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let dev = field
        .geometry
        .iter()
        .map(|g| (g.jac - g.grad.frobenius_dot(&g.a) / 3.0).abs())
        .fold(0.0, f64::max)
        / scale;
    CheckReport {
        check_name: "jacobian_identity".into(),
        field_spec: field.label.clone(),
        resolutions: vec![field.nodes.len() as f64],
        deviations: vec![dev],
        fitted_order: None,
        verdict: Verdict::from_bool(dev <= 1e-10),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cofactor_examples() {
        assert_eq!(cofactor(&Mat3::identity()), Mat3::identity());
        let d = Mat3::from_diag([2.0, 3.0, 4.0]);
        assert_eq!(cofactor(&d), Mat3::from_diag([12.0, 8.0, 6.0]));
        let m = Mat3::new([[1.0, 0.2, -0.3], [0.4, 2.0, 0.1], [-0.5, 0.3, 1.5]]);
        let oracle = m.inverse_transpose().unwrap().scale(m.det());
        assert!((cofactor(&m) - oracle).max_abs() < 1e-12 * oracle.max_abs());
    }

    #[test]
    fn jacobian_identity_on_diagonal_map() {
        let f = FourierField::linear(Mat3::from_diag([2.0, 3.0, 4.0]), "diag(2,3,4)");
        let t = TensorField3D::from_field(&f, vec![[0.1, 0.2, 0.3]]).unwrap();
        assert_eq!(t.geometry[0].jac, 24.0);
        let r = jacobian_identity_check(&t);
        assert_eq!(r.deviations[0], 0.0);
    }

    #[test]
    fn lagrangian_operators_of_the_identity() {
        let g = NodeGeometry::new(Mat3::identity()).unwrap();
        // W = ω × x has curl 2ω and no divergence
        let w = FourierField::rotation([0.3, -0.1, 0.7]);
        let p = g.lagrangian_grad(&w.gradient(&[0.0; 3]));
        let c = curl_eta(&p);
        assert!(
            (c[0] - 0.6).abs() < 1e-15 && (c[1] + 0.2).abs() < 1e-15 && (c[2] - 1.4).abs() < 1e-15
        );
        assert_eq!(div_eta(&p), 0.0);
        assert_eq!(curl(&w.gradient(&[0.0; 3])), c);
    }
}
