//! Weighted higher-order energies on the unit ball for analytically differentiable `δη`, `v`.
//!
//! Every summand is `α^{2p} ∫_B d^s |∇^b ∂̄^a f|²` with `f` one of `δη`, `v`, `curl_η v`; the
//! `d^s` factor is absorbed into the radial Jacobi rule of [`BallGrid::weighted_rule`].
//! Derivatives come from Taylor jets, so the only error is quadrature.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::Field3;
use super::jet::{Jet, JetSpace};
use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::weights::BallGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind3d {
    /// `d^{q_b} ∇^b ∂̄^a δη`, `a + b ≤ K`
    Displacement,
    /// `α^{p_v} d^{q_b} ∇^b ∂̄^a v`, `a + b ≤ K`
    Velocity,
    /// `α^{p_top} d^{q_b} ∇^b ∂̄^{K+1-b} δη`, `1 ≤ b ≤ K+1`
    Top,
    /// `α^{p_c} d^{q'_b} ∇^b ∂̄^{K-b} curl_η v`, `0 ≤ b ≤ K`
    Curl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTerm3d {
    pub kind: TermKind3d,
    pub b: usize,
    pub a: usize,
    /// Exponent of `α` inside the norm (the summand carries `α^{2p}`).
    pub alpha_power: f64,
    /// Exponent `s` of the weight `d^s` in the integrand.
    pub weight_power: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Energy3dReport {
    pub k: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub regime: String,
    pub grid_id: String,
    pub terms: Vec<EnergyTerm3d>,
    pub total: f64,
}

struct Powers {
    velocity: f64,
    top: f64,
    curl: f64,
    regime: &'static str,
}

fn powers(gamma: f64, k: usize) -> Result<Powers> {
    if !(gamma > 1.0) {
        return Err(Error::Domain(format!("gamma must exceed 1, got {gamma}")));
    }
    if gamma == 2.0 {
        return Ok(Powers {
            velocity: 2.0,
            top: -0.5,
            curl: 2.0,
            regime: "gamma=2",
        });
    }
    if gamma > 5.0 / 3.0 {
        return Ok(Powers {
            velocity: 2.0,
            top: 0.5 * (3.0 - 5.0 * gamma),
            curl: 2.0,
            regime: "gamma>5/3",
        });
    }
    let k_min = (6.0 * gamma - 5.0) / (gamma - 1.0);
    if (k as f64) <= k_min {
        return Err(Error::Precondition(format!(
            "for gamma = {gamma} the energy needs K > {k_min:.4}, got K = {k}"
        )));
    }
    let p = 0.5 * (3.0 * gamma - 1.0);
    Ok(Powers {
        velocity: p,
        top: 0.0,
        curl: p,
        regime: "1<gamma<=5/3",
    })
}

/// Term list without values.
pub fn energy3d_terms(k: usize, gamma: f64) -> Result<Vec<EnergyTerm3d>> {
    let pw = powers(gamma, k)?;
    let g1 = gamma - 1.0;
    let s_first = |b: usize| b as f64 + 1.0 / g1;
    let s_curl = |b: usize| b as f64 + 2.0 / g1;
    let term = |kind, b, a, alpha_power, weight_power| EnergyTerm3d {
        kind,
        b,
        a,
        alpha_power,
        weight_power,
        value: 0.0,
    };
    let mut out = Vec::new();
    for b in 0..=k {
        for a in 0..=k - b {
            out.push(term(TermKind3d::Displacement, b, a, 0.0, s_first(b)));
            out.push(term(TermKind3d::Velocity, b, a, pw.velocity, s_first(b)));
        }
    }
    for b in 1..=k + 1 {
        out.push(term(TermKind3d::Top, b, k + 1 - b, pw.top, s_first(b)));
    }
    for b in 0..=k {
        out.push(term(TermKind3d::Curl, b, k - b, pw.curl, s_curl(b)));
    }
    Ok(out)
}

/// `Σ |∇^b ∂̄^a f|²` over all index sequences and components, from jets of `f`.
fn squared_sum(f: &[Jet], b: usize, a: usize) -> f64 {
    let mut cur: Vec<Jet> = f.to_vec();
    for _ in 0..a {
        cur = cur
            .iter()
            .flat_map(|j| (0..3).map(move |i| j.tangential(i)))
            .collect();
    }
    for _ in 0..b {
        cur = cur
            .iter()
            .flat_map(|j| (0..3).map(move |i| j.diff(i)))
            .collect();
    }
    cur.iter().map(|j| j.value() * j.value()).sum()
}

/// `curl_η v` as jets, with `A = cof(∇η)/J` and `η = x + δη`.
fn curl_eta_jets(space: &Arc<JetSpace>, x: Vec3<f64>, eta: &[Jet; 3], v: &[Jet; 3]) -> [Jet; 3] {
    // g[k][i] = ∂_k η^i
    let g: Vec<Vec<Jet>> = (0..3)
        .map(|k| (0..3).map(|i| eta[i].diff(k)).collect())
        .collect();
    let cof = |k: usize, i: usize| {
        let (k1, k2) = ((k + 1) % 3, (k + 2) % 3);
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        g[k1][i1].mul(&g[k2][i2]).sub(&g[k1][i2].mul(&g[k2][i1]))
    };
    let a: Vec<Vec<Jet>> = (0..3)
        .map(|k| (0..3).map(|i| cof(k, i)).collect())
        .collect();
    let jac = (0..3).fold(Jet::constant(space, x, 0.0), |acc, i| {
        acc.add(&g[0][i].mul(&a[0][i]))
    });
    let inv_j = jac.recip();
    let hv: Vec<Vec<Jet>> = (0..3)
        .map(|r| (0..3).map(|k| v[k].diff(r)).collect())
        .collect();
    // P[k][j] = v^k,_r A^r_j
    let p = |k: usize, j: usize| {
        (0..3)
            .fold(Jet::constant(space, x, 0.0), |acc, r| {
                acc.add(&hv[r][k].mul(&a[r][j]))
            })
            .mul(&inv_j)
    };
    [0, 1, 2].map(|c| {
        let (j, k) = ((c + 1) % 3, (c + 2) % 3);
        p(k, j).sub(&p(j, k))
    })
}

fn eta_jets(space: &Arc<JetSpace>, x: Vec3<f64>, deta: &dyn Field3) -> [Jet; 3] {
    let d = Jet::from_field(space, x, deta);
    [0, 1, 2].map(|i| d[i].add(&Jet::coordinate(space, x, i)))
}

/// All summands of the order-`K` energy for `(δη, v)` at amplitude `alpha`.
pub fn energy3d_eval(
    deta: &dyn Field3,
    v: &dyn Field3,
    alpha: f64,
    k: usize,
    gamma: f64,
    grid: &BallGrid,
) -> Result<Energy3dReport> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let degree = k + 1;
    for f in [deta, v] {
        if let Some(s) = f.smoothness() {
            if degree > s {
                return Err(Error::Resolution(format!(
                    "K = {k} needs {degree} derivatives but {} supplies {s}",
                    f.describe()
                )));
            }
        }
    }
    let mut terms = energy3d_terms(k, gamma)?;
    let regime = powers(gamma, k)?.regime.to_string();
    let space = JetSpace::new(degree);

    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, t) in terms.iter().enumerate() {
        groups.entry(t.weight_power.to_bits()).or_default().push(i);
    }
    for (bits, idx) in groups {
        let rule = grid.weighted_rule(f64::from_bits(bits))?;
        let needs_curl = idx.iter().any(|&i| terms[i].kind == TermKind3d::Curl);
        let sums = rule
            .nodes
            .par_iter()
            .zip(rule.weights.par_iter())
            .map(|(x, w)| {
                let dj = Jet::from_field(&space, *x, deta);
                let vj = Jet::from_field(&space, *x, v);
                let cj =
                    needs_curl.then(|| curl_eta_jets(&space, *x, &eta_jets(&space, *x, deta), &vj));
                idx.iter()
                    .map(|&i| {
                        let t = &terms[i];
                        let f: &[Jet] = match t.kind {
                            TermKind3d::Displacement | TermKind3d::Top => &dj,
                            TermKind3d::Velocity => &vj,
                            TermKind3d::Curl => {
                                cj.as_ref().expect("curl jets built for curl groups")
                            }
                        };
                        w * squared_sum(f, t.b, t.a)
                    })
                    .collect::<Vec<f64>>()
            })
            .reduce(
                || vec![0.0; idx.len()],
                |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
            );
        for (slot, &i) in idx.iter().enumerate() {
            terms[i].value = alpha.powf(2.0 * terms[i].alpha_power) * sums[slot];
        }
    }
    let total = terms.iter().map(|t| t.value).sum();
    Ok(Energy3dReport {
        k,
        gamma,
        alpha,
        regime,
        grid_id: grid.grid_id(),
        terms,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom3d::field::{FourierField, Poly3, VecPoly3};
    use crate::linalg::Mat3;

    #[test]
    fn term_counts() {
        // (K+1)(K+2)/2 pairs twice, K+1 top terms, K+1 curl terms
        let t = energy3d_terms(2, 2.0).unwrap();
        assert_eq!(t.len(), 2 * 6 + 3 + 3);
        assert!(matches!(
            energy3d_terms(8, 1.5),
            Err(Error::Precondition(_))
        ));
        assert!(energy3d_terms(9, 1.5).is_ok());
    }

    #[test]
    fn zero_fields_have_zero_energy() {
        let z = VecPoly3([Poly3::zero(), Poly3::zero(), Poly3::zero()]);
        let g = BallGrid::new(4, 1.0).unwrap();
        let r = energy3d_eval(&z, &z, 1.3, 2, 2.0, &g).unwrap();
        assert_eq!(r.total, 0.0);
    }

    #[test]
    fn jet_curl_matches_pointwise_curl() {
        let deta = FourierField::random(5, 3, 0.05, 2.0, false);
        let v = FourierField::random(6, 3, 0.3, 2.0, false);
        let x = [0.2, -0.1, 0.4];
        let space = JetSpace::new(2);
        let c = curl_eta_jets(
            &space,
            x,
            &eta_jets(&space, x, &deta),
            &Jet::from_field(&space, x, &v),
        );
        let g = crate::geom3d::NodeGeometry::new(Mat3::identity() + deta.gradient(&x)).unwrap();
        let want = crate::geom3d::curl_eta(&g.lagrangian_grad(&v.gradient(&x)));
        for i in 0..3 {
            assert!((c[i].value() - want[i]).abs() < 1e-13);
        }
    }
}
