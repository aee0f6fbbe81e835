//! Gauss–Jacobi rules (Golub–Welsch), Clenshaw–Curtis and composite Simpson weights.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Nodes (ascending) and weights of a quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Symmetric tridiagonal QL with implicit shifts. On return `d` holds the eigenvalues and
/// `z0` the first components of the normalised eigenvectors.
fn tridiagonal_eigen(d: &mut [f64], e: &mut [f64], z0: &mut [f64]) -> Result<()> {
    let n = d.len();
    // only the first row of the eigenvector matrix is needed; it transforms like any row
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    z0.copy_from_slice(&z);
    let mut row = vec![0.0; n];
    row[0] = 1.0;
    if n > 1 {
        e.copy_within(1.., 0);
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence(
                    "tridiagonal QL did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let fz = row[i + 1];
                row[i + 1] = s * row[i] + c * fz;
                row[i] = c * row[i] - s * fz;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    z0.copy_from_slice(&row);
    Ok(())
}

/// `n`-point Gauss–Jacobi rule for the weight `(1-x)^a (1+x)^b`, `a, b > -1`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<Rule> {
    if n == 0 {
        return Err(Error::Domain("quadrature needs at least one node".into()));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::Domain(format!(
            "Jacobi exponents must exceed -1, got ({a}, {b})"
        )));
    }
    let ab = a + b;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for k in 0..n {
        let kf = k as f64;
        let t = 2.0 * kf + ab;
        diag[k] = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / (t * (t + 2.0))
        };
        if k >= 1 {
            let num = 4.0 * kf * (kf + a) * (kf + b) * (kf + ab);
            let den = t * t * (t + 1.0) * (t - 1.0);
            off[k] = (num / den).sqrt();
        }
    }
    let mut z0 = vec![0.0; n];
    tridiagonal_eigen(&mut diag, &mut off, &mut z0)?;
    let ln_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0);
    let mu0 = ln_mu0.exp();
    let mut pairs: Vec<(f64, f64)> = diag
        .iter()
        .zip(&z0)
        .map(|(x, v)| (*x, mu0 * v * v))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(Rule { nodes, weights })
}

pub fn gauss_legendre(n: usize) -> Result<Rule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Clenshaw–Curtis weights for the ascending Chebyshev–Gauss–Lobatto nodes `-cos(πj/N)`.
pub fn clenshaw_curtis_weights(n_intervals: usize) -> Vec<f64> {
    let n = n_intervals;
    if n == 0 {
        return vec![2.0];
    }
    let nf = n as f64;
    let mut w = vec![0.0; n + 1];
    for (j, wj) in w.iter_mut().enumerate() {
        let theta = std::f64::consts::PI * j as f64 / nf;
        let mut s = 0.0;
        for k in 1..=n / 2 {
            let bk = if 2 * k == n { 1.0 } else { 2.0 };
            s += bk / (4.0 * (k * k) as f64 - 1.0) * (2.0 * k as f64 * theta).cos();
        }
        let cj = if j == 0 || j == n { 1.0 } else { 2.0 };
        *wj = cj / nf * (1.0 - s);
    }
    w
}

/// Composite Simpson weights on `n_intervals` (even) equal panels of width `h`.
pub fn simpson_weights(n_intervals: usize, h: f64) -> Result<Vec<f64>> {
    if n_intervals == 0 || n_intervals % 2 != 0 {
        return Err(Error::Domain(format!(
            "Simpson's rule needs an even number of intervals, got {n_intervals}"
        )));
    }
    Ok((0..=n_intervals)
        .map(|j| {
            let c = if j == 0 || j == n_intervals {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(5).unwrap();
        assert!((r.integrate(|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-14);
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let r1 = gauss_legendre(1).unwrap();
        assert!(r1.nodes[0].abs() < 1e-14 && (r1.weights[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_weight_mass_and_moments() {
        // ∫(1-x²)^s dx = √π Γ(s+1)/Γ(s+3/2)
        for s in [0.5, 1.0, 3.5, 7.0] {
            let r = gauss_jacobi(12, s, s).unwrap();
            let exact =
                (0.5 * std::f64::consts::PI.ln() + ln_gamma(s + 1.0) - ln_gamma(s + 1.5)).exp();
            assert!((r.weights.iter().sum::<f64>() - exact).abs() < 1e-13 * exact.max(1.0));
        }
        // ∫(1+x)² x² dx over [-1,1] = 2/3 + 2/5 = 16/15
        let r = gauss_jacobi(4, 0.0, 2.0).unwrap();
        assert!((r.integrate(|x| x * x) - 16.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn clenshaw_curtis_is_exact_for_low_degree() {
        let n = 16;
        let w = clenshaw_curtis_weights(n);
        let x: Vec<f64> = (0..=n)
            .map(|j| -(std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert!((i - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_rejects_odd_panels() {
        assert!(simpson_weights(3, 0.1).is_err());
        let w = simpson_weights(4, 0.5).unwrap();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-15);
    }
}
