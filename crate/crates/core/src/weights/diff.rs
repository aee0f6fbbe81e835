//! Collocation differentiation: Chebyshev–Gauss–Lobatto spectral matrices, barycentric
//! interpolation, and fourth-order finite differences on uniform grids.

/// Ascending Chebyshev–Gauss–Lobatto nodes `-cos(πj/N)`, computed in the symmetric sine form.
pub fn chebyshev_nodes(n_intervals: usize) -> Vec<f64> {
    if n_intervals == 0 {
        return vec![0.0];
    }
    let n = n_intervals as f64;
    (0..=n_intervals)
        .map(|j| (std::f64::consts::PI * (2.0 * j as f64 - n) / (2.0 * n)).sin())
        .collect()
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.apply(x, &mut out);
        out
    }
}

/// Spectral differentiation matrix on [`chebyshev_nodes`]; diagonal from the negative-sum
/// identity so constants are annihilated to round-off.
pub fn chebyshev_diff_matrix(n_intervals: usize) -> Matrix {
    let x = chebyshev_nodes(n_intervals);
    let m = x.len();
    let c = |j: usize| if j == 0 || j == n_intervals { 2.0 } else { 1.0 };
    let mut data = vec![0.0; m * m];
    for i in 0..m {
        let mut row_sum = 0.0;
        for j in 0..m {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let v = c(i) / c(j) * sign / (x[i] - x[j]);
                data[i * m + j] = v;
                row_sum += v;
            }
        }
        data[i * m + i] = -row_sum;
    }
    Matrix { n: m, data }
}

/// Barycentric weights of the Chebyshev–Gauss–Lobatto nodes.
pub fn barycentric_weights(n_intervals: usize) -> Vec<f64> {
    (0..=n_intervals)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n_intervals {
                0.5 * s
            } else {
                s
            }
        })
        .collect()
}

/// Row of interpolation coefficients taking nodal values to the value at `t`.
pub fn barycentric_row(nodes: &[f64], bw: &[f64], t: f64) -> Vec<f64> {
    let mut row = vec![0.0; nodes.len()];
    if let Some(k) = nodes.iter().position(|x| *x == t) {
        row[k] = 1.0;
        return row;
    }
    let mut den = 0.0;
    for j in 0..nodes.len() {
        let c = bw[j] / (t - nodes[j]);
        row[j] = c;
        den += c;
    }
    for r in &mut row {
        *r /= den;
    }
    row
}

pub fn barycentric_eval(nodes: &[f64], bw: &[f64], values: &[f64], t: f64) -> f64 {
    barycentric_row(nodes, bw, t)
        .iter()
        .zip(values)
        .map(|(a, b)| a * b)
        .sum()
}

/// Fourth-order first derivative on a uniform grid with one-sided closures at both ends.
pub fn fd4_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 5, "fourth-order stencils need at least five nodes");
    let mut d = vec![0.0; n];
    let s = 1.0 / (12.0 * h);
    d[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for i in 2..n - 2 {
        d[i] = s * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    }
    d[n - 2] =
        -s * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]);
    d[n - 1] = -s
        * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]);
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_derivative_of_polynomial_is_exact() {
        let n = 12;
        let x = chebyshev_nodes(n);
        let d = chebyshev_diff_matrix(n);
        let f: Vec<f64> = x.iter().map(|x| x.powi(7) - 2.0 * x).collect();
        let df = d.apply_vec(&f);
        for (xi, di) in x.iter().zip(&df) {
            assert!((di - (7.0 * xi.powi(6) - 2.0)).abs() < 1e-12);
        }
        let ones = vec![1.0; n + 1];
        assert!(d.apply_vec(&ones).iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn nodes_are_symmetric_and_sorted() {
        let x = chebyshev_nodes(9);
        assert_eq!(x[0], -1.0);
        assert_eq!(x[9], 1.0);
        for j in 0..10 {
            assert_eq!(x[j], -x[9 - j]);
        }
        assert!(x.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn barycentric_reproduces_polynomials() {
        let n = 8;
        let x = chebyshev_nodes(n);
        let bw = barycentric_weights(n);
        let f: Vec<f64> = x.iter().map(|x| x.powi(5)).collect();
        for t in [-0.97, -0.3, 0.11, 0.8] {
            assert!((barycentric_eval(&x, &bw, &f, t) - t.powi(5)).abs() < 1e-14);
        }
    }

    #[test]
    fn fd4_is_fourth_order() {
        let err = |n: usize| {
            let h = 2.0 / n as f64;
            let x: Vec<f64> = (0..=n).map(|j| -1.0 + j as f64 * h).collect();
            let f: Vec<f64> = x.iter().map(|x| (2.0 * x).sin()).collect();
            let d = fd4_derivative(&f, h);
            x.iter()
                .zip(&d)
                .map(|(x, d)| (d - 2.0 * (2.0 * x).cos()).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(80) / err(160)).log2();
        assert!(order > 3.7, "order {order}");
    }
}
