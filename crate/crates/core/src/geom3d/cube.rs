//! Uniform Cartesian grid on `[-w, w]³` with fourth-order finite differences.

use super::field::Field3;
use crate::linalg::{Mat3, Vec3};
use crate::weights::diff::fd4_derivative;

#[derive(Debug, Clone)]
pub struct CubeGrid {
    /// Intervals per side; the grid has `(n+1)³` nodes.
    pub n: usize,
    pub half_width: f64,
    pub h: f64,
    pub nodes: Vec<Vec3<f64>>,
}

impl CubeGrid {
    pub fn new(n: usize, half_width: f64) -> Self {
        assert!(
            n >= 4,
            "fourth-order stencils need at least five nodes per side"
        );
        let h = 2.0 * half_width / n as f64;
        let m = n + 1;
        let mut nodes = Vec::with_capacity(m * m * m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    nodes.push([
                        -half_width + i as f64 * h,
                        -half_width + j as f64 * h,
                        -half_width + k as f64 * h,
                    ]);
                }
            }
        }
        Self {
            n,
            half_width,
            h,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.n + 1;
        (i * m + j) * m + k
    }

    /// Indices of nodes in the centred sub-cube `[-w/3, w/3]³`. Composed difference operators
    /// lose an order within reach of the one-sided closures, and a fixed region keeps max-norms
    /// comparable across resolutions; for `n ≥ 12` every such node is four or more steps inside.
    pub fn inner(&self) -> Vec<usize> {
        let lim = self.half_width / 3.0 + 1e-9 * self.h;
        (0..self.len())
            .filter(|&p| self.nodes[p].iter().all(|c| c.abs() <= lim))
            .collect()
    }

    /// Component arrays of a vector field.
    pub fn sample(&self, f: &dyn Field3) -> [Vec<f64>; 3] {
        let vals: Vec<Vec3<f64>> = self.nodes.iter().map(|x| f.value(x)).collect();
        [0, 1, 2].map(|c| vals.iter().map(|v| v[c]).collect())
    }

    /// `∂_axis` of a nodal array.
    pub fn diff(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let m = self.n + 1;
        let mut out = vec![0.0; f.len()];
        let mut line = vec![0.0; m];
        for a in 0..m {
            for b in 0..m {
                let at = |s: usize| match axis {
                    0 => self.index(s, a, b),
                    1 => self.index(a, s, b),
                    _ => self.index(a, b, s),
                };
                for (s, l) in line.iter_mut().enumerate() {
                    *l = f[at(s)];
                }
                let d = fd4_derivative(&line, self.h);
                for (s, v) in d.into_iter().enumerate() {
                    out[at(s)] = v;
                }
            }
        }
        out
    }

    /// `grad[k][i] = ∂_k F^i` at every node.
    pub fn gradient(&self, comps: &[Vec<f64>; 3]) -> Vec<Mat3<f64>> {
        let d: Vec<[Vec<f64>; 3]> = (0..3)
            .map(|k| [0, 1, 2].map(|i| self.diff(&comps[i], k)))
            .collect();
        (0..self.len())
            .map(|p| Mat3::from_fn(|k, i| d[k][i][p]))
            .collect()
    }
}
