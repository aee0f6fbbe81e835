//! Truncated Taylor expansions in three variables about a base point, used to apply long
//! chains of `∇` and `∂̄` exactly to products and quotients of analytic fields.

use std::sync::Arc;

use super::field::{Field3, MultiIndex};
use crate::linalg::Vec3;

/// Monomial layout shared by all jets of the same degree.
#[derive(Debug)]
pub struct JetSpace {
    pub degree: usize,
    exps: Vec<MultiIndex>,
    index: Vec<usize>,
    products: Vec<(usize, usize, usize)>,
}

const NONE: usize = usize::MAX;

impl JetSpace {
    pub fn new(degree: usize) -> Arc<Self> {
        let d1 = degree + 1;
        let mut exps = Vec::new();
        for total in 0..=degree {
            for a in (0..=total).rev() {
                for b in (0..=total - a).rev() {
                    exps.push([a, b, total - a - b]);
                }
            }
        }
        let mut index = vec![NONE; d1 * d1 * d1];
        for (i, e) in exps.iter().enumerate() {
            index[(e[0] * d1 + e[1]) * d1 + e[2]] = i;
        }
        let mut products = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                if a[0] + a[1] + a[2] + b[0] + b[1] + b[2] <= degree {
                    let e = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                    products.push((i, j, index[(e[0] * d1 + e[1]) * d1 + e[2]]));
                }
            }
        }
        Arc::new(Self {
            degree,
            exps,
            index,
            products,
        })
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    fn idx(&self, e: MultiIndex) -> Option<usize> {
        let d1 = self.degree + 1;
        if e.iter().any(|x| *x > self.degree) {
            return None;
        }
        match self.index[(e[0] * d1 + e[1]) * d1 + e[2]] {
            NONE => None,
            i => Some(i),
        }
    }
}

/// `Σ c_β (x - x₀)^β` with coefficients trusted up to total degree `valid`.
#[derive(Debug, Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    base: Vec3<f64>,
    pub coeffs: Vec<f64>,
    pub valid: usize,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, base: Vec3<f64>, c: f64) -> Self {
        let mut coeffs = vec![0.0; space.len()];
        coeffs[0] = c;
        Self {
            space: Arc::clone(space),
            base,
            coeffs,
            valid: space.degree,
        }
    }

    /// The coordinate function `x_axis`.
    pub fn coordinate(space: &Arc<JetSpace>, base: Vec3<f64>, axis: usize) -> Self {
        let mut j = Self::constant(space, base, base[axis]);
        if space.degree > 0 {
            let mut e = [0; 3];
            e[axis] = 1;
            j.coeffs[space.idx(e).unwrap()] = 1.0;
        }
        j
    }

    /// Component jets of a vector field from its exact derivatives at `base`.
    pub fn from_field(space: &Arc<JetSpace>, base: Vec3<f64>, f: &dyn Field3) -> [Self; 3] {
        let mut out = [
            Self::constant(space, base, 0.0),
            Self::constant(space, base, 0.0),
            Self::constant(space, base, 0.0),
        ];
        for (k, e) in space.exps.iter().enumerate() {
            let d = f.derivative(&base, *e);
            let w = 1.0 / (factorial(e[0]) * factorial(e[1]) * factorial(e[2]));
            for i in 0..3 {
                out[i].coeffs[k] = d[i] * w;
            }
        }
        out
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn like(&self, coeffs: Vec<f64>, valid: usize) -> Self {
        Self {
            space: Arc::clone(&self.space),
            base: self.base,
            coeffs,
            valid,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        self.like(c, self.valid.min(o.valid))
    }

    pub fn sub(&self, o: &Self) -> Self {
        let c = self
            .coeffs
            .iter()
            .zip(&o.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        self.like(c, self.valid.min(o.valid))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.like(self.coeffs.iter().map(|a| a * s).collect(), self.valid)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![0.0; self.coeffs.len()];
        for &(i, j, k) in &self.space.products {
            c[k] += self.coeffs[i] * o.coeffs[j];
        }
        self.like(c, self.valid.min(o.valid))
    }

    pub fn diff(&self, axis: usize) -> Self {
        let mut c = vec![0.0; self.coeffs.len()];
        for (k, e) in self.space.exps.iter().enumerate() {
            let mut up = *e;
            up[axis] += 1;
            if let Some(i) = self.space.idx(up) {
                c[k] = self.coeffs[i] * up[axis] as f64;
            }
        }
        self.like(c, self.valid.saturating_sub(1))
    }

    /// Multiplication by the coordinate `x_axis`.
    pub fn mul_coord(&self, axis: usize) -> Self {
        let mut c: Vec<f64> = self.coeffs.iter().map(|a| a * self.base[axis]).collect();
        for (k, e) in self.space.exps.iter().enumerate() {
            let mut up = *e;
            up[axis] += 1;
            if let Some(i) = self.space.idx(up) {
                c[i] += self.coeffs[k];
            }
        }
        self.like(c, self.valid)
    }

    /// `∂̄_i = x_j ∂_k - x_k ∂_j` with `(i, j, k)` cyclic.
    pub fn tangential(&self, i: usize) -> Self {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        self.diff(k).mul_coord(j).sub(&self.diff(j).mul_coord(k))
    }

    /// `1/f` by the geometric series in `(f - f₀)/f₀`; needs `f₀ ≠ 0`.
    pub fn recip(&self) -> Self {
        let f0 = self.coeffs[0];
        let mut g = self.scale(-1.0 / f0);
        g.coeffs[0] = 0.0;
        let mut term = Self::constant(&self.space, self.base, 1.0 / f0);
        let mut sum = term.clone();
        for _ in 0..self.valid {
            term = term.mul(&g);
            sum = sum.add(&term);
        }
        sum.valid = self.valid;
        sum
    }
}
