//! Small fixed-size linear algebra: 3-vectors, 3x3 matrices and the Levi-Civita symbol.
//!
//! Gradient matrices follow the layout `grad[k][i] = ∂_k F^i` (derivative index first),
//! so the row-wise cofactor of a gradient is the matrix `a^k_i` stored at `[k][i]`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Vec3<T> = [T; 3];

#[inline]
pub fn dot<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm3<T: Real>(a: &Vec3<T>) -> T {
    dot(a, a).sqrt()
}

/// Totally antisymmetric permutation symbol with `ε₁₂₃ = 1` (zero-based indices).
#[derive(Debug, Clone, Copy, Default)]
pub struct PermutationSymbol;

impl PermutationSymbol {
    #[inline]
    pub fn get(i: usize, j: usize, k: usize) -> i8 {
        if i == j || j == k || i == k {
            return 0;
        }
        // even permutations of (0,1,2) are the cyclic shifts
        if (j + 3 - i) % 3 == 1 && (k + 3 - j) % 3 == 1 {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn value<T: Real>(i: usize, j: usize, k: usize) -> T {
        match Self::get(i, j, k) {
            1 => T::one(),
            -1 => -T::one(),
            _ => T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3<T> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Default for Mat3<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Real> Mat3<T> {
    pub fn new(m: [[T; 3]; 3]) -> Self {
        Self { m }
    }

    pub fn zeros() -> Self {
        Self {
            m: [[T::zero(); 3]; 3],
        }
    }

    pub fn identity() -> Self {
        Self::from_diag([T::one(); 3])
    }

    pub fn from_diag(d: Vec3<T>) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            out.m[i][i] = d[i];
        }
        out
    }

    pub fn from_rows(r0: Vec3<T>, r1: Vec3<T>, r2: Vec3<T>) -> Self {
        Self { m: [r0, r1, r2] }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut out = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = f(i, j);
            }
        }
        out
    }

    pub fn row(&self, i: usize) -> Vec3<T> {
        self.m[i]
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        [self.m[0][j], self.m[1][j], self.m[2][j]]
    }

    pub fn diag(&self) -> Vec3<T> {
        [self.m[0][0], self.m[1][1], self.m[2][2]]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.m[j][i])
    }

    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.m[i][j] * s)
    }

    pub fn det(&self) -> T {
        dot(&self.m[0], &cross(&self.m[1], &self.m[2]))
    }

    /// Classical cofactor matrix; row `k` is the cross product of the two other rows
    /// taken cyclically, so `cof(M) = det(M) M^{-T}` whenever `M` is invertible.
    pub fn cofactor(&self) -> Self {
        Self::from_rows(
            cross(&self.m[1], &self.m[2]),
            cross(&self.m[2], &self.m[0]),
            cross(&self.m[0], &self.m[1]),
        )
    }

    pub fn adjugate(&self) -> Self {
        self.cofactor().transpose()
    }

    /// Inverse with a relative singularity threshold on the determinant.
    pub fn try_inverse(&self) -> Result<Self> {
        let det = self.det();
        let scale = self.max_abs().powi(3);
        let threshold = T::epsilon() * T::lit(64.0) * scale.max(T::min_positive_value());
        if !(det.abs() > threshold) {
            return Err(Error::Singular {
                det: det.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        Ok(self.adjugate().scale(T::one() / det))
    }

    pub fn inverse_transpose(&self) -> Result<Self> {
        Ok(self.try_inverse()?.transpose())
    }

    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        [dot(&self.m[0], v), dot(&self.m[1], v), dot(&self.m[2], v)]
    }

    /// `Σ_ij A_ij B_ij`
    pub fn frobenius_dot(&self, other: &Self) -> T {
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s += self.m[i][j] * other.m[i][j];
            }
        }
        s
    }

    pub fn norm_fro(&self) -> T {
        self.frobenius_dot(self).sqrt()
    }

    pub fn max_abs(&self) -> T {
        let mut s = T::zero();
        for row in &self.m {
            for &x in row {
                s = s.max(x.abs());
            }
        }
        s
    }

    /// Induced ∞-norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> T {
        self.m
            .iter()
            .map(|r| r[0].abs() + r[1].abs() + r[2].abs())
            .fold(T::zero(), T::max)
    }

    pub fn symmetric_part(&self) -> Self {
        Self::from_fn(|i, j| (self.m[i][j] + self.m[j][i]) * T::lit(0.5))
    }

    pub fn is_diagonal(&self, tol: T) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.m[i][j].abs() <= tol))
    }

    /// Eigenvalues of the symmetric part, ascending, by cyclic Jacobi rotations.
    pub fn symmetric_eigenvalues(&self) -> Vec3<T> {
        let mut a = self.symmetric_part().m;
        for _sweep in 0..64 {
            let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
            let diag = a[0][0].abs() + a[1][1].abs() + a[2][2].abs();
            if off <= T::epsilon() * diag.max(T::min_positive_value()) {
                break;
            }
            for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..3 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..3 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
        let mut ev = [a[0][0], a[1][1], a[2][2]];
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(|i, j| f(self.m[i][j]))
    }

    pub fn cast<U: Real>(&self) -> Mat3<U> {
        Mat3::from_fn(|i, j| U::lit(self.m[i][j].to_f64_lossy()))
    }

    /// Row-major flattening.
    pub fn to_row_major(&self) -> [T; 9] {
        let mut out = [T::zero(); 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.m[i][j];
            }
        }
        out
    }

    pub fn from_row_major(v: &[T]) -> Self {
        Self::from_fn(|i, j| v[3 * i + j])
    }
}

impl<T> Index<(usize, usize)> for Mat3<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.m[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat3<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.m[i][j]
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] + o.m[i][j])
    }
}

impl<T: Real> AddAssign for Mat3<T> {
    fn add_assign(&mut self, o: Self) {
        for i in 0..3 {
            for j in 0..3 {
                self.m[i][j] += o.m[i][j];
            }
        }
    }
}

impl<T: Real> Sub for Mat3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_fn(|i, j| self.m[i][j] - o.m[i][j])
    }
}

impl<T: Real> Neg for Mat3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::from_fn(|i, j| {
            self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j]
        })
    }
}

impl<T: Real> Mul<T> for Mat3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}
