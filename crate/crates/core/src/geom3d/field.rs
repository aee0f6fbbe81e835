//! Analytically differentiable fields on the unit ball and time families built from them.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{Mat3, Vec3};

/// Multi-index: derivative counts along `x₁, x₂, x₃`.
pub type MultiIndex = [usize; 3];

pub fn unit(axis: usize) -> MultiIndex {
    let mut b = [0; 3];
    b[axis] = 1;
    b
}

pub fn add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn order(a: MultiIndex) -> usize {
    a[0] + a[1] + a[2]
}

/// Vector field with exact partial derivatives of every order.
pub trait Field3: Send + Sync {
    fn derivative(&self, x: &Vec3<f64>, beta: MultiIndex) -> Vec3<f64>;

    fn value(&self, x: &Vec3<f64>) -> Vec3<f64> {
        self.derivative(x, [0, 0, 0])
    }

    /// `grad[k][i] = ∂_k F^i`
    fn gradient(&self, x: &Vec3<f64>) -> Mat3<f64> {
        Mat3::from_rows(
            self.derivative(x, unit(0)),
            self.derivative(x, unit(1)),
            self.derivative(x, unit(2)),
        )
    }

    /// Gradient of `∂^β F`.
    fn gradient_of(&self, x: &Vec3<f64>, beta: MultiIndex) -> Mat3<f64> {
        Mat3::from_rows(
            self.derivative(x, add_index(beta, unit(0))),
            self.derivative(x, add_index(beta, unit(1))),
            self.derivative(x, add_index(beta, unit(2))),
        )
    }

    /// Highest derivative order that is meaningful; `None` for analytic fields.
    fn smoothness(&self) -> Option<usize> {
        None
    }

    fn describe(&self) -> String;
}

/// Scalar field with exact partial derivatives.
pub trait ScalarField3: Send + Sync {
    fn derivative(&self, x: &Vec3<f64>, beta: MultiIndex) -> f64;

    fn gradient(&self, x: &Vec3<f64>) -> Vec3<f64> {
        [
            self.derivative(x, unit(0)),
            self.derivative(x, unit(1)),
            self.derivative(x, unit(2)),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub wave: Vec3<f64>,
    pub amplitude: Vec3<f64>,
    pub phase: f64,
}

/// `F(x) = L x + c + Σ a_m sin(k_m·x + φ_m)`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierField {
    pub linear: Mat3<f64>,
    pub offset: Vec3<f64>,
    pub modes: Vec<FourierMode>,
    pub label: String,
}

impl FourierField {
    pub fn identity() -> Self {
        Self::linear(Mat3::identity(), "identity")
    }

    pub fn linear(m: Mat3<f64>, label: &str) -> Self {
        Self {
            linear: m,
            offset: [0.0; 3],
            modes: Vec::new(),
            label: label.into(),
        }
    }

    /// `ω × x`
    pub fn rotation(omega: Vec3<f64>) -> Self {
        let [a, b, c] = omega;
        let m = Mat3::new([[0.0, -c, b], [c, 0.0, -a], [-b, a, 0.0]]);
        Self::linear(m, &format!("rotation omega={a},{b},{c}"))
    }

    /// Identity plus `amplitude·(sin x₂, sin x₃, sin x₁)`.
    pub fn cyclic_sine(amplitude: f64) -> Self {
        let modes = (0..3)
            .map(|i| {
                let mut wave = [0.0; 3];
                wave[(i + 1) % 3] = 1.0;
                let mut amp = [0.0; 3];
                amp[i] = amplitude;
                FourierMode {
                    wave,
                    amplitude: amp,
                    phase: 0.0,
                }
            })
            .collect();
        Self {
            linear: Mat3::identity(),
            offset: [0.0; 3],
            modes,
            label: format!("cyclic_sine amplitude={amplitude}"),
        }
    }

    /// Seeded random perturbation: `n_modes` modes with wave numbers in `[-k_max, k_max]` and
    /// amplitudes scaled so that `‖∇(F - L x)‖` stays below `amplitude`.
    pub fn random(
        seed: u64,
        n_modes: usize,
        amplitude: f64,
        k_max: f64,
        with_identity: bool,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::with_capacity(n_modes);
        for _ in 0..n_modes {
            let wave = [
                rng.gen_range(-k_max..k_max),
                rng.gen_range(-k_max..k_max),
                rng.gen_range(-k_max..k_max),
            ];
            let kn = wave.iter().map(|k| k.abs()).sum::<f64>().max(1e-3);
            let s = amplitude / (n_modes as f64 * kn);
            let amp = [
                s * rng.gen_range(-1.0..1.0),
                s * rng.gen_range(-1.0..1.0),
                s * rng.gen_range(-1.0..1.0),
            ];
            modes.push(FourierMode {
                wave,
                amplitude: amp,
                phase: rng.gen_range(0.0..std::f64::consts::TAU),
            });
        }
        let linear = if with_identity {
            Mat3::identity()
        } else {
            Mat3::zeros()
        };
        Self {
            linear,
            offset: [0.0; 3],
            modes,
            label: format!(
                "fourier seed={seed} modes={n_modes} amplitude={amplitude} kmax={k_max}"
            ),
        }
    }
}

impl Field3 for FourierField {
    fn derivative(&self, x: &Vec3<f64>, beta: MultiIndex) -> Vec3<f64> {
        let n = order(beta);
        let mut out = match n {
            0 => {
                let lx = self.linear.mul_vec(x);
                [
                    lx[0] + self.offset[0],
                    lx[1] + self.offset[1],
                    lx[2] + self.offset[2],
                ]
            }
            1 => {
                let j = beta.iter().position(|b| *b == 1).unwrap();
                self.linear.col(j)
            }
            _ => [0.0; 3],
        };
        for m in &self.modes {
            let kb = m.wave[0].powi(beta[0] as i32)
                * m.wave[1].powi(beta[1] as i32)
                * m.wave[2].powi(beta[2] as i32);
            let arg = m.wave[0] * x[0]
                + m.wave[1] * x[1]
                + m.wave[2] * x[2]
                + m.phase
                + n as f64 * FRAC_PI_2;
            let s = kb * arg.sin();
            for i in 0..3 {
                out[i] += m.amplitude[i] * s;
            }
        }
        out
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// Polynomial in `x₁, x₂, x₃` keyed by exponent triples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Poly3 {
    pub terms: BTreeMap<[u32; 3], f64>,
}

impl Poly3 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn monomial(c: f64, e: [u32; 3]) -> Self {
        let mut p = Self::zero();
        if c != 0.0 {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn coord(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Self::monomial(1.0, e)
    }

    /// Every monomial up to `degree` with a seeded coefficient in `[-1, 1)`.
    pub fn random(seed: u64, degree: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Self::zero();
        for a in 0..=degree {
            for b in 0..=degree - a {
                for c in 0..=degree - a - b {
                    p = p.add(&Self::monomial(rng.gen_range(-1.0..1.0), [a, b, c]));
                }
            }
        }
        p
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e[0] + e[1] + e[2])
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            *p.terms.entry(*e).or_insert(0.0) += c;
        }
        p.terms.retain(|_, c| *c != 0.0);
        p
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = self.clone();
        p.terms.values_mut().for_each(|c| *c *= s);
        p.terms.retain(|_, c| *c != 0.0);
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *p.terms.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        p.terms.retain(|_, c| *c != 0.0);
        p
    }

    pub fn diff(&self, axis: usize) -> Self {
        let mut p = Self::zero();
        for (e, c) in &self.terms {
            if e[axis] > 0 {
                let mut f = *e;
                f[axis] -= 1;
                *p.terms.entry(f).or_insert(0.0) += c * e[axis] as f64;
            }
        }
        p
    }

    pub fn diff_multi(&self, beta: MultiIndex) -> Self {
        let mut p = self.clone();
        for (axis, &n) in beta.iter().enumerate() {
            for _ in 0..n {
                p = p.diff(axis);
            }
        }
        p
    }

    /// `∂̄_i = ε_{ijk} x_j ∂_k`
    pub fn tangential(&self, i: usize) -> Self {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        Self::coord(j)
            .mul(&self.diff(k))
            .add(&Self::coord(k).mul(&self.diff(j)).scale(-1.0))
    }

    pub fn eval(&self, x: &Vec3<f64>) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32)
            })
            .sum()
    }
}

impl fmt::Display for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{c}*x1^{}*x2^{}*x3^{}", e[0], e[1], e[2]))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl ScalarField3 for Poly3 {
    fn derivative(&self, x: &Vec3<f64>, beta: MultiIndex) -> f64 {
        self.diff_multi(beta).eval(x)
    }
}

/// Vector polynomial field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VecPoly3(pub [Poly3; 3]);

impl VecPoly3 {
    pub fn identity() -> Self {
        Self([Poly3::coord(0), Poly3::coord(1), Poly3::coord(2)])
    }

    pub fn add(&self, o: &Self) -> Self {
        Self([
            self.0[0].add(&o.0[0]),
            self.0[1].add(&o.0[1]),
            self.0[2].add(&o.0[2]),
        ])
    }

    pub fn scale(&self, s: f64) -> Self {
        Self([self.0[0].scale(s), self.0[1].scale(s), self.0[2].scale(s)])
    }

    pub fn map(&self, f: impl Fn(&Poly3) -> Poly3) -> Self {
        Self([f(&self.0[0]), f(&self.0[1]), f(&self.0[2])])
    }
}

impl Field3 for VecPoly3 {
    fn derivative(&self, x: &Vec3<f64>, beta: MultiIndex) -> Vec3<f64> {
        [
            self.0[0].derivative(x, beta),
            self.0[1].derivative(x, beta),
            self.0[2].derivative(x, beta),
        ]
    }

    fn describe(&self) -> String {
        format!("poly ({}; {}; {})", self.0[0], self.0[1], self.0[2])
    }
}

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `η(x, t) = x + Σ_j s_j(t) U_j(x)`
#[derive(Clone)]
pub struct Family3 {
    pub terms: Vec<(Profile, Arc<dyn Field3>)>,
    pub label: String,
}

impl fmt::Debug for Family3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Family3")
            .field("label", &self.label)
            .field("terms", &self.terms.len())
            .finish()
    }
}

impl Family3 {
    pub fn static_identity() -> Self {
        Self {
            terms: Vec::new(),
            label: "static identity".into(),
        }
    }

    /// `η = (1 + t) x`
    pub fn dilation() -> Self {
        let u: Arc<dyn Field3> = Arc::new(FourierField::identity());
        Self {
            terms: vec![(Arc::new(|t| t), u)],
            label: "dilation (1+t)x".into(),
        }
    }

    pub fn single(profile: Profile, u: Arc<dyn Field3>, label: &str) -> Self {
        Self {
            terms: vec![(profile, u)],
            label: label.into(),
        }
    }

    /// Seeded family with `terms` oscillating Fourier perturbations of size `amplitude`.
    pub fn random(seed: u64, terms: usize, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut out = Vec::with_capacity(terms);
        for j in 0..terms {
            let u: Arc<dyn Field3> = Arc::new(FourierField::random(
                seed.wrapping_mul(31).wrapping_add(j as u64),
                3,
                1.0,
                3.0,
                false,
            ));
            let (w, p) = (
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            let profile: Profile = Arc::new(move |t: f64| amplitude * (w * t + p).sin());
            out.push((profile, u));
        }
        Self {
            terms: out,
            label: format!("random family seed={seed} terms={terms} amplitude={amplitude}"),
        }
    }

    pub fn derivative(&self, x: &Vec3<f64>, t: f64, beta: MultiIndex) -> Vec3<f64> {
        let mut out = match order(beta) {
            0 => *x,
            1 => {
                let mut e = [0.0; 3];
                e[beta.iter().position(|b| *b == 1).unwrap()] = 1.0;
                e
            }
            _ => [0.0; 3],
        };
        for (s, u) in &self.terms {
            let st = s(t);
            let d = u.derivative(x, beta);
            for i in 0..3 {
                out[i] += st * d[i];
            }
        }
        out
    }

    pub fn gradient(&self, x: &Vec3<f64>, t: f64) -> Mat3<f64> {
        self.gradient_of(x, t, [0, 0, 0])
    }

    pub fn gradient_of(&self, x: &Vec3<f64>, t: f64, beta: MultiIndex) -> Mat3<f64> {
        Mat3::from_rows(
            self.derivative(x, t, add_index(beta, unit(0))),
            self.derivative(x, t, add_index(beta, unit(1))),
            self.derivative(x, t, add_index(beta, unit(2))),
        )
    }

    /// The field frozen at time `t`.
    pub fn at(&self, t: f64) -> FrozenFamily<'_> {
        FrozenFamily { family: self, t }
    }
}

pub struct FrozenFamily<'a> {
    family: &'a Family3,
    t: f64,
}

impl Field3 for FrozenFamily<'_> {
    fn derivative(&self, x: &Vec3<f64>, beta: MultiIndex) -> Vec3<f64> {
        self.family.derivative(x, self.t, beta)
    }

    fn describe(&self) -> String {
        format!("{} at t={}", self.family.label, self.t)
    }
}

/// Seeded points in the ball of radius `radius`.
pub fn random_points(seed: u64, n: usize, radius: f64) -> Vec<Vec3<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if p[0] * p[0] + p[1] * p[1] + p[2] * p[2] < 1.0 {
            pts.push([radius * p[0], radius * p[1], radius * p[2]]);
        }
    }
    pts
}
