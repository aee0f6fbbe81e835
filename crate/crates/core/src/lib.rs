//! Numerical laboratory for affine gas expansion into vacuum.
//!
//! The core is generic over the floating-point type through [`Real`]; the `*64`/`*32`
//! aliases at the crate root pick a concrete precision.

pub mod affine;
pub mod error;
pub mod euler1d;
pub mod fit;
pub mod geom3d;
pub mod linalg;
pub mod ode;
pub mod report;
pub mod scalar;
pub mod weights;

pub use error::{Error, Result};
pub use linalg::{Mat3, PermutationSymbol, Vec3};
pub use report::{CheckReport, Verdict};
pub use scalar::Real;

pub type Mat3f64 = Mat3<f64>;
pub type Mat3f32 = Mat3<f32>;
pub type AffineState64 = affine::AffineState<f64>;
pub type AffineState32 = affine::AffineState<f32>;
pub type ScalarAffineState64 = affine::ScalarAffineState<f64>;
pub type ScalarAffineState32 = affine::ScalarAffineState<f32>;
