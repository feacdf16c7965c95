//! Spline spaces of arbitrary degree and smoothness, their L2, Ritz and
//! boundary-interpolating projectors, and explicit a priori error constants.

pub mod assembly;
pub mod constants;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod projection;
pub mod quadrature;
pub mod spline;
pub mod target;
pub mod tensor;

pub use error::{Error, Result};
pub use target::TestFunction;
