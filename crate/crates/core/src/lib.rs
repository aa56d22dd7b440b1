//! Grassmann-coefficient superconformal series, superconformal algebra
//! representations, and simulation of supersymmetric Loewner evolutions.

pub mod error;
pub mod grassmann;
pub mod loewner_sde;
pub mod martingale;
pub mod scalar;
pub mod superalgebra;
pub mod superseries;

pub use error::{Error, Result};
pub use grassmann::{GrassmannElement, Parity};
pub use scalar::{QComplex, Rational, Scalar, C64};
