//! Desk-scale laboratory for Kakeya and Nikodym sets of parabolic curves.
//!
//! The numeric layer is generic over [`Scalar`] (`f32`, `f64` and exact
//! [`Rational`]); the aliases below name the concrete types used by the
//! higher-level modules.

pub mod curves;
pub mod error;
pub mod numeric;
pub mod raster;
pub mod slices;
pub mod sumset;

pub use error::{Error, Result};
pub use numeric::{
    companion, eigenvalues_float, nilpotency, parse_rational, rat, Matrix, PolyMatrix,
    Polynomial, Rational, Scalar, MAX_DIM,
};

pub type RationalMatrix = Matrix<Rational>;
pub type FloatMatrix = Matrix<f64>;
pub type Float32Matrix = Matrix<f32>;
pub type RationalPolynomial = Polynomial<Rational>;
pub type FloatPolynomial = Polynomial<f64>;
pub type RationalPolyMatrix = PolyMatrix<Rational>;
