//! Minkowski question mark function, the moments of its distribution, the dyadic
//! period function, the spectrum of the associated Hilbert-Schmidt operator, and the
//! p-adic distribution of rationals in the Calkin-Wilf tree.

pub mod error;
pub mod moments;
pub mod numerics;
pub mod padic;
pub mod period;
pub mod qmark;
pub mod spectral;
pub mod tree;

pub use error::{Error, Result};
pub use numerics::{BigComplex, BigReal, DenseMatrix};
