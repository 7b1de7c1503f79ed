//! Precision-parameterized arithmetic, special functions and dense linear algebra.

mod complex;
mod eigen;
mod matrix;
mod quad;
mod special;

pub use complex::BigComplex;
pub use eigen::{eigen_refine, hessenberg_qr_eigenvalues};
pub use matrix::{norm_inf, solve_dense, DenseMatrix, Lu};
pub use quad::{integrate_panel, GaussLegendre, Integral};
pub use special::{bessel_j, bessel_j_f64, binomial, fubini, fubini_table, gamma, polylog_half, polylog_half_table, zeta, zeta_and_gamma};

use rug::float::Constant;
use rug::Float;

/// Arbitrary-precision real; the precision travels with the value.
pub type BigReal = Float;

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 192;

pub fn zero(prec: u32) -> BigReal {
    Float::new(prec)
}

pub fn from_f64(prec: u32, x: f64) -> BigReal {
    Float::with_val(prec, x)
}

pub fn from_ratio(prec: u32, p: i64, q: i64) -> BigReal {
    Float::with_val(prec, p) / q
}

pub fn pi(prec: u32) -> BigReal {
    Float::with_val(prec, Constant::Pi)
}

pub fn ln2(prec: u32) -> BigReal {
    Float::with_val(prec, Constant::Log2)
}

/// 2^e as a real of the given precision.
pub fn pow2(prec: u32, e: i32) -> BigReal {
    Float::with_val(prec, 1) << e
}

/// |a - b| <= tol, the only sanctioned way to compare reals for equality.
pub fn approx_eq(a: &BigReal, b: &BigReal, tol: &BigReal) -> bool {
    let d = Float::with_val(a.prec().max(b.prec()), a - b);
    d.abs() <= *tol
}

/// log2 of |x|, or -inf for zero.
pub fn log2_abs(x: &BigReal) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log2() + e as f64
}
