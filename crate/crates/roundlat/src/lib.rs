//! Characteristic functions and exact moments of rounded lattice random
//! variables.
//!
//! A random variable `X` is *lattice-valued* when `qX` is integer-valued for
//! some fixed positive integer `q`, i.e. `X` lives on the lattice `(1/q)ℤ`.
//! Rounding `X` to an integer — downwards, upwards, or to the nearest
//! integer — produces a new integer-valued variable. Its characteristic
//! function is a folded sum
//!
//! ```text
//! φ_round(X)(t) = Σ_{j=0}^{q-1} kernel_q(t + 2πj) · φ_X(t + 2πj)
//! ```
//!
//! where `kernel_q` is the characteristic function of `-U_q` (floor) or of
//! `-Ũ_q` (nearest), the negated discrete uniforms on the lattice points of
//! `[0,1)` and `[-1/2,1/2)`. Differentiating the fold gives closed forms for
//! every moment of the rounded variable.
//!
//! This crate implements both sides of that story:
//!
//! * **formula path** — the folded characteristic function, closed-form mean
//!   and second moment, and general r-th moments obtained by exact
//!   differentiation of trigonometric polynomials (no numerical
//!   differentiation anywhere);
//! * **oracle path** — distributions carry exact rational probabilities, so
//!   rounding and moments can be brute-forced bit-exactly; every formula is
//!   verified against this oracle.
//!
//! # Quick start
//!
//! ```
//! use roundlat::{LatticeDistribution, RoundingMode, mean_rounded};
//!
//! // X uniform on {0, 1/3, 2/3}
//! let x = LatticeDistribution::uniform_u(3).unwrap();
//!
//! // ⌊X⌋ = 0, so every moment of the floor is exactly zero.
//! let report = mean_rounded(&x, RoundingMode::Floor);
//! assert!(report.formula_value.abs() < 1e-12);
//! assert_eq!(report.oracle_value, roundlat::Rational::from_integer(0.into()));
//! ```
//!
//! The [`verify`] module packages the library's self-checks (a trigonometric
//! identity, two worked examples, the exact mirror laws) as named,
//! deterministic checks; the `roundlat` CLI exposes them together with moment
//! and characteristic-function reports.

#![forbid(unsafe_code)]

mod error;

#[cfg(test)]
pub(crate) mod testsupport;

pub mod charfun;
pub mod lattice;
pub mod moments;
pub mod sheppard;
pub mod trigpoly;
pub mod verify;

#[cfg(doctest)]
mod book;

pub use charfun::{
    charfun_rounded, charfun_rounded_shifted, floor_kernel, floor_kernel_poly, nearest_kernel,
    nearest_kernel_poly,
};
pub use error::Error;
pub use lattice::{LatticeDistribution, RoundingMode};
pub use moments::{mean_rounded, moment_rounded, second_moment_rounded, MomentReport};
pub use sheppard::{
    build_weighted_sum, nonvanishing_set, sheppard_report, sweep, sweep_csv, SheppardReport,
    SweepConfig,
};
pub use trigpoly::TrigPolynomial;
pub use verify::{run_all, CheckResult, VerifyConfig};

/// Exact rational number used for probabilities and oracle moments.
pub type Rational = num_rational::BigRational;

/// Convenience result alias for fallible operations in this crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for building a [`Rational`] from an integer numerator and
/// denominator.
///
/// ```
/// use roundlat::rational;
/// assert_eq!(rational(2, 4), rational(1, 2));
/// ```
///
/// # Panics
///
/// Panics if `den` is zero.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
