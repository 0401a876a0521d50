//! Closed-form moments of the rounded variable, checked against the exact
//! oracle.
//!
//! Three formula paths live here, all derived from the folded
//! characteristic function:
//!
//! * [`mean_rounded`] — the closed-form mean: for floor,
//!   `E⌊X⌋ = EX - 1/2 + 1/(2q) + Σ_{j=1}^{q-1} φ_X(2πj)/(q(1-e^{-2πij/q}))`,
//!   with even/odd-`q` variants for nearest rounding;
//! * [`second_moment_rounded`] — the analogous closed forms for `E⌊X⌋²`
//!   and `E⌊X⌉²`, which additionally involve `φ'_X(2πj)`;
//! * [`moment_rounded`] — every order `r ≥ 1` at once, by differentiating
//!   the product `kernel·φ_X` exactly as a trig polynomial and summing over
//!   `t = 2πj`: `E[round(X)^r] = i^{-r} Σ_j (kernel·φ_X)^{(r)}(2πj)`.
//!
//! Mirror modes reduce to the two primary ones at the distribution level:
//! the mean of `⌈X⌉` is minus the floor mean of `-X`, and second moments are
//! invariant under that negation since `⌈X⌉ = -⌊-X⌋` squares the sign away.
//!
//! Every result is returned as a [`MomentReport`] carrying the float formula
//! value, the exact oracle value, and their residual, so callers can judge
//! floating-point health directly.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::charfun::mode_kernel_poly;
use crate::lattice::{LatticeDistribution, RoundingMode};
use crate::trigpoly::{i_pow_neg, rational_to_f64, TrigPolynomial};
use crate::{Error, Rational, Result};

/// A moment computed by formula, paired with its exact oracle value.
///
/// `formula_value` is the real part of the formula's complex sum and
/// `imag_abs` the magnitude of the discarded imaginary part — in exact
/// arithmetic it would be zero, so a large value flags precision loss.
/// `oracle_value` comes from rounding the distribution exactly and taking
/// the exact rational moment; `residual = |formula_value - oracle|`.
#[derive(Debug, Clone)]
pub struct MomentReport {
    /// Rounding mode the moment refers to.
    pub mode: RoundingMode,
    /// Moment order `r` in `E[round(X)^r]`.
    pub r: u32,
    /// Real part of the formula evaluation.
    pub formula_value: f64,
    /// Magnitude of the imaginary part discarded from the formula sum.
    pub imag_abs: f64,
    /// Exact moment of the exactly-rounded distribution.
    pub oracle_value: Rational,
    /// `|formula_value - oracle_value|` after converting the oracle once.
    pub residual: f64,
}

impl MomentReport {
    fn from_complex(
        d: &LatticeDistribution,
        mode: RoundingMode,
        r: u32,
        value: Complex64,
    ) -> Self {
        let oracle_value = d.round_distribution(mode).exact_moment(r);
        let oracle_f64 = rational_to_f64(&oracle_value);
        MomentReport {
            mode,
            r,
            formula_value: value.re,
            imag_abs: value.im.abs(),
            oracle_value,
            residual: (value.re - oracle_f64).abs(),
        }
    }

    /// The oracle value as `f64` (converted once, to the nearest double).
    pub fn oracle_f64(&self) -> f64 {
        rational_to_f64(&self.oracle_value)
    }

    /// Whether the residual is within `tol · max(1, |oracle|)` — absolute
    /// near zero, relative for large moments.
    pub fn within(&self, tol: f64) -> bool {
        self.residual <= tol * self.oracle_f64().abs().max(1.0)
    }

    /// True when the discarded imaginary part exceeds
    /// `1e-9 · max(1, |formula_value|)`, signalling precision loss.
    pub fn imag_warning(&self) -> bool {
        self.imag_abs > 1e-9 * self.formula_value.abs().max(1.0)
    }
}

/// `1 - e^{-2πij/q}` — the denominator shared by the floor-side sums.
fn one_minus_root(j: u32, q: u32) -> Complex64 {
    Complex64::new(1.0, 0.0) - Complex64::cis(-TAU * f64::from(j) / f64::from(q))
}

fn parity_sign(j: u32) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `E⌊X⌋` as the complex closed-form sum, before real-part extraction.
fn floor_mean_complex(d: &LatticeDistribution) -> Complex64 {
    let q = d.q();
    let qf = f64::from(q);
    let phi = TrigPolynomial::from_distribution(d);
    let mut v = Complex64::new(d.mean_f64() - 0.5 + 1.0 / (2.0 * qf), 0.0);
    for j in 1..q {
        v += phi.evaluate(TAU * f64::from(j)) / (qf * one_minus_root(j, q));
    }
    v
}

/// `E⌊X⌉` as the complex closed-form sum (even and odd `q` differ).
fn nearest_mean_complex(d: &LatticeDistribution) -> Complex64 {
    let q = d.q();
    let qf = f64::from(q);
    let phi = TrigPolynomial::from_distribution(d);
    if q.is_multiple_of(2) {
        let mut v = Complex64::new(d.mean_f64() + 1.0 / (2.0 * qf), 0.0);
        for j in 1..q {
            v += parity_sign(j) * phi.evaluate(TAU * f64::from(j)) / (qf * one_minus_root(j, q));
        }
        v
    } else {
        let mut v = Complex64::new(d.mean_f64(), 0.0);
        for j in 1..q {
            let jf = f64::from(j);
            let denom = Complex64::cis(PI * jf / qf) - Complex64::cis(-PI * jf / qf);
            v += parity_sign(j) * phi.evaluate(TAU * jf) / (qf * denom);
        }
        v
    }
}

/// `E⌊X⌋²` as the complex closed-form sum.
fn floor_second_complex(d: &LatticeDistribution) -> Complex64 {
    let q = d.q();
    let qf = f64::from(q);
    let phi = TrigPolynomial::from_distribution(d);
    let dphi = phi.differentiate(1);
    let constant = d.second_moment_f64() + (2.0 * qf * qf - 3.0 * qf + 1.0) / (6.0 * qf * qf)
        - (qf - 1.0) / qf * d.mean_f64();
    let mut v = Complex64::new(constant, 0.0);
    let i = Complex64::new(0.0, 1.0);
    for j in 1..q {
        let t = TAU * f64::from(j);
        let denom = one_minus_root(j, q);
        let omega = Complex64::cis(-TAU * f64::from(j) / qf);
        v -= 2.0 * (i / (qf * denom)) * dphi.evaluate(t);
        v -= (1.0 / (qf * denom) + 2.0 * omega / (qf * qf * denom * denom)) * phi.evaluate(t);
    }
    v
}

/// `E⌊X⌉²` as the complex closed-form sum (even and odd `q` differ).
fn nearest_second_complex(d: &LatticeDistribution) -> Complex64 {
    let q = d.q();
    let qf = f64::from(q);
    let phi = TrigPolynomial::from_distribution(d);
    let dphi = phi.differentiate(1);
    let i = Complex64::new(0.0, 1.0);
    if q.is_multiple_of(2) {
        let constant =
            d.second_moment_f64() + 1.0 / 12.0 + 1.0 / (6.0 * qf * qf) + d.mean_f64() / qf;
        let mut v = Complex64::new(constant, 0.0);
        for j in 1..q {
            let t = TAU * f64::from(j);
            let sin = (PI * f64::from(j) / qf).sin();
            v -= 2.0 * (i * parity_sign(j) / (qf * one_minus_root(j, q))) * dphi.evaluate(t);
            v += parity_sign(j) / (2.0 * qf * qf * sin * sin) * phi.evaluate(t);
        }
        v
    } else {
        let constant = d.second_moment_f64() + 1.0 / 12.0 - 1.0 / (12.0 * qf * qf);
        let mut v = Complex64::new(constant, 0.0);
        for j in 1..q {
            let t = TAU * f64::from(j);
            let angle = PI * f64::from(j) / qf;
            let sin = angle.sin();
            v -= parity_sign(j) / (qf * sin) * dphi.evaluate(t);
            v += parity_sign(j) * angle.cos() / (2.0 * qf * qf * sin * sin) * phi.evaluate(t);
        }
        v
    }
}

/// Closed-form mean of the rounded variable, with its oracle comparison.
///
/// Floor and nearest-up use the printed closed forms directly; ceil and
/// nearest-down are computed as minus the mirror mode's mean of `-X`.
///
/// ```
/// use roundlat::{mean_rounded, rational, LatticeDistribution, RoundingMode};
/// let u3 = LatticeDistribution::uniform_u(3).unwrap();
/// let report = mean_rounded(&u3, RoundingMode::NearestUp);
/// assert_eq!(report.oracle_value, rational(1, 3)); // only 2/3 rounds up
/// assert!(report.within(1e-10));
/// ```
pub fn mean_rounded(d: &LatticeDistribution, mode: RoundingMode) -> MomentReport {
    let value = match mode {
        RoundingMode::Floor => floor_mean_complex(d),
        RoundingMode::NearestUp => nearest_mean_complex(d),
        RoundingMode::Ceil => -floor_mean_complex(&d.negate()),
        RoundingMode::NearestDown => -nearest_mean_complex(&d.negate()),
    };
    MomentReport::from_complex(d, mode, 1, value)
}

/// Closed-form second moment of the rounded variable, with its oracle
/// comparison.
///
/// Mirror modes negate the distribution and reuse the primary formulas
/// unchanged — squaring absorbs the sign of `⌈X⌉ = -⌊-X⌋`.
pub fn second_moment_rounded(d: &LatticeDistribution, mode: RoundingMode) -> MomentReport {
    let value = match mode {
        RoundingMode::Floor => floor_second_complex(d),
        RoundingMode::NearestUp => nearest_second_complex(d),
        RoundingMode::Ceil => floor_second_complex(&d.negate()),
        RoundingMode::NearestDown => nearest_second_complex(&d.negate()),
    };
    MomentReport::from_complex(d, mode, 2, value)
}

/// `E[round(X)^r]` for any order `r ≥ 1`, via exact differentiation of the
/// kernel–charfun product:
///
/// ```text
/// E[round(X)^r] = i^{-r} Σ_{j=0}^{q-1} (d^r/dt^r)(kernel·φ_X)(2πj)
/// ```
///
/// The product is a trig polynomial, so the `r`-th derivative is the exact
/// coefficient map `c_n ↦ c_n (in/q)^r` — no finite differences. Orders 1
/// and 2 agree with the closed forms of [`mean_rounded`] and
/// [`second_moment_rounded`] to within float roundoff.
///
/// Rejects `r = 0` (the value would be identically 1).
pub fn moment_rounded(d: &LatticeDistribution, mode: RoundingMode, r: u32) -> Result<MomentReport> {
    if r == 0 {
        return Err(Error::ZeroMomentOrder);
    }
    let q = d.q();
    let phi = TrigPolynomial::from_distribution(d);
    let product = mode_kernel_poly(q, mode)
        .multiply(&phi)
        .expect("kernel and charfun share the base lattice");
    let deriv = product.differentiate(r);
    let sum: Complex64 = (0..q).map(|j| deriv.evaluate(TAU * f64::from(j))).sum();
    Ok(MomentReport::from_complex(d, mode, r, i_pow_neg(r) * sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testsupport::arb_distribution;
    use crate::{rational, Rational};
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn floor_of_standard_uniform_is_zero() {
        // ⌊U_q⌋ = 0: both closed forms must cancel to zero exactly up to
        // float roundoff, which exercises the interior-j sums nontrivially.
        for q in 1..=20 {
            let d = LatticeDistribution::uniform_u(q).unwrap();
            let mean = mean_rounded(&d, RoundingMode::Floor);
            assert!(mean.oracle_value.is_zero());
            assert!(mean.formula_value.abs() < 1e-10, "q={q}: {}", mean.formula_value);
            let second = second_moment_rounded(&d, RoundingMode::Floor);
            assert!(second.oracle_value.is_zero());
            assert!(second.formula_value.abs() < 1e-10, "q={q}: {}", second.formula_value);
        }
    }

    #[test]
    fn nearest_of_centered_uniform_is_zero_for_odd_q() {
        for q in (1..=19).step_by(2) {
            let d = LatticeDistribution::uniform_u_tilde(q).unwrap();
            let mean = mean_rounded(&d, RoundingMode::NearestUp);
            assert!(mean.oracle_value.is_zero());
            assert!(mean.formula_value.abs() < 1e-10, "q={q}");
            let second = second_moment_rounded(&d, RoundingMode::NearestUp);
            assert!(second.oracle_value.is_zero());
            assert!(second.formula_value.abs() < 1e-10, "q={q}");
        }
    }

    #[test]
    fn nearest_mean_of_u3() {
        let d = LatticeDistribution::uniform_u(3).unwrap();
        let report = mean_rounded(&d, RoundingMode::NearestUp);
        assert_eq!(report.oracle_value, rational(1, 3));
        assert!(report.within(1e-10));
    }

    #[test]
    fn integer_valued_distribution_rounds_to_itself() {
        // q = 1: every formula collapses to the plain moment.
        let d = LatticeDistribution::from_weights(1, [(2, 1), (5, 3)]).unwrap();
        for mode in RoundingMode::ALL {
            let mean = mean_rounded(&d, mode);
            assert_eq!(mean.oracle_value, d.exact_moment(1));
            assert!(mean.within(1e-12));
            let second = second_moment_rounded(&d, mode);
            assert_eq!(second.oracle_value, d.exact_moment(2));
            assert!(second.within(1e-12));
        }
    }

    #[test]
    fn half_integer_lattice_closed_forms() {
        // q = 2 reduces the general formulas to single-term corrections:
        // E⌊X⌋ = EX - 1/4 + φ_X(2π)/4 and
        // E⌊X⌋² = E[X²] + 1/8 - EX/2 - (i/2)φ'_X(2π) - φ_X(2π)/8.
        let d = LatticeDistribution::from_weights(2, [(-3, 1), (0, 2), (1, 1)]).unwrap();
        let phi = TrigPolynomial::from_distribution(&d);
        let phi_2pi = phi.evaluate(TAU);
        let dphi_2pi = phi.differentiate(1).evaluate(TAU);
        let i = Complex64::new(0.0, 1.0);

        let mean = mean_rounded(&d, RoundingMode::Floor);
        let by_hand = d.mean_f64() - 0.25 + (phi_2pi / 4.0).re;
        assert!((mean.formula_value - by_hand).abs() < 1e-13);
        assert!(mean.within(1e-12));

        let second = second_moment_rounded(&d, RoundingMode::Floor);
        let by_hand = d.second_moment_f64() + 0.125 - d.mean_f64() / 2.0
            + (-(i / 2.0) * dphi_2pi - phi_2pi / 8.0).re;
        assert!((second.formula_value - by_hand).abs() < 1e-13);
        assert!(second.within(1e-12));

        // Nearest rounding on q = 2 coincides with ceiling.
        let nearest = mean_rounded(&d, RoundingMode::NearestUp);
        let ceil = mean_rounded(&d, RoundingMode::Ceil);
        assert_eq!(nearest.oracle_value, ceil.oracle_value);
        assert!((nearest.formula_value - ceil.formula_value).abs() < 1e-12);
    }

    #[test]
    fn cubed_floor_of_point_mass() {
        // ⌊7/3⌋ = 2, so the third moment is exactly 8.
        let d = LatticeDistribution::point_mass(3, 7).unwrap();
        let report = moment_rounded(&d, RoundingMode::Floor, 3).unwrap();
        assert_eq!(report.oracle_value, rational(8, 1));
        assert!(report.within(1e-10));
    }

    #[test]
    fn zero_order_is_rejected() {
        let d = LatticeDistribution::uniform_u(3).unwrap();
        assert_eq!(
            moment_rounded(&d, RoundingMode::Floor, 0).unwrap_err(),
            Error::ZeroMomentOrder
        );
    }

    #[test]
    fn imag_warning_triggers_on_large_imaginary_part() {
        let d = LatticeDistribution::uniform_u(3).unwrap();
        let mut report = mean_rounded(&d, RoundingMode::Floor);
        assert!(!report.imag_warning());
        report.imag_abs = 1e-6;
        assert!(report.imag_warning());
    }

    proptest! {
        #[test]
        fn closed_form_mean_matches_oracle(d in arb_distribution()) {
            for mode in RoundingMode::ALL {
                let report = mean_rounded(&d, mode);
                prop_assert!(report.within(1e-9), "{mode:?}: residual {}", report.residual);
                prop_assert!(!report.imag_warning());
            }
        }

        #[test]
        fn closed_form_second_moment_matches_oracle(d in arb_distribution()) {
            for mode in RoundingMode::ALL {
                let report = second_moment_rounded(&d, mode);
                prop_assert!(report.within(1e-8), "{mode:?}: residual {}", report.residual);
                prop_assert!(!report.imag_warning());
            }
        }

        #[test]
        fn derivative_path_matches_oracle_up_to_fourth_order(d in arb_distribution()) {
            for mode in RoundingMode::ALL {
                for r in 1..=4u32 {
                    let report = moment_rounded(&d, mode, r).unwrap();
                    prop_assert!(
                        report.within(1e-8),
                        "{mode:?}, r={r}: residual {}",
                        report.residual
                    );
                }
            }
        }

        #[test]
        fn three_paths_agree_pairwise(d in arb_distribution()) {
            for mode in RoundingMode::ALL {
                let m1 = mean_rounded(&d, mode);
                let t1 = moment_rounded(&d, mode, 1).unwrap();
                let scale1 = m1.oracle_f64().abs().max(1.0);
                prop_assert!((m1.formula_value - t1.formula_value).abs() <= 1e-9 * scale1);

                let m2 = second_moment_rounded(&d, mode);
                let t2 = moment_rounded(&d, mode, 2).unwrap();
                let scale2 = m2.oracle_f64().abs().max(1.0);
                prop_assert!((m2.formula_value - t2.formula_value).abs() <= 1e-9 * scale2);
            }
        }

        #[test]
        fn variance_from_reports_matches_oracle_variance(d in arb_distribution()) {
            for mode in RoundingMode::ALL {
                let m1 = mean_rounded(&d, mode).formula_value;
                let m2 = second_moment_rounded(&d, mode).formula_value;
                let oracle: Rational = d.round_distribution(mode).exact_variance();
                let oracle = rational_to_f64(&oracle);
                prop_assert!((m2 - m1 * m1 - oracle).abs() <= 1e-8 * oracle.abs().max(1.0));
            }
        }
    }
}
