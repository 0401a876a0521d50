//! Rounding kernels and the folded characteristic function of a rounded
//! variable.
//!
//! Rounding acts on characteristic functions through two kernels:
//!
//! * the *floor kernel* `h_q(t) = (1/q) Σ_{k=0}^{q-1} e^{-itk/q}`, the
//!   characteristic function of `-U_q`;
//! * the *nearest kernel* `ĥ_q(t) = (1/q) Σ_k e^{-itk/q}` over the centered
//!   range of `Ũ_q`, the characteristic function of `-Ũ_q`.
//!
//! For a variable `X` on `(1/q)ℤ`, the characteristic function of the
//! rounded variable is the `q`-term fold
//!
//! ```text
//! φ_round(X)(t) = Σ_{j=0}^{q-1} kernel(t + 2πj) · φ_X(t + 2πj)
//! ```
//!
//! with `kernel = h_q` for [`Floor`](RoundingMode::Floor), `ĥ_q` for
//! [`NearestUp`](RoundingMode::NearestUp), and the reflections `h_q(-·)`,
//! `ĥ_q(-·)` for the mirror modes. The summand has period `2πq` in the
//! shift, so `j` may range over any `q` consecutive integers; the shifted
//! variant below exposes that freedom for testing.
//!
//! Kernels are always evaluated as the defining finite sums, never via the
//! `sin(t/2)/sin(t/2q)` quotient forms, so the removable singularities of
//! the quotients never arise. The quotient forms appear only in this
//! module's cross-check tests.

use num_complex::Complex64;

use crate::lattice::{LatticeDistribution, RoundingMode};
use crate::trigpoly::TrigPolynomial;

/// Start of the centered support `{lo, …, lo+q-1}` of `Ũ_q`.
fn centered_lo(q: u32) -> i64 {
    if q.is_multiple_of(2) {
        -(i64::from(q) / 2)
    } else {
        -((i64::from(q) - 1) / 2)
    }
}

/// The floor kernel `h_q(t) = (1/q) Σ_{k=0}^{q-1} e^{-itk/q}`.
///
/// Evaluates the finite sum directly; in particular `h_q(0) = 1` and
/// `h_q(2πj) = 0` for `j ≢ 0 (mod q)` come out automatically, with no
/// continuity special-casing.
///
/// ```
/// use roundlat::floor_kernel;
/// assert!((floor_kernel(2, 0.0).re - 1.0).abs() < 1e-15);
/// assert!(floor_kernel(2, std::f64::consts::TAU).norm() < 1e-15); // h_2(2π) = 0
/// ```
///
/// # Panics
///
/// Panics if `q = 0`.
pub fn floor_kernel(q: u32, t: f64) -> Complex64 {
    assert!(q >= 1, "kernel needs a positive lattice denominator");
    let qf = f64::from(q);
    (0..q)
        .map(|k| Complex64::cis(-t * f64::from(k) / qf))
        .sum::<Complex64>()
        / qf
}

/// The nearest kernel `ĥ_q(t) = (1/q) Σ_k e^{-itk/q}` over the centered
/// support of `Ũ_q` (`k = -q/2, …, q/2-1` for even `q`; symmetric for odd).
///
/// For odd `q` the sum telescopes to a real, even function of `t`.
///
/// # Panics
///
/// Panics if `q = 0`.
pub fn nearest_kernel(q: u32, t: f64) -> Complex64 {
    assert!(q >= 1, "kernel needs a positive lattice denominator");
    let qf = f64::from(q);
    let lo = centered_lo(q);
    (lo..lo + i64::from(q))
        .map(|k| Complex64::cis(-t * k as f64 / qf))
        .sum::<Complex64>()
        / qf
}

/// The floor kernel as a [`TrigPolynomial`] on base lattice `(1/q)ℤ`:
/// coefficient `1/q` at each frequency `-k`, `k = 0, …, q-1`.
///
/// # Panics
///
/// Panics if `q = 0`.
pub fn floor_kernel_poly(q: u32) -> TrigPolynomial {
    assert!(q >= 1, "kernel needs a positive lattice denominator");
    let c = Complex64::new(1.0 / f64::from(q), 0.0);
    TrigPolynomial::from_terms(q, (0..i64::from(q)).map(|k| (-k, c)))
        .expect("q is positive")
}

/// The nearest kernel as a [`TrigPolynomial`] on base lattice `(1/q)ℤ`.
///
/// # Panics
///
/// Panics if `q = 0`.
pub fn nearest_kernel_poly(q: u32) -> TrigPolynomial {
    assert!(q >= 1, "kernel needs a positive lattice denominator");
    let c = Complex64::new(1.0 / f64::from(q), 0.0);
    let lo = centered_lo(q);
    TrigPolynomial::from_terms(q, (lo..lo + i64::from(q)).map(|k| (-k, c)))
        .expect("q is positive")
}

/// The kernel attached to a rounding mode, evaluated at `s`: `h_q(s)` for
/// floor, `ĥ_q(s)` for nearest-up, and the reflected `h_q(-s)`, `ĥ_q(-s)`
/// for their mirrors.
pub(crate) fn mode_kernel(q: u32, mode: RoundingMode, s: f64) -> Complex64 {
    match mode {
        RoundingMode::Floor => floor_kernel(q, s),
        RoundingMode::Ceil => floor_kernel(q, -s),
        RoundingMode::NearestUp => nearest_kernel(q, s),
        RoundingMode::NearestDown => nearest_kernel(q, -s),
    }
}

/// The same mode-to-kernel mapping as a trig polynomial, for the moment
/// formulas that differentiate the fold instead of evaluating it.
pub(crate) fn mode_kernel_poly(q: u32, mode: RoundingMode) -> TrigPolynomial {
    match mode {
        RoundingMode::Floor => floor_kernel_poly(q),
        RoundingMode::Ceil => floor_kernel_poly(q).mirror(),
        RoundingMode::NearestUp => nearest_kernel_poly(q),
        RoundingMode::NearestDown => nearest_kernel_poly(q).mirror(),
    }
}

/// Characteristic function of the rounded variable at `t`, via the fold
/// `Σ_{j=0}^{q-1} kernel(t + 2πj) φ_X(t + 2πj)`.
///
/// ```
/// use roundlat::{charfun_rounded, LatticeDistribution, RoundingMode};
/// // ⌊U_3⌋ = 0, so the folded characteristic function is identically 1.
/// let u3 = LatticeDistribution::uniform_u(3).unwrap();
/// let v = charfun_rounded(&u3, RoundingMode::Floor, 1.9);
/// assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
/// ```
pub fn charfun_rounded(d: &LatticeDistribution, mode: RoundingMode, t: f64) -> Complex64 {
    charfun_rounded_shifted(d, mode, t, 0)
}

/// The fold with `j` running over `m, …, m+q-1` instead of `0, …, q-1`.
///
/// Each summand has period `q` in `j`, so the value is independent of `m`;
/// this variant exists to make that invariance testable.
pub fn charfun_rounded_shifted(
    d: &LatticeDistribution,
    mode: RoundingMode,
    t: f64,
    m: i64,
) -> Complex64 {
    let q = d.q();
    let phi = TrigPolynomial::from_distribution(d);
    (m..m + i64::from(q))
        .map(|j| {
            let s = t + std::f64::consts::TAU * j as f64;
            mode_kernel(q, mode, s) * phi.evaluate(s)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testsupport::arb_distribution;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// Quotient form of the floor kernel, valid away from `t ∈ 2πqℤ`;
    /// used only to cross-check the finite sums.
    fn floor_kernel_quotient(q: u32, t: f64) -> Complex64 {
        let qf = f64::from(q);
        Complex64::cis(-t * (qf - 1.0) / (2.0 * qf)) * (t / 2.0).sin()
            / (qf * (t / (2.0 * qf)).sin())
    }

    #[test]
    fn kernels_are_one_at_zero() {
        for q in 1..=12 {
            assert!(close(floor_kernel(q, 0.0), Complex64::new(1.0, 0.0), 1e-15));
            assert!(close(nearest_kernel(q, 0.0), Complex64::new(1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn floor_kernel_vanishes_at_interior_multiples_of_two_pi() {
        for q in 2..=12 {
            for j in 1..q {
                let t = TAU * f64::from(j);
                assert!(
                    floor_kernel(q, t).norm() < 1e-12,
                    "h_{q}(2π·{j}) should vanish"
                );
            }
            // ... and returns to 1 after a full period 2πq.
            assert!(close(
                floor_kernel(q, TAU * f64::from(q)),
                Complex64::new(1.0, 0.0),
                1e-12
            ));
        }
    }

    #[test]
    fn floor_kernel_pinned_value_q3() {
        // h_3(π) = (1/3)(1 + e^{-iπ/3} + e^{-2iπ/3}) = (1 - i√3)/3
        let got = floor_kernel(3, PI);
        let want = Complex64::new(1.0 / 3.0, -(3.0f64.sqrt()) / 3.0);
        assert!(close(got, want, 1e-15), "{got} vs {want}");
    }

    #[test]
    fn nearest_kernel_pinned_value_q3() {
        // ĥ_3(π) = (1/3)(1 + 2cos(π/3)) = 2/3, real
        let got = nearest_kernel(3, PI);
        assert!(close(got, Complex64::new(2.0 / 3.0, 0.0), 1e-15), "{got}");
    }

    #[test]
    fn floor_kernel_matches_quotient_form() {
        for q in 1..=9 {
            for i in 1..40 {
                let t = -20.0 + 1.03 * f64::from(i); // avoids 2πq multiples
                assert!(
                    close(floor_kernel(q, t), floor_kernel_quotient(q, t), 1e-12),
                    "q={q}, t={t}"
                );
            }
        }
    }

    #[test]
    fn nearest_kernel_odd_q_matches_dirichlet_quotient() {
        // Odd q: ĥ_q(t) = sin(t/2) / (q sin(t/2q)), real and even.
        for q in [1u32, 3, 5, 7, 9, 11] {
            let qf = f64::from(q);
            for i in 1..40 {
                let t = -20.0 + 1.03 * f64::from(i);
                let quotient = (t / 2.0).sin() / (qf * (t / (2.0 * qf)).sin());
                let got = nearest_kernel(q, t);
                assert!(close(got, Complex64::new(quotient, 0.0), 1e-12), "q={q}, t={t}");
                assert!(close(got, nearest_kernel(q, -t), 1e-12), "even in t");
            }
        }
    }

    #[test]
    fn nearest_kernel_even_q_is_half_shifted_floor_kernel() {
        // Even q: ĥ_q(t) = e^{it/2} h_q(t).
        for q in [2u32, 4, 6, 10] {
            for i in 0..30 {
                let t = -15.0 + 1.1 * f64::from(i);
                let want = Complex64::cis(t / 2.0) * floor_kernel(q, t);
                assert!(close(nearest_kernel(q, t), want, 1e-13), "q={q}, t={t}");
            }
        }
    }

    #[test]
    fn kernel_polys_agree_with_scalar_kernels() {
        for q in 1..=8 {
            let fp = floor_kernel_poly(q);
            let np = nearest_kernel_poly(q);
            assert_eq!(fp.term_count(), q as usize);
            assert_eq!(np.term_count(), q as usize);
            for i in 0..25 {
                let t = -12.0 + 1.07 * f64::from(i);
                assert!(close(fp.evaluate(t), floor_kernel(q, t), 1e-13));
                assert!(close(np.evaluate(t), nearest_kernel(q, t), 1e-13));
            }
        }
    }

    #[test]
    fn kernel_modulus_never_exceeds_one() {
        for q in 1..=10 {
            for i in 0..100 {
                let t = -31.0 + 0.63 * f64::from(i);
                assert!(floor_kernel(q, t).norm() <= 1.0 + 1e-12);
                assert!(nearest_kernel(q, t).norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn fold_of_uniform_floor_is_identically_one() {
        let u5 = LatticeDistribution::uniform_u(5).unwrap();
        for i in 0..40 {
            let t = -9.0 + 0.47 * f64::from(i);
            let v = charfun_rounded(&u5, RoundingMode::Floor, t);
            assert!(close(v, Complex64::new(1.0, 0.0), 1e-12), "t={t}: {v}");
        }
    }

    #[test]
    fn fold_at_zero_is_one_for_every_mode() {
        let d = LatticeDistribution::from_weights(7, [(-10, 3), (2, 1), (13, 2)]).unwrap();
        for mode in RoundingMode::ALL {
            assert!(close(
                charfun_rounded(&d, mode, 0.0),
                Complex64::new(1.0, 0.0),
                1e-12
            ));
        }
    }

    /// φ of the exactly-rounded distribution, the oracle the fold must match.
    fn oracle_charfun(d: &LatticeDistribution, mode: RoundingMode, t: f64) -> Complex64 {
        TrigPolynomial::from_distribution(&d.round_distribution(mode)).evaluate(t)
    }

    #[test]
    fn fold_matches_oracle_on_point_masses() {
        // Point mass at -3/2: ⌊X⌋ = -2, ⌈X⌉ = -1, ⌊X⌉ = -1, nearest-down -2.
        let d = LatticeDistribution::point_mass(2, -3).unwrap();
        for mode in RoundingMode::ALL {
            let m = mode.round_lattice_point(-3, 2) as f64;
            for &t in &[0.0, 0.8, -2.5, 6.0] {
                let got = charfun_rounded(&d, mode, t);
                assert!(close(got, Complex64::cis(t * m), 1e-12), "{mode:?}, t={t}");
            }
        }
    }

    proptest! {
        #[test]
        fn fold_matches_oracle(d in arb_distribution(), t in -20.0f64..20.0) {
            for mode in RoundingMode::ALL {
                let got = charfun_rounded(&d, mode, t);
                let want = oracle_charfun(&d, mode, t);
                prop_assert!(close(got, want, 1e-10), "{mode:?}: {got} vs {want}");
            }
        }

        #[test]
        fn fold_is_hermitian_and_bounded(d in arb_distribution(), t in -20.0f64..20.0) {
            for mode in RoundingMode::ALL {
                let plus = charfun_rounded(&d, mode, t);
                let minus = charfun_rounded(&d, mode, -t);
                prop_assert!(close(minus, plus.conj(), 1e-11));
                prop_assert!(plus.norm() <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn fold_has_period_two_pi(d in arb_distribution(), t in -10.0f64..10.0) {
            for mode in RoundingMode::ALL {
                let a = charfun_rounded(&d, mode, t);
                let b = charfun_rounded(&d, mode, t + TAU);
                prop_assert!(close(a, b, 1e-10));
            }
        }

        #[test]
        fn fold_ignores_residue_system_choice(d in arb_distribution(), t in -10.0f64..10.0) {
            let q = i64::from(d.q());
            for mode in RoundingMode::ALL {
                let base = charfun_rounded(&d, mode, t);
                for m in [-3, 1, q] {
                    let shifted = charfun_rounded_shifted(&d, mode, t, m);
                    prop_assert!(close(base, shifted, 1e-10), "{mode:?}, m={m}");
                }
            }
        }

        #[test]
        fn ceil_fold_equals_negated_floor_fold(d in arb_distribution(), t in -10.0f64..10.0) {
            // ⌈X⌉ = -⌊-X⌋, so φ_⌈X⌉(t) = φ_⌊-X⌋(-t); same for nearest-down.
            let neg = d.negate();
            let a = charfun_rounded(&d, RoundingMode::Ceil, t);
            let b = charfun_rounded(&neg, RoundingMode::Floor, -t);
            prop_assert!(close(a, b, 1e-10));

            let c = charfun_rounded(&d, RoundingMode::NearestDown, t);
            let e = charfun_rounded(&neg, RoundingMode::NearestUp, -t);
            prop_assert!(close(c, e, 1e-10));
        }
    }

    // ---- Pinned derivative values of the kernels -------------------------
    //
    // The moment formulas absorb the kernel derivatives at 0 and 2πj into
    // their printed coefficients. These tests re-derive each value from the
    // trig-polynomial representation, so a drift in either side gets caught.

    fn kernel_derivative(poly: &TrigPolynomial, r: u32, t: f64) -> Complex64 {
        poly.differentiate(r).evaluate(t)
    }

    #[test]
    fn floor_kernel_first_derivative_values() {
        for q in 2..=20u32 {
            let p = floor_kernel_poly(q);
            let qf = f64::from(q);
            // h_q'(0) = -i(q-1)/(2q)
            let want0 = Complex64::new(0.0, -(qf - 1.0) / (2.0 * qf));
            assert!(close(kernel_derivative(&p, 1, 0.0), want0, 1e-12), "q={q}");
            // h_q'(2πj) = i / (q(1 - e^{-2πij/q})), j = 1..q-1
            for j in 1..q {
                let t = TAU * f64::from(j);
                let denom = Complex64::new(1.0, 0.0) - Complex64::cis(-TAU * f64::from(j) / qf);
                let want = Complex64::new(0.0, 1.0) / (qf * denom);
                assert!(close(kernel_derivative(&p, 1, t), want, 1e-10), "q={q}, j={j}");
            }
        }
    }

    #[test]
    fn nearest_kernel_first_derivative_values() {
        for q in 2..=20u32 {
            let p = nearest_kernel_poly(q);
            let qf = f64::from(q);
            let at0 = kernel_derivative(&p, 1, 0.0);
            if q % 2 == 0 {
                // ĥ_q'(0) = i/(2q) for even q
                assert!(close(at0, Complex64::new(0.0, 1.0 / (2.0 * qf)), 1e-12), "q={q}");
            } else {
                // ... and 0 for odd q (symmetric support)
                assert!(at0.norm() < 1e-12, "q={q}");
            }
            for j in 1..q {
                let t = TAU * f64::from(j);
                let got = kernel_derivative(&p, 1, t);
                let want = if q % 2 == 0 {
                    // ĥ_q'(2πj) = i(-1)^j / (q(1 - e^{-2πij/q}))
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let denom =
                        Complex64::new(1.0, 0.0) - Complex64::cis(-TAU * f64::from(j) / qf);
                    Complex64::new(0.0, sign) / (qf * denom)
                } else {
                    // ĥ_q'(2πj) = (-1)^j / (2q sin(πj/q)), real
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    Complex64::new(sign / (2.0 * qf * (PI * f64::from(j) / qf).sin()), 0.0)
                };
                assert!(close(got, want, 1e-10), "q={q}, j={j}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn floor_kernel_second_derivative_values() {
        for q in 2..=20u32 {
            let p = floor_kernel_poly(q);
            let qf = f64::from(q);
            // h_q''(0) = -(2q² - 3q + 1)/(6q²)
            let want0 = Complex64::new(-(2.0 * qf * qf - 3.0 * qf + 1.0) / (6.0 * qf * qf), 0.0);
            assert!(close(kernel_derivative(&p, 2, 0.0), want0, 1e-12), "q={q}");
            // h_q''(2πj) = 1/(q(1-ω)) + 2ω/(q²(1-ω)²), ω = e^{-2πij/q}
            for j in 1..q {
                let t = TAU * f64::from(j);
                let omega = Complex64::cis(-TAU * f64::from(j) / qf);
                let one = Complex64::new(1.0, 0.0);
                let want = one / (qf * (one - omega))
                    + 2.0 * omega / (qf * qf * (one - omega) * (one - omega));
                assert!(close(kernel_derivative(&p, 2, t), want, 1e-10), "q={q}, j={j}");
            }
        }
    }

    #[test]
    fn nearest_kernel_second_derivative_values() {
        for q in 2..=20u32 {
            let p = nearest_kernel_poly(q);
            let qf = f64::from(q);
            let want0 = if q % 2 == 0 {
                // ĥ_q''(0) = -(q² + 2)/(12q²) for even q
                -(qf * qf + 2.0) / (12.0 * qf * qf)
            } else {
                // ĥ_q''(0) = -(q² - 1)/(12q²) for odd q
                -(qf * qf - 1.0) / (12.0 * qf * qf)
            };
            assert!(
                close(kernel_derivative(&p, 2, 0.0), Complex64::new(want0, 0.0), 1e-12),
                "q={q}"
            );
            for j in 1..q {
                let t = TAU * f64::from(j);
                let sign = if j % 2 == 0 { -1.0 } else { 1.0 }; // (-1)^{j+1}
                let s = (PI * f64::from(j) / qf).sin();
                let want = if q % 2 == 0 {
                    // ĥ_q''(2πj) = (-1)^{j+1} / (2q² sin²(πj/q))
                    sign / (2.0 * qf * qf * s * s)
                } else {
                    // ĥ_q''(2πj) = (-1)^{j+1} cos(πj/q) / (2q² sin²(πj/q))
                    sign * (PI * f64::from(j) / qf).cos() / (2.0 * qf * qf * s * s)
                };
                assert!(
                    close(kernel_derivative(&p, 2, t), Complex64::new(want, 0.0), 1e-10),
                    "q={q}, j={j}"
                );
            }
        }
    }
}
