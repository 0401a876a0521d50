//! Finite trigonometric polynomials with exact term-by-term differentiation.
//!
//! Characteristic functions of lattice variables, the rounding kernels, and
//! any product of the two are all finite sums `f(t) = Σ_n c_n e^{itn/q}`.
//! [`TrigPolynomial`] stores the coefficients `c_n` indexed by the integer
//! frequency `n`, so differentiation is the exact coefficient map
//! `c_n ↦ c_n · (in/q)^r` — no numeric limits, no step sizes. Evaluating the
//! `r`-th derivative at a point therefore costs one pass over the terms and
//! its only error is the final floating-point summation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::lattice::LatticeDistribution;
use crate::{Error, Rational, Result};

/// Converts an exact rational to the nearest `f64`.
pub(crate) fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().expect("finite rational converts to f64")
}

/// `i^r`, computed exactly from `r mod 4` (never via complex `powi`).
pub(crate) fn i_pow(r: u32) -> Complex64 {
    match r % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `i^{-r}`, the inverse of [`i_pow`]: `1, -i, -1, i` for `r mod 4 = 0..3`.
pub(crate) fn i_pow_neg(r: u32) -> Complex64 {
    i_pow(r.rem_euclid(4) * 3 % 4)
}

/// A finite sum `f(t) = Σ_n c_n e^{itn/q}`, stored sparsely by frequency.
///
/// The `base_q` is the lattice denominator of the frequencies: a term with
/// index `n` oscillates as `e^{itn/q}`. Every function of interest in this
/// crate has this shape, which makes differentiation exact:
///
/// ```
/// use roundlat::{LatticeDistribution, TrigPolynomial};
/// let phi = TrigPolynomial::from_distribution(&LatticeDistribution::uniform_u(4).unwrap());
/// // φ'(0) = i·E[X], and E[U_4] = 3/8.
/// let d = phi.differentiate(1);
/// assert!((d.evaluate(0.0).im - 0.375).abs() < 1e-15);
/// assert!(d.evaluate(0.0).re.abs() < 1e-15);
/// ```
#[derive(Debug, Clone)]
pub struct TrigPolynomial {
    base_q: u32,
    coeffs: BTreeMap<i64, Complex64>,
}

impl TrigPolynomial {
    /// Builds a polynomial from `(frequency, coefficient)` terms on the base
    /// lattice `(1/q)ℤ`; duplicate frequencies are summed.
    pub fn from_terms<I>(base_q: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        if base_q == 0 {
            return Err(Error::ZeroLatticeDenominator);
        }
        let mut coeffs: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, c) in terms {
            *coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        Ok(TrigPolynomial { base_q, coeffs })
    }

    /// The constant function `f(t) = c`.
    pub fn constant(c: Complex64) -> Self {
        TrigPolynomial {
            base_q: 1,
            coeffs: BTreeMap::from([(0, c)]),
        }
    }

    /// The characteristic function `φ_X(t) = E[e^{itX}] = Σ_k p_k e^{itk/q}`
    /// of a lattice distribution — one term per support point, with the
    /// exact probability rounded once to `f64`.
    pub fn from_distribution(d: &LatticeDistribution) -> Self {
        TrigPolynomial {
            base_q: d.q(),
            coeffs: d
                .iter()
                .map(|(k, p)| (k, Complex64::new(rational_to_f64(p), 0.0)))
                .collect(),
        }
    }

    /// The frequency lattice denominator `q`.
    pub fn base_q(&self) -> u32 {
        self.base_q
    }

    /// Number of stored terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.len()
    }

    /// The coefficient of `e^{itn/q}` (zero when absent).
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Iterates over `(frequency, coefficient)` terms in increasing frequency.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    /// Evaluates `Σ_n c_n e^{itn/q}` at `t`.
    pub fn evaluate(&self, t: f64) -> Complex64 {
        let q = f64::from(self.base_q);
        self.coeffs
            .iter()
            .map(|(&n, c)| c * Complex64::cis(t * n as f64 / q))
            .sum()
    }

    /// The product `f·g` as a trig polynomial (coefficient convolution).
    ///
    /// Both factors must live on the same base lattice; callers rescale with
    /// [`scale_base`](Self::scale_base) first when they do not.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.base_q != other.base_q {
            return Err(Error::LatticeMismatch(self.base_q, other.base_q));
        }
        let mut coeffs: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (&na, ca) in &self.coeffs {
            for (&nb, cb) in &other.coeffs {
                let n = na.checked_add(nb).ok_or(Error::SupportOverflow)?;
                *coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        Ok(TrigPolynomial {
            base_q: self.base_q,
            coeffs,
        })
    }

    /// The exact `r`-th derivative: `c_n ↦ c_n · (in/q)^r`.
    ///
    /// The factor is computed as `i^r · (n/q)^r` with `i^r` resolved by
    /// `r mod 4`, so no rounding enters beyond the single real power.
    pub fn differentiate(&self, r: u32) -> Self {
        if r == 0 {
            return self.clone();
        }
        let q = f64::from(self.base_q);
        let rot = i_pow(r);
        TrigPolynomial {
            base_q: self.base_q,
            coeffs: self
                .coeffs
                .iter()
                .filter(|&(&n, _)| n != 0)
                .map(|(&n, c)| (n, c * rot * (n as f64 / q).powi(r as i32)))
                .collect(),
        }
    }

    /// The reflection `t ↦ f(-t)` (frequency `n` becomes `-n`).
    pub fn mirror(&self) -> Self {
        TrigPolynomial {
            base_q: self.base_q,
            coeffs: self.coeffs.iter().map(|(&n, &c)| (-n, c)).collect(),
        }
    }

    /// Re-expresses the polynomial on the finer base lattice `1/(mq)ℤ`
    /// without changing its values (`e^{itn/q} = e^{it(mn)/(mq)}`).
    pub fn scale_base(&self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroScale);
        }
        let base_q = self.base_q.checked_mul(m).ok_or(Error::SupportOverflow)?;
        let m = i64::from(m);
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&n, &c)| Ok((n.checked_mul(m).ok_or(Error::SupportOverflow)?, c)))
            .collect::<Result<_>>()?;
        Ok(TrigPolynomial { base_q, coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn i_pow_cycles_exactly() {
        let i = Complex64::new(0.0, 1.0);
        for r in 0..12u32 {
            let expect = [
                Complex64::new(1.0, 0.0),
                i,
                Complex64::new(-1.0, 0.0),
                -i,
            ][(r % 4) as usize];
            assert_eq!(i_pow(r), expect);
            assert_eq!(i_pow(r) * i_pow_neg(r), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn evaluate_single_term_is_cis() {
        let f = TrigPolynomial::from_terms(3, [(2, Complex64::new(1.0, 0.0))]).unwrap();
        let t = 1.7;
        assert!(close(f.evaluate(t), Complex64::cis(2.0 * t / 3.0), 1e-15));
    }

    #[test]
    fn charfun_at_zero_is_one() {
        for q in 1..=8 {
            let d = LatticeDistribution::uniform_u(q).unwrap();
            let phi = TrigPolynomial::from_distribution(&d);
            assert!(close(phi.evaluate(0.0), Complex64::new(1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn charfun_has_period_two_pi_q() {
        let d = LatticeDistribution::from_weights(5, [(-3, 2), (1, 1), (7, 3)]).unwrap();
        let phi = TrigPolynomial::from_distribution(&d);
        for &t in &[0.3, -2.0, 11.5] {
            let period = 2.0 * PI * 5.0;
            assert!(close(phi.evaluate(t), phi.evaluate(t + period), 1e-12));
        }
    }

    #[test]
    fn multiply_matches_pointwise_product() {
        let d1 = LatticeDistribution::from_weights(4, [(0, 1), (3, 2)]).unwrap();
        let d2 = LatticeDistribution::from_weights(4, [(-2, 1), (1, 1)]).unwrap();
        let f = TrigPolynomial::from_distribution(&d1);
        let g = TrigPolynomial::from_distribution(&d2);
        let fg = f.multiply(&g).unwrap();
        for &t in &[0.0, 0.9, -4.2, 17.0] {
            assert!(close(fg.evaluate(t), f.evaluate(t) * g.evaluate(t), 1e-14));
        }
    }

    #[test]
    fn multiply_requires_common_base() {
        let f = TrigPolynomial::constant(Complex64::new(1.0, 0.0));
        let g = TrigPolynomial::from_terms(3, [(1, Complex64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(f.multiply(&g), Err(Error::LatticeMismatch(1, 3))));
        // scale_base reconciles the lattices without changing values.
        let f3 = f.scale_base(3).unwrap();
        let fg = f3.multiply(&g).unwrap();
        assert!(close(fg.evaluate(0.7), g.evaluate(0.7), 1e-15));
    }

    #[test]
    fn scale_base_preserves_values() {
        let d = LatticeDistribution::from_weights(3, [(-1, 1), (2, 2)]).unwrap();
        let f = TrigPolynomial::from_distribution(&d);
        let g = f.scale_base(4).unwrap();
        assert_eq!(g.base_q(), 12);
        for &t in &[0.0, 1.3, -8.8] {
            assert!(close(f.evaluate(t), g.evaluate(t), 1e-14));
        }
    }

    #[test]
    fn derivative_at_zero_gives_moments() {
        // φ^(r)(0) = i^r E[X^r], exactly, for any lattice distribution.
        let d = LatticeDistribution::from_weights(6, [(-5, 1), (0, 3), (4, 2)]).unwrap();
        let phi = TrigPolynomial::from_distribution(&d);
        for r in 0..=4u32 {
            let lhs = phi.differentiate(r).evaluate(0.0);
            let moment = rational_to_f64(&d.exact_moment(r));
            let rhs = i_pow(r) * Complex64::new(moment, 0.0);
            assert!(close(lhs, rhs, 1e-14), "r={r}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn mirror_evaluates_at_negated_argument() {
        let d = LatticeDistribution::from_weights(4, [(-1, 1), (2, 1), (5, 2)]).unwrap();
        let f = TrigPolynomial::from_distribution(&d);
        let m = f.mirror();
        for &t in &[0.0, 2.2, -0.4] {
            assert!(close(m.evaluate(t), f.evaluate(-t), 1e-15));
        }
    }

    #[test]
    fn rational_conversion_is_exact_on_dyadics() {
        assert_eq!(rational_to_f64(&rational(3, 4)), 0.75);
        assert_eq!(rational_to_f64(&rational(-7, 2)), -3.5);
        assert_eq!(rational_to_f64(&rational(1, 3)), 1.0 / 3.0);
    }

    fn arb_terms() -> impl Strategy<Value = Vec<(i64, Complex64)>> {
        proptest::collection::btree_map(-20i64..=20, (-3.0f64..3.0, -3.0f64..3.0), 1..6).prop_map(
            |terms| {
                terms
                    .into_iter()
                    .map(|(n, (re, im))| (n, Complex64::new(re, im)))
                    .collect()
            },
        )
    }

    fn arb_poly() -> impl Strategy<Value = TrigPolynomial> {
        (1u32..=8, arb_terms()).prop_map(|(q, terms)| TrigPolynomial::from_terms(q, terms).unwrap())
    }

    fn arb_poly_pair() -> impl Strategy<Value = (TrigPolynomial, TrigPolynomial)> {
        (1u32..=8, arb_terms(), arb_terms()).prop_map(|(q, a, b)| {
            (
                TrigPolynomial::from_terms(q, a).unwrap(),
                TrigPolynomial::from_terms(q, b).unwrap(),
            )
        })
    }

    proptest! {
        #[test]
        fn derivative_matches_central_difference(f in arb_poly(), t in -3.0f64..3.0) {
            let h = 1e-5;
            let exact = f.differentiate(1).evaluate(t);
            let approx = (f.evaluate(t + h) - f.evaluate(t - h)) / (2.0 * h);
            // Second-order finite differences on functions with |n/q| ≤ 20
            // and coefficients ≤ 3 are good to ~h²·max|f⁗| ≈ 1e-6 here.
            prop_assert!(close(exact, approx, 1e-4), "{exact} vs {approx}");
        }

        #[test]
        fn multiply_commutes((f, g) in arb_poly_pair()) {
            let fg = f.multiply(&g).unwrap();
            let gf = g.multiply(&f).unwrap();
            for &t in &[0.0, 1.1, -2.6] {
                prop_assert!(close(fg.evaluate(t), gf.evaluate(t), 1e-11));
            }
        }

        #[test]
        fn product_rule_holds((f, g) in arb_poly_pair()) {
            let lhs = f.multiply(&g).unwrap().differentiate(1);
            let rhs_a = f.differentiate(1).multiply(&g).unwrap();
            let rhs_b = f.multiply(&g.differentiate(1)).unwrap();
            for &t in &[0.4, -1.9] {
                let rhs = rhs_a.evaluate(t) + rhs_b.evaluate(t);
                prop_assert!(close(lhs.evaluate(t), rhs, 1e-10));
            }
        }

        #[test]
        fn second_derivative_is_iterated_first(f in arb_poly(), t in -3.0f64..3.0) {
            let once_twice = f.differentiate(1).differentiate(1).evaluate(t);
            let twice = f.differentiate(2).evaluate(t);
            prop_assert!(close(once_twice, twice, 1e-10));
        }
    }
}
