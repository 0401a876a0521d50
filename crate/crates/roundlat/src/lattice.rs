//! Exact lattice-valued distributions and the brute-force rounding oracle.
//!
//! A [`LatticeDistribution`] is a finite probability mass function on the
//! lattice `(1/q)ℤ`, stored as exact rationals: the entry `(k, p)` means
//! `P(X = k/q) = p`. Everything in this module is bit-exact — rounding a
//! distribution, convolving two of them, and taking moments never touch
//! floating point. That exactness is the whole point: formula-path values
//! elsewhere in the crate are compared against this module, so any residual
//! measures floating-point error in the formula alone.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Rational, Result};

/// The four ways of rounding a lattice point to an integer.
///
/// `NearestUp` is `⌊x⌉ = ⌊x + 1/2⌋`, resolving ties towards the larger
/// integer; `NearestDown` is its mirror `-⌊-x⌉`, resolving ties towards the
/// smaller one. `Ceil` is the mirror of `Floor`: `⌈x⌉ = -⌊-x⌋`. For odd `q`
/// a lattice point can never sit exactly halfway between two integers, so
/// `NearestUp` and `NearestDown` coincide there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RoundingMode {
    Floor,
    Ceil,
    NearestUp,
    NearestDown,
}

impl RoundingMode {
    /// All four modes, in a fixed order convenient for sweeps.
    pub const ALL: [RoundingMode; 4] = [
        RoundingMode::Floor,
        RoundingMode::Ceil,
        RoundingMode::NearestUp,
        RoundingMode::NearestDown,
    ];

    /// The mirror mode: rounding `x` with `self` equals negating the result
    /// of rounding `-x` with `self.mirror()`.
    pub fn mirror(self) -> RoundingMode {
        match self {
            RoundingMode::Floor => RoundingMode::Ceil,
            RoundingMode::Ceil => RoundingMode::Floor,
            RoundingMode::NearestUp => RoundingMode::NearestDown,
            RoundingMode::NearestDown => RoundingMode::NearestUp,
        }
    }

    /// Rounds the lattice point `k/q` to an integer, exactly.
    ///
    /// Ties in the nearest modes are decided by integer comparison; no
    /// floating point is involved. With `q = 2`:
    ///
    /// ```
    /// use roundlat::RoundingMode::*;
    /// assert_eq!(NearestUp.round_lattice_point(1, 2), 1);   // 1/2 → 1
    /// assert_eq!(NearestDown.round_lattice_point(1, 2), 0); // 1/2 → 0
    /// assert_eq!(Floor.round_lattice_point(-3, 2), -2);     // -3/2 → -2
    /// assert_eq!(Ceil.round_lattice_point(-3, 2), -1);      // -3/2 → -1
    /// ```
    pub fn round_lattice_point(self, k: i64, q: u32) -> i64 {
        let k = i128::from(k);
        let q = i128::from(q);
        let rounded = match self {
            RoundingMode::Floor => k.div_euclid(q),
            RoundingMode::Ceil => -(-k).div_euclid(q),
            // ⌊k/q + 1/2⌋ = ⌊(2k + q) / 2q⌋
            RoundingMode::NearestUp => (2 * k + q).div_euclid(2 * q),
            RoundingMode::NearestDown => -(q - 2 * k).div_euclid(2 * q),
        };
        i64::try_from(rounded).expect("rounded value fits i64 whenever k does")
    }
}

/// A finite distribution on the lattice `(1/q)ℤ` with exact rational
/// probabilities.
///
/// Invariants maintained by every constructor and operation: `q >= 1`, all
/// stored probabilities are strictly positive, and they sum to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeDistribution {
    q: u32,
    pmf: BTreeMap<i64, Rational>,
}

impl LatticeDistribution {
    /// Builds a distribution on `(1/q)ℤ` from `(k, p)` entries meaning
    /// `P(X = k/q) = p`.
    ///
    /// Duplicate `k` are merged by summation, zero-probability entries are
    /// dropped, and the result is rejected unless the total mass is exactly 1.
    pub fn new<I>(q: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        if q == 0 {
            return Err(Error::ZeroLatticeDenominator);
        }
        let mut pmf: BTreeMap<i64, Rational> = BTreeMap::new();
        for (k, p) in entries {
            if p.is_negative() {
                return Err(Error::NegativeProbability { k, prob: p });
            }
            if p.is_zero() {
                continue;
            }
            *pmf.entry(k).or_insert_with(Rational::zero) += p;
        }
        if pmf.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mass: Rational = pmf.values().sum();
        if !mass.is_one() {
            return Err(Error::MassNotOne(mass));
        }
        Ok(LatticeDistribution { q, pmf })
    }

    /// Builds a distribution from positive integer weights, normalizing by
    /// their sum: `P(X = k/q) = w_k / Σw`.
    ///
    /// ```
    /// use roundlat::{rational, LatticeDistribution};
    /// let d = LatticeDistribution::from_weights(2, [(0, 1), (1, 3)]).unwrap();
    /// assert_eq!(d.prob(1), rational(3, 4));
    /// ```
    pub fn from_weights<I>(q: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, u64)>,
    {
        let mut merged: BTreeMap<i64, u64> = BTreeMap::new();
        let mut total: u64 = 0;
        for (k, w) in entries {
            total += w;
            *merged.entry(k).or_insert(0) += w;
        }
        if total == 0 {
            return Err(Error::EmptySupport);
        }
        let total = BigInt::from(total);
        Self::new(
            q,
            merged
                .into_iter()
                .filter(|&(_, w)| w > 0)
                .map(|(k, w)| (k, Rational::new(BigInt::from(w), total.clone()))),
        )
    }

    /// The point mass at `k/q`.
    pub fn point_mass(q: u32, k: i64) -> Result<Self> {
        Self::new(q, [(k, Rational::one())])
    }

    /// `U_q`: uniform on the `q` lattice points of `[0, 1)`, i.e. mass `1/q`
    /// at `k/q` for `k = 0, …, q-1`.
    pub fn uniform_u(q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroLatticeDenominator);
        }
        let p = Rational::new(BigInt::one(), BigInt::from(q));
        Self::new(q, (0..i64::from(q)).map(|k| (k, p.clone())))
    }

    /// `Ũ_q`: uniform on the `q` lattice points of `[-1/2, 1/2)`.
    ///
    /// For even `q` the support is `k = -q/2, …, q/2 - 1`; for odd `q` it is
    /// the symmetric range `k = -(q-1)/2, …, (q-1)/2`.
    pub fn uniform_u_tilde(q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroLatticeDenominator);
        }
        let p = Rational::new(BigInt::one(), BigInt::from(q));
        let lo = if q.is_multiple_of(2) {
            -(i64::from(q) / 2)
        } else {
            -((i64::from(q) - 1) / 2)
        };
        Self::new(q, (lo..lo + i64::from(q)).map(|k| (k, p.clone())))
    }

    /// The lattice denominator `q`.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Number of support points.
    pub fn support_len(&self) -> usize {
        self.pmf.len()
    }

    /// Iterates over `(k, p)` pairs in increasing `k`, meaning
    /// `P(X = k/q) = p`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.pmf.iter().map(|(&k, p)| (k, p))
    }

    /// `P(X = k/q)`, zero when `k` is outside the support.
    pub fn prob(&self, k: i64) -> Rational {
        self.pmf.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    /// The distribution of `-X` (support reflected through zero).
    pub fn negate(&self) -> Self {
        LatticeDistribution {
            q: self.q,
            pmf: self.pmf.iter().map(|(&k, p)| (-k, p.clone())).collect(),
        }
    }

    /// The distribution of `sX` for a positive integer `s`. The lattice
    /// denominator is unchanged: `s · k/q = (sk)/q` stays in `(1/q)ℤ`.
    pub fn scale_by_integer(&self, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(Error::ZeroScale);
        }
        let s = i64::from(s);
        let pmf = self
            .pmf
            .iter()
            .map(|(&k, p)| Ok((k.checked_mul(s).ok_or(Error::SupportOverflow)?, p.clone())))
            .collect::<Result<_>>()?;
        Ok(LatticeDistribution { q: self.q, pmf })
    }

    /// The distribution of `X + m` for an integer `m` (support shifted by
    /// `m·q` lattice steps).
    pub fn shift_by_integer(&self, m: i64) -> Result<Self> {
        let step = m.checked_mul(i64::from(self.q)).ok_or(Error::SupportOverflow)?;
        let pmf = self
            .pmf
            .iter()
            .map(|(&k, p)| Ok((k.checked_add(step).ok_or(Error::SupportOverflow)?, p.clone())))
            .collect::<Result<_>>()?;
        Ok(LatticeDistribution { q: self.q, pmf })
    }

    /// Re-expresses the same distribution on the finer lattice `1/(mq)ℤ`
    /// (every `k` becomes `mk`). Used to bring two distributions to a common
    /// lattice before [`convolve`](Self::convolve).
    pub fn refine(&self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroScale);
        }
        let q = self.q.checked_mul(m).ok_or(Error::SupportOverflow)?;
        let m = i64::from(m);
        let pmf = self
            .pmf
            .iter()
            .map(|(&k, p)| Ok((k.checked_mul(m).ok_or(Error::SupportOverflow)?, p.clone())))
            .collect::<Result<_>>()?;
        Ok(LatticeDistribution { q, pmf })
    }

    /// Exact distribution of the sum of two independent variables on the
    /// same lattice.
    ///
    /// Callers with mismatched lattices rescale first via [`refine`](Self::refine).
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::LatticeMismatch(self.q, other.q));
        }
        let mut pmf: BTreeMap<i64, Rational> = BTreeMap::new();
        for (&ka, pa) in &self.pmf {
            for (&kb, pb) in &other.pmf {
                let k = ka.checked_add(kb).ok_or(Error::SupportOverflow)?;
                *pmf.entry(k).or_insert_with(Rational::zero) += pa * pb;
            }
        }
        Ok(LatticeDistribution { q: self.q, pmf })
    }

    /// The exact distribution of the rounded variable: integer-valued
    /// (lattice denominator 1), with mass at `m` equal to the exact sum of
    /// `P(X = k/q)` over all `k` that round to `m`.
    ///
    /// This is the brute-force oracle every formula in the crate is checked
    /// against.
    pub fn round_distribution(&self, mode: RoundingMode) -> Self {
        let mut pmf: BTreeMap<i64, Rational> = BTreeMap::new();
        for (&k, p) in &self.pmf {
            let m = mode.round_lattice_point(k, self.q);
            *pmf.entry(m).or_insert_with(Rational::zero) += p;
        }
        LatticeDistribution { q: 1, pmf }
    }

    /// The exact `r`-th raw moment `E[X^r] = Σ p_k (k/q)^r`.
    ///
    /// `r = 0` returns 1.
    pub fn exact_moment(&self, r: u32) -> Rational {
        let q = BigInt::from(self.q);
        let r = r as i32;
        self.pmf
            .iter()
            .map(|(&k, p)| p * Rational::new(BigInt::from(k), q.clone()).pow(r))
            .sum()
    }

    /// Exact variance `E[X²] - (E X)²`.
    pub fn exact_variance(&self) -> Rational {
        let mean = self.exact_moment(1);
        self.exact_moment(2) - &mean * &mean
    }

    /// Exact expected value as `f64`, for the formula paths.
    pub(crate) fn mean_f64(&self) -> f64 {
        crate::trigpoly::rational_to_f64(&self.exact_moment(1))
    }

    /// Exact second moment as `f64`, for the formula paths.
    pub(crate) fn second_moment_f64(&self) -> f64 {
        crate::trigpoly::rational_to_f64(&self.exact_moment(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational;
    use proptest::prelude::*;

    fn u(q: u32) -> LatticeDistribution {
        LatticeDistribution::uniform_u(q).unwrap()
    }

    fn u_tilde(q: u32) -> LatticeDistribution {
        LatticeDistribution::uniform_u_tilde(q).unwrap()
    }

    #[test]
    fn make_distribution_two_point_uniform() {
        let d = LatticeDistribution::new(2, [(0, rational(1, 2)), (1, rational(1, 2))]).unwrap();
        assert_eq!(d.q(), 2);
        assert_eq!(d.prob(0), rational(1, 2));
        assert_eq!(d.prob(1), rational(1, 2));
    }

    #[test]
    fn make_distribution_degenerate_point_mass() {
        let d = LatticeDistribution::point_mass(1, 5).unwrap();
        assert_eq!(d.support_len(), 1);
        assert_eq!(d.prob(5), rational(1, 1));
    }

    #[test]
    fn make_distribution_matches_uniform_u3() {
        let entries = [(0, rational(1, 3)), (1, rational(1, 3)), (2, rational(1, 3))];
        assert_eq!(LatticeDistribution::new(3, entries).unwrap(), u(3));
    }

    #[test]
    fn make_distribution_merges_duplicates() {
        let d = LatticeDistribution::new(2, [(1, rational(1, 4)), (1, rational(3, 4))]).unwrap();
        assert_eq!(d.support_len(), 1);
        assert_eq!(d.prob(1), rational(1, 1));
    }

    #[test]
    fn make_distribution_rejects_bad_input() {
        assert_eq!(
            LatticeDistribution::new(0, [(0, rational(1, 1))]).unwrap_err(),
            Error::ZeroLatticeDenominator
        );
        assert!(matches!(
            LatticeDistribution::new(2, [(0, rational(-1, 2)), (1, rational(3, 2))]).unwrap_err(),
            Error::NegativeProbability { k: 0, .. }
        ));
        assert_eq!(
            LatticeDistribution::new(2, [(0, rational(1, 2))]).unwrap_err(),
            Error::MassNotOne(rational(1, 2))
        );
        assert_eq!(
            LatticeDistribution::new(2, std::iter::empty()).unwrap_err(),
            Error::EmptySupport
        );
    }

    #[test]
    fn uniform_u_edge_cases() {
        assert_eq!(u(1), LatticeDistribution::point_mass(1, 0).unwrap());
        let d = u(4);
        for k in 0..4 {
            assert_eq!(d.prob(k), rational(1, 4));
        }
        assert_eq!(LatticeDistribution::uniform_u(0).unwrap_err(), Error::ZeroLatticeDenominator);
    }

    #[test]
    fn uniform_u_mean_matches_closed_form() {
        // E U_q = (q-1)/(2q)
        assert_eq!(u(3).exact_moment(1), rational(1, 3));
        for q in 1..=12 {
            assert_eq!(u(q).exact_moment(1), rational(i64::from(q) - 1, 2 * i64::from(q)));
        }
    }

    #[test]
    fn uniform_u_second_moment_matches_closed_form() {
        // E[U_q²] = (2q² - 3q + 1)/(6q²)
        for q in 1..=12 {
            let q = i64::from(q);
            assert_eq!(
                u(q as u32).exact_moment(2),
                rational(2 * q * q - 3 * q + 1, 6 * q * q)
            );
        }
    }

    #[test]
    fn uniform_u_tilde_supports() {
        let even = u_tilde(2);
        assert_eq!(even.prob(-1), rational(1, 2));
        assert_eq!(even.prob(0), rational(1, 2));

        let odd = u_tilde(3);
        for k in -1..=1 {
            assert_eq!(odd.prob(k), rational(1, 3));
        }
    }

    #[test]
    fn uniform_u_tilde_second_moment() {
        // E[Ũ_q²] = (q²-1)/(12q²) for odd q; +2/(12q²)·... even handled below.
        assert_eq!(u_tilde(3).exact_moment(2), rational(2, 27));
        for q in (1..=11).step_by(2) {
            let q = i64::from(q);
            assert_eq!(u_tilde(q as u32).exact_moment(2), rational(q * q - 1, 12 * q * q));
        }
        // Even q: E[Ũ_q²] = (q²+2)/(12q²), matching the nearest kernel's
        // second derivative at zero.
        for q in (2..=12).step_by(2) {
            let q = i64::from(q);
            assert_eq!(u_tilde(q as u32).exact_moment(2), rational(q * q + 2, 12 * q * q));
        }
    }

    #[test]
    fn negate_reflects_support() {
        assert_eq!(
            LatticeDistribution::point_mass(1, 5).unwrap().negate(),
            LatticeDistribution::point_mass(1, -5).unwrap()
        );
        let n = u(3).negate();
        assert_eq!(n.prob(0), rational(1, 3));
        assert_eq!(n.prob(-1), rational(1, 3));
        assert_eq!(n.prob(-2), rational(1, 3));
    }

    #[test]
    fn scale_examples() {
        let scaled = u_tilde(3).scale_by_integer(2).unwrap();
        assert_eq!(scaled.prob(-2), rational(1, 3));
        assert_eq!(scaled.prob(0), rational(1, 3));
        assert_eq!(scaled.prob(2), rational(1, 3));

        let d = u(5);
        assert_eq!(d.scale_by_integer(1).unwrap(), d);

        let third = LatticeDistribution::point_mass(3, 1).unwrap();
        let one = third.scale_by_integer(3).unwrap();
        assert_eq!(one.prob(3), rational(1, 1)); // 3/3 = 1, still on (1/3)ℤ
        assert_eq!(one.q(), 3);

        assert_eq!(d.scale_by_integer(0).unwrap_err(), Error::ZeroScale);
    }

    #[test]
    fn convolve_identity_element() {
        let zero = LatticeDistribution::point_mass(3, 0).unwrap();
        let d = u(3);
        assert_eq!(zero.convolve(&d).unwrap(), d);
    }

    #[test]
    fn convolve_u_tilde3_with_itself() {
        // Direct enumeration of the 3×3 outcomes: counts 1,2,3,2,1 over
        // -2/3 .. 2/3.
        let s = u_tilde(3).convolve(&u_tilde(3)).unwrap();
        assert_eq!(s.prob(-2), rational(1, 9));
        assert_eq!(s.prob(-1), rational(2, 9));
        assert_eq!(s.prob(0), rational(3, 9));
        assert_eq!(s.prob(1), rational(2, 9));
        assert_eq!(s.prob(2), rational(1, 9));
    }

    #[test]
    fn convolve_rejects_mismatched_lattices() {
        assert_eq!(
            u(2).convolve(&u(3)).unwrap_err(),
            Error::LatticeMismatch(2, 3)
        );
        // refine() reaches a common lattice
        let a = u(2).refine(3).unwrap();
        let b = u(3).refine(2).unwrap();
        assert_eq!(a.q(), 6);
        assert!(a.convolve(&b).is_ok());
    }

    #[test]
    fn round_uniform_floor_is_point_mass_at_zero() {
        for q in 1..=12 {
            assert_eq!(
                u(q).round_distribution(RoundingMode::Floor),
                LatticeDistribution::point_mass(1, 0).unwrap()
            );
        }
    }

    #[test]
    fn round_u_tilde_nearest_is_zero_for_odd_q() {
        for q in (1..=11).step_by(2) {
            assert_eq!(
                u_tilde(q).round_distribution(RoundingMode::NearestUp),
                LatticeDistribution::point_mass(1, 0).unwrap()
            );
        }
    }

    #[test]
    fn round_u3_nearest_up() {
        // {0, 1/3, 2/3}: the first two round to 0, the last to 1.
        let r = u(3).round_distribution(RoundingMode::NearestUp);
        assert_eq!(r.prob(0), rational(2, 3));
        assert_eq!(r.prob(1), rational(1, 3));
    }

    #[test]
    fn exact_moment_examples() {
        assert_eq!(
            LatticeDistribution::point_mass(1, 5).unwrap().exact_moment(3),
            rational(125, 1)
        );
        assert_eq!(u(4).exact_moment(0), rational(1, 1));
    }

    #[test]
    fn round_q1_is_identity() {
        let d = LatticeDistribution::from_weights(1, [(-3, 1), (0, 2), (7, 1)]).unwrap();
        for mode in RoundingMode::ALL {
            assert_eq!(d.round_distribution(mode), d);
        }
    }

    #[test]
    fn nearest_up_tie_goes_larger() {
        use RoundingMode::*;
        assert_eq!(NearestUp.round_lattice_point(1, 2), 1);
        assert_eq!(NearestUp.round_lattice_point(-1, 2), 0);
        assert_eq!(NearestUp.round_lattice_point(-3, 2), -1);
        assert_eq!(NearestDown.round_lattice_point(-1, 2), -1);
        assert_eq!(Ceil.round_lattice_point(-3, 2), -1);
        assert_eq!(Floor.round_lattice_point(-3, 2), -2);
    }

    use crate::testsupport::arb_distribution;

    proptest! {
        #[test]
        fn rounded_mass_is_one_and_integer_valued(d in arb_distribution()) {
            for mode in RoundingMode::ALL {
                let r = d.round_distribution(mode);
                prop_assert_eq!(r.q(), 1);
                let mass: Rational = r.iter().map(|(_, p)| p.clone()).sum();
                prop_assert!(mass.is_one());
            }
        }

        #[test]
        fn mirror_laws_hold_exactly(d in arb_distribution()) {
            let ceil = d.round_distribution(RoundingMode::Ceil);
            let via_floor = d.negate().round_distribution(RoundingMode::Floor).negate();
            prop_assert_eq!(ceil, via_floor);

            let down = d.round_distribution(RoundingMode::NearestDown);
            let via_up = d.negate().round_distribution(RoundingMode::NearestUp).negate();
            prop_assert_eq!(down, via_up);
        }

        #[test]
        fn nearest_up_is_floor_of_half_shift(d in arb_distribution()) {
            // ⌊x⌉ = ⌊x + 1/2⌋: refine to 1/(2q), shift by q steps, floor.
            let refined = d.refine(2).unwrap();
            let shifted = LatticeDistribution::new(
                refined.q(),
                refined.iter().map(|(k, p)| (k + i64::from(d.q()), p.clone())),
            ).unwrap();
            prop_assert_eq!(
                d.round_distribution(RoundingMode::NearestUp),
                shifted.round_distribution(RoundingMode::Floor)
            );
        }

        #[test]
        fn double_negation_is_identity(d in arb_distribution()) {
            prop_assert_eq!(d.negate().negate(), d);
        }

        #[test]
        fn integer_shift_moves_rounded_mean_exactly(d in arb_distribution(), m in -4i64..=4) {
            let shifted = d.shift_by_integer(m).unwrap();
            for mode in RoundingMode::ALL {
                let base = d.round_distribution(mode).exact_moment(1);
                let moved = shifted.round_distribution(mode).exact_moment(1);
                prop_assert_eq!(moved, base + Rational::from_integer(m.into()));
            }
        }

        #[test]
        fn mean_bracketing_floor_le_x_le_ceil(d in arb_distribution()) {
            let floor_mean = d.round_distribution(RoundingMode::Floor).exact_moment(1);
            let ceil_mean = d.round_distribution(RoundingMode::Ceil).exact_moment(1);
            let mean = d.exact_moment(1);
            prop_assert!(floor_mean <= mean);
            prop_assert!(mean <= ceil_mean);
        }
    }
}
