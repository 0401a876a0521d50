//! Sheppard's correction for sums of scaled discrete uniforms: exact error
//! and an explicit bound.
//!
//! The classical correction approximates the variance of a rounded variable
//! by `Var X + 1/12`. This module quantifies that approximation for
//!
//! ```text
//! X = s₁ξ₁ + … + s_nξ_n,   ξ_k i.i.d. ~ Ũ_q,   q odd,  s_k ≥ 1 integers,
//! ```
//!
//! where everything is computable exactly: `X` is symmetric, so
//! `E⌊X⌉ = 0` and `Var⌊X⌉ = E[⌊X⌉²]`, and the oracle gives `E[⌊X⌉²]` as a
//! rational number. The error `|E[⌊X⌉²] - (E[X²] + 1/12)|` is therefore an
//! exact rational, and for `n ≥ 2` it satisfies the bound
//!
//! ```text
//! exact_error ≤ (1 + Σ_k s_k d_k² + d²)/(6q²) ≤ Σ_k s_k³/(3q²)
//! ```
//!
//! with `d = gcd(s₁,…,s_n,q)` and `d_k = gcd({s_i : i ≠ k} ∪ {q})`. The GCDs
//! control which charfun values `φ_X(2πj)` survive: `φ_X(2πj) = 1` exactly
//! when `(q/d) | j` and `0` otherwise, which is what makes the error small
//! when the weights share no large factor with `q`.
//!
//! Both bound checks are performed in rational arithmetic — a bound
//! verification should never fail because of floating-point rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rand::SeedableRng;
use rayon::prelude::*;

use crate::lattice::{LatticeDistribution, RoundingMode};
use crate::trigpoly::rational_to_f64;
use crate::{Error, Rational, Result};

/// Exact error report for Sheppard's correction on one `(q, s)` choice.
///
/// Rational fields are exact; the two float fields exist to cross-check the
/// closed-form second-moment formula against the oracle.
#[derive(Debug, Clone)]
pub struct SheppardReport {
    /// Odd lattice denominator.
    pub q: u32,
    /// The weights `s₁, …, s_n`.
    pub s: Vec<u32>,
    /// `Var X = ((q²-1)/(12q²))·Σ s_k²`, exact.
    pub var_x: Rational,
    /// `E⌊X⌉` from the oracle — exactly zero by symmetry.
    pub mean_rounded: Rational,
    /// `E[⌊X⌉²]` from the oracle, exact.
    pub second_moment_rounded: Rational,
    /// `E[⌊X⌉²]` from the closed-form formula (float cross-check).
    pub formula_second_moment: f64,
    /// The approximation `E[X²] + 1/12` as a float.
    pub sheppard_approx: f64,
    /// `|E[⌊X⌉²] - (E[X²] + 1/12)|`, exact.
    pub exact_error: Rational,
    /// `Σ s_k³/(3q²)`; `None` when `n = 1` (the bound needs `n ≥ 2`).
    pub bound: Option<Rational>,
    /// `(1 + Σ s_k d_k² + d²)/(6q²)`, the sharper pre-majorization bound;
    /// `None` when `n = 1`.
    pub intermediate_bound: Option<Rational>,
    /// `gcd(s₁, …, s_n, q)`.
    pub d: u32,
    /// `d_k = gcd({s_i : i ≠ k} ∪ {q})`, one per weight (`d_1 = q` when
    /// `n = 1`).
    pub d_k: Vec<u32>,
}

fn validate(q: u32, s: &[u32]) -> Result<()> {
    if q == 0 {
        return Err(Error::ZeroLatticeDenominator);
    }
    if q.is_multiple_of(2) {
        return Err(Error::EvenLatticeDenominator(q));
    }
    if s.is_empty() {
        return Err(Error::EmptyWeights);
    }
    if s.contains(&0) {
        return Err(Error::ZeroWeight);
    }
    Ok(())
}

/// The exact distribution of `X = Σ s_kξ_k` with `ξ_k` i.i.d. `Ũ_q`, built
/// by convolving the scaled uniforms.
///
/// ```
/// use roundlat::{build_weighted_sum, rational};
/// let x = build_weighted_sum(5, &[1, 1]).unwrap();
/// assert_eq!(x.exact_variance(), rational(4, 25));
/// ```
pub fn build_weighted_sum(q: u32, s: &[u32]) -> Result<LatticeDistribution> {
    validate(q, s)?;
    let base = LatticeDistribution::uniform_u_tilde(q)?;
    let mut x = LatticeDistribution::point_mass(q, 0)?;
    for &sk in s {
        x = x.convolve(&base.scale_by_integer(sk)?)?;
    }
    Ok(x)
}

fn gcd_with_q<I>(q: u32, values: I) -> u32
where
    I: IntoIterator<Item = u32>,
{
    values.into_iter().fold(q, |acc, v| acc.gcd(&v))
}

/// The set of `j ∈ {1, …, q-1}` where `φ_X(2πj)` does **not** vanish.
///
/// With `d = gcd(s₁,…,s_n,q)` and `J = q/d`, the characteristic function at
/// `2πj` is exactly `1` when `J | j` and exactly `0` otherwise; the returned
/// set is `{J, 2J, …, (d-1)J}`.
///
/// ```
/// use roundlat::nonvanishing_set;
/// assert_eq!(nonvanishing_set(9, &[3, 6]).unwrap(), vec![3, 6]);
/// assert!(nonvanishing_set(5, &[1, 2]).unwrap().is_empty());
/// ```
pub fn nonvanishing_set(q: u32, s: &[u32]) -> Result<Vec<u32>> {
    validate(q, s)?;
    let d = gcd_with_q(q, s.iter().copied());
    let j_step = q / d;
    Ok((1..q).filter(|j| j % j_step == 0).collect())
}

/// Builds the full report for one `(q, s)` pair: exact error of Sheppard's
/// correction, both rational bounds, and the GCD diagnostics.
pub fn sheppard_report(q: u32, s: &[u32]) -> Result<SheppardReport> {
    validate(q, s)?;
    let x = build_weighted_sum(q, s)?;
    let rounded = x.round_distribution(RoundingMode::NearestUp);

    let second_moment_rounded = rounded.exact_moment(2);
    let target = x.exact_moment(2) + Rational::new(BigInt::one(), BigInt::from(12));
    let exact_error = (&second_moment_rounded - &target).abs();

    let d = gcd_with_q(q, s.iter().copied());
    let d_k: Vec<u32> = (0..s.len())
        .map(|k| {
            gcd_with_q(
                q,
                s.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &v)| v),
            )
        })
        .collect();

    let (bound, intermediate_bound) = if s.len() >= 2 {
        let qq = BigInt::from(q) * BigInt::from(q);
        let cubes: BigInt = s.iter().map(|&sk| BigInt::from(sk).pow(3)).sum();
        let bound = Rational::new(cubes, 3 * qq.clone());
        let weighted: BigInt = s
            .iter()
            .zip(&d_k)
            .map(|(&sk, &dk)| BigInt::from(sk) * BigInt::from(dk).pow(2))
            .sum();
        let numer = BigInt::one() + weighted + BigInt::from(d).pow(2);
        let intermediate = Rational::new(numer, 6 * qq);
        (Some(bound), Some(intermediate))
    } else {
        (None, None)
    };

    Ok(SheppardReport {
        q,
        s: s.to_vec(),
        var_x: x.exact_variance(),
        mean_rounded: rounded.exact_moment(1),
        second_moment_rounded,
        formula_second_moment: crate::moments::second_moment_rounded(&x, RoundingMode::NearestUp)
            .formula_value,
        sheppard_approx: rational_to_f64(&target),
        exact_error,
        bound,
        intermediate_bound,
        d,
        d_k,
    })
}

/// Grid description for [`sweep`]: all odd `q` in `3..=q_max`, weight counts
/// `n` in `2..=n_max`, and every weight tuple with entries in `1..=s_max`.
///
/// `subsample: Some((count, seed))` replaces the full grid by a seeded
/// random subset of `count` grid points (deterministic for a given seed).
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub q_max: u32,
    pub n_max: usize,
    pub s_max: u32,
    pub subsample: Option<(usize, u64)>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            q_max: 31,
            n_max: 3,
            s_max: 6,
            subsample: None,
        }
    }
}

impl SweepConfig {
    /// Every `(q, s)` pair of the grid, in deterministic lexicographic
    /// order (then subsampled if configured).
    pub fn grid(&self) -> Vec<(u32, Vec<u32>)> {
        let mut combos = Vec::new();
        for q in (3..=self.q_max).filter(|q| q % 2 == 1) {
            for n in 2..=self.n_max {
                // Count through s_max^n tuples, decoding digits base s_max.
                let total = (self.s_max as u64).pow(n as u32);
                for code in 0..total {
                    let mut s = Vec::with_capacity(n);
                    let mut rest = code;
                    for _ in 0..n {
                        s.push((rest % self.s_max as u64) as u32 + 1);
                        rest /= self.s_max as u64;
                    }
                    combos.push((q, s));
                }
            }
        }
        if let Some((count, seed)) = self.subsample {
            if count < combos.len() {
                let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
                let mut picked = rand::seq::index::sample(&mut rng, combos.len(), count)
                    .into_vec();
                picked.sort_unstable();
                return picked.into_iter().map(|i| combos[i].clone()).collect();
            }
        }
        combos
    }
}

/// Runs [`sheppard_report`] over the whole grid, in parallel, preserving
/// the deterministic grid order in the output.
pub fn sweep(config: &SweepConfig) -> Vec<SheppardReport> {
    config
        .grid()
        .into_par_iter()
        .map(|(q, s)| sheppard_report(q, &s).expect("grid combinations are valid inputs"))
        .collect()
}

/// Renders reports as CSV with header
/// `q,s,var_X,exact_error,bound,ratio`: weights are semicolon-joined,
/// rationals printed exactly as `a/b`, and `ratio = exact_error/bound` as a
/// float (empty when the bound does not apply).
pub fn sweep_csv(reports: &[SheppardReport]) -> String {
    let mut out = String::from("q,s,var_X,exact_error,bound,ratio\r\n");
    for r in reports {
        let s_joined = r
            .s
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let (bound, ratio) = match &r.bound {
            Some(b) => (
                b.to_string(),
                format!("{:.16e}", rational_to_f64(&(&r.exact_error / b))),
            ),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\r\n",
            r.q, s_joined, r.var_x, r.exact_error, bound, ratio
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational;
    use crate::trigpoly::TrigPolynomial;
    use num_traits::Zero;
    use std::f64::consts::TAU;

    #[test]
    fn single_weight_is_centered_uniform() {
        assert_eq!(
            build_weighted_sum(3, &[1]).unwrap(),
            LatticeDistribution::uniform_u_tilde(3).unwrap()
        );
    }

    #[test]
    fn variance_is_weighted_sum_of_uniform_variances() {
        // Var X = ((q²-1)/(12q²))·Σ s_k², exactly.
        for (q, s) in [(3u32, vec![1u32, 1]), (5, vec![2, 3]), (7, vec![1, 2, 3])] {
            let x = build_weighted_sum(q, &s).unwrap();
            let qi = i64::from(q);
            let unit = rational(qi * qi - 1, 12 * qi * qi);
            let sum_sq: i64 = s.iter().map(|&v| i64::from(v) * i64::from(v)).sum();
            assert_eq!(x.exact_variance(), unit * rational(sum_sq, 1));
            assert!(x.exact_moment(1).is_zero(), "symmetric sum has mean 0");
        }
    }

    #[test]
    fn weighted_sum_matches_direct_enumeration() {
        // q=3, s=[2,3]: 9 equally likely outcomes 2a/3 + 3b/3, a,b ∈ {-1,0,1}.
        let x = build_weighted_sum(3, &[2, 3]).unwrap();
        let mut expect = std::collections::BTreeMap::new();
        for a in -1i64..=1 {
            for b in -1i64..=1 {
                *expect.entry(2 * a + 3 * b).or_insert(0u64) += 1;
            }
        }
        let direct = LatticeDistribution::from_weights(3, expect).unwrap();
        assert_eq!(x, direct);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert_eq!(
            build_weighted_sum(4, &[1]).unwrap_err(),
            Error::EvenLatticeDenominator(4)
        );
        assert_eq!(build_weighted_sum(3, &[]).unwrap_err(), Error::EmptyWeights);
        assert_eq!(build_weighted_sum(3, &[1, 0]).unwrap_err(), Error::ZeroWeight);
        assert_eq!(
            build_weighted_sum(0, &[1]).unwrap_err(),
            Error::ZeroLatticeDenominator
        );
    }

    #[test]
    fn nonvanishing_set_follows_the_gcd() {
        assert_eq!(nonvanishing_set(9, &[3, 6]).unwrap(), vec![3, 6]);
        assert_eq!(nonvanishing_set(5, &[1, 2]).unwrap(), Vec::<u32>::new());
        // Integer-valued X (all weights ≡ 0 mod q): φ_X = 1 at every 2πj.
        assert_eq!(nonvanishing_set(3, &[3]).unwrap(), vec![1, 2]);
    }

    #[test]
    fn charfun_is_indicator_on_the_nonvanishing_set() {
        for (q, s) in [(9u32, vec![3u32, 6]), (5, vec![1, 2]), (3, vec![3]), (15, vec![3, 5])] {
            let x = build_weighted_sum(q, &s).unwrap();
            let phi = TrigPolynomial::from_distribution(&x);
            let set = nonvanishing_set(q, &s).unwrap();
            for j in 1..q {
                let v = phi.evaluate(TAU * f64::from(j));
                if set.contains(&j) {
                    assert!((v.re - 1.0).abs() < 1e-10 && v.im.abs() < 1e-10, "q={q}, j={j}");
                } else {
                    assert!(v.norm() < 1e-10, "q={q}, j={j}: {v}");
                }
            }
        }
    }

    #[test]
    fn smallest_two_weight_case_pinned() {
        // q=3, s=[1,1]: X has PMF (1,2,3,2,1)/9 on {-2/3,…,2/3};
        // ⌊X⌉ ∈ {-1,0,1} with probabilities 1/9, 7/9, 1/9.
        let r = sheppard_report(3, &[1, 1]).unwrap();
        assert_eq!(r.var_x, rational(4, 27));
        assert!(r.mean_rounded.is_zero());
        assert_eq!(r.second_moment_rounded, rational(2, 9));
        assert_eq!(r.exact_error, rational(1, 108));
        assert_eq!(r.bound, Some(rational(2, 27)));
        assert_eq!(r.intermediate_bound, Some(rational(2, 27))); // (1+2+1)/54
        assert_eq!((r.d, r.d_k.as_slice()), (1, &[1u32, 1][..]));
        assert!((r.formula_second_moment - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn integer_valued_case_error_is_exactly_one_twelfth() {
        // q=5, s=[5,5]: X is integer-valued, ⌊X⌉ = X, so the correction
        // overshoots by exactly its own 1/12 term.
        let r = sheppard_report(5, &[5, 5]).unwrap();
        assert_eq!(r.d, 5);
        assert_eq!(r.exact_error, rational(1, 12));
        assert!(r.exact_error <= r.bound.clone().unwrap());
    }

    #[test]
    fn larger_case_respects_bound() {
        let r = sheppard_report(31, &[2, 3, 5]).unwrap();
        assert_eq!(r.bound, Some(rational(160, 2883))); // (8+27+125)/(3·961)
        assert!(r.exact_error <= rational(160, 2883));
        assert!(r.exact_error <= r.intermediate_bound.clone().unwrap());
    }

    #[test]
    fn single_weight_report_has_no_bound() {
        let r = sheppard_report(7, &[4]).unwrap();
        assert_eq!(r.bound, None);
        assert_eq!(r.intermediate_bound, None);
        assert_eq!(r.d_k, vec![7]); // gcd of {} ∪ {q}
    }

    #[test]
    fn small_sweep_is_deterministic_and_bounded() {
        let config = SweepConfig {
            q_max: 5,
            n_max: 2,
            s_max: 2,
            subsample: None,
        };
        let reports = sweep(&config);
        // q ∈ {3,5} × 4 weight pairs
        assert_eq!(reports.len(), 8);
        for r in &reports {
            assert!(r.mean_rounded.is_zero());
            assert!(r.exact_error <= r.bound.clone().unwrap());
            assert!(r.exact_error <= r.intermediate_bound.clone().unwrap());
        }
        // Deterministic order: repeat run is identical.
        let again = sweep(&config);
        assert_eq!(
            reports.iter().map(|r| (r.q, r.s.clone())).collect::<Vec<_>>(),
            again.iter().map(|r| (r.q, r.s.clone())).collect::<Vec<_>>()
        );
    }

    #[test]
    fn subsample_is_seed_deterministic() {
        let config = |seed| SweepConfig {
            q_max: 9,
            n_max: 3,
            s_max: 3,
            subsample: Some((20, seed)),
        };
        let a = config(7).grid();
        let b = config(7).grid();
        let c = config(8).grid();
        assert_eq!(a.len(), 20);
        assert_eq!(a, b);
        assert_ne!(a, c, "different seeds should pick different subsets");
    }

    #[test]
    fn csv_layout() {
        let reports = [
            sheppard_report(3, &[1, 1]).unwrap(),
            sheppard_report(5, &[4]).unwrap(),
        ];
        let csv = sweep_csv(&reports);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "q,s,var_X,exact_error,bound,ratio");
        assert!(lines[1].starts_with("3,1;1,4/27,1/108,2/27,"));
        // No bound for n = 1: trailing fields stay empty.
        assert!(lines[2].starts_with("5,4,"));
        assert!(lines[2].ends_with(",,"));
        assert_eq!(lines.len(), 3);
    }
}
