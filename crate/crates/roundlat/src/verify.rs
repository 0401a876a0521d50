//! Named self-checks: identities and worked examples the library must
//! reproduce, packaged as deterministic, seedable checks.
//!
//! Each check returns a [`CheckResult`] whose `passed` flag is exactly
//! `residual ≤ tolerance` for that check's tolerance. [`run_all`] executes
//! the whole suite over configurable grids with a seeded generator, so two
//! runs with the same [`VerifyConfig`] produce identical residuals.
//!
//! The checks, by name:
//!
//! * `trig-identity` — `Σ_{j=1}^{q-1} 1/sin²(πj/q) = (q²-1)/3`, the identity
//!   that makes the second moment of `⌊U_q⌋` vanish;
//! * `half-integer-lattice-example` — the four `q = 2` closed forms for
//!   means and second moments against the oracle, plus the exact
//!   coincidence of nearest-up and ceiling rounding on the half-integer
//!   lattice;
//! * `uniform-floor-example` — `⌊U_q⌋ = 0` and (odd `q`) `⌊Ũ_q⌉ = 0`: the
//!   closed-form mean and second moment must both cancel to zero;
//! * `rounding-duality` — the exact mirror laws `⌈x⌉ = -⌊-x⌋`,
//!   `⌊x⌉ = ⌊x + 1/2⌋`, and the nearest-down mirror, asserted as rational
//!   distribution equalities with zero tolerance;
//! * `fold-shift-invariance` — the folded characteristic function is
//!   unchanged when its summation index runs over any `q` consecutive
//!   integers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::f64::consts::{PI, TAU};

use crate::charfun::{charfun_rounded, charfun_rounded_shifted};
use crate::lattice::{LatticeDistribution, RoundingMode};
use crate::moments::{mean_rounded, second_moment_rounded};
use crate::trigpoly::{rational_to_f64, TrigPolynomial};
use crate::{Error, Result};

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    /// Stable identifier of the check (kebab-case).
    pub name: String,
    /// Whether `residual` is within the check's tolerance.
    pub passed: bool,
    /// Worst deviation observed (exact checks report 0.0 or the failure
    /// count).
    pub residual: f64,
    /// Human-readable context: grid, seed, worst case, tolerance.
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, residual: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: residual <= tolerance,
            residual,
            detail,
        }
    }
}

/// Checks `Σ_{j=1}^{q-1} 1/sin²(πj/q) = (q²-1)/3` for one `q`.
///
/// Tolerance `1e-9·q²`: the sum's terms grow like `q²/π²` near the ends, so
/// the allowance scales with the magnitude of what is being summed.
///
/// Rejects `q < 2` (the identity is about the interior points `1..q-1`).
pub fn check_trig_identity(q: u32) -> Result<CheckResult> {
    if q < 2 {
        return Err(Error::DenominatorTooSmall(q));
    }
    let qf = f64::from(q);
    let sum: f64 = (1..q)
        .map(|j| {
            let s = (PI * f64::from(j) / qf).sin();
            1.0 / (s * s)
        })
        .sum();
    let target = (qf * qf - 1.0) / 3.0;
    let residual = (sum - target).abs();
    Ok(CheckResult::new(
        "trig-identity",
        residual,
        1e-9 * qf * qf,
        format!("q={q}: sum={sum:.12}, target={target:.12}"),
    ))
}

/// Evaluates the four `q = 2` closed forms against the oracle and asserts
/// the exact `⌊X⌉ = ⌈X⌉` coincidence on the half-integer lattice.
///
/// The closed forms are the general theorems collapsed to one correction
/// term each:
///
/// ```text
/// E⌊X⌋  = EX - 1/4 + φ_X(2π)/4            E⌈X⌉  = EX + 1/4 - φ_X(2π)/4
/// E⌊X⌋² = EX² + 1/8 - EX/2 - (i/2)φ'_X(2π) - φ_X(2π)/8
/// E⌈X⌉² = EX² + 1/8 + EX/2 + (i/2)φ'_X(2π) - φ_X(2π)/8
/// ```
///
/// Rejects distributions whose lattice denominator is not 2.
pub fn check_example_q2(d: &LatticeDistribution) -> Result<CheckResult> {
    if d.q() != 2 {
        return Err(Error::NotHalfIntegerLattice(d.q()));
    }
    let phi = TrigPolynomial::from_distribution(d);
    let phi2pi = phi.evaluate(TAU);
    let dphi2pi = phi.differentiate(1).evaluate(TAU);
    let ex = d.mean_f64();
    let ex2 = d.second_moment_f64();
    let i = Complex64::new(0.0, 1.0);

    let formulas = [
        (RoundingMode::Floor, 1, Complex64::new(ex - 0.25, 0.0) + phi2pi / 4.0),
        (RoundingMode::Ceil, 1, Complex64::new(ex + 0.25, 0.0) - phi2pi / 4.0),
        (
            RoundingMode::Floor,
            2,
            Complex64::new(ex2 + 0.125 - ex / 2.0, 0.0) - (i / 2.0) * dphi2pi - phi2pi / 8.0,
        ),
        (
            RoundingMode::Ceil,
            2,
            Complex64::new(ex2 + 0.125 + ex / 2.0, 0.0) + (i / 2.0) * dphi2pi - phi2pi / 8.0,
        ),
    ];

    let mut residual = 0.0f64;
    for (mode, r, value) in formulas {
        let oracle = rational_to_f64(&d.round_distribution(mode).exact_moment(r));
        residual = residual.max((value.re - oracle).abs()).max(value.im.abs());
    }

    // On the half-integer lattice a tie rounds up, which is exactly the
    // ceiling; the two rounded distributions must be identical rationals.
    let coincide = d.round_distribution(RoundingMode::NearestUp)
        == d.round_distribution(RoundingMode::Ceil);
    if !coincide {
        residual = f64::INFINITY;
    }

    Ok(CheckResult::new(
        "half-integer-lattice-example",
        residual,
        1e-10,
        format!("max residual over 4 closed forms; nearest=ceil: {coincide}"),
    ))
}

/// Checks that the closed forms cancel to zero where rounding is trivial:
/// `⌊U_q⌋ = 0` for every `q`, and `⌊Ũ_q⌉ = 0` for odd `q`.
///
/// This is a strong cancellation test: the formula sums are individually
/// nonzero and must annihilate the constants exactly.
pub fn check_example_e0(q: u32) -> Result<CheckResult> {
    if q == 0 {
        return Err(Error::ZeroLatticeDenominator);
    }
    let mut residual = 0.0f64;
    let u = LatticeDistribution::uniform_u(q)?;
    residual = residual.max(mean_rounded(&u, RoundingMode::Floor).formula_value.abs());
    residual = residual.max(
        second_moment_rounded(&u, RoundingMode::Floor)
            .formula_value
            .abs(),
    );
    if q % 2 == 1 {
        let centered = LatticeDistribution::uniform_u_tilde(q)?;
        residual = residual.max(
            mean_rounded(&centered, RoundingMode::NearestUp)
                .formula_value
                .abs(),
        );
        residual = residual.max(
            second_moment_rounded(&centered, RoundingMode::NearestUp)
                .formula_value
                .abs(),
        );
    }
    Ok(CheckResult::new(
        "uniform-floor-example",
        residual,
        1e-9,
        format!("q={q}; all rounded moments of the uniform cases must vanish"),
    ))
}

/// Asserts the mirror laws as exact distribution equalities (tolerance 0):
///
/// * `round(d, Ceil) = -round(-d, Floor)`;
/// * `round(d, NearestUp) = round(d + 1/2, Floor)` (built on the refined
///   lattice `1/(2q)ℤ`);
/// * `round(d, NearestDown) = -round(-d, NearestUp)`.
pub fn check_duality(d: &LatticeDistribution) -> CheckResult {
    let mut failures = 0u32;

    let ceil = d.round_distribution(RoundingMode::Ceil);
    if ceil != d.negate().round_distribution(RoundingMode::Floor).negate() {
        failures += 1;
    }

    let refined = d.refine(2).expect("doubling the lattice cannot overflow here");
    let shifted = LatticeDistribution::new(
        refined.q(),
        refined.iter().map(|(k, p)| (k + i64::from(d.q()), p.clone())),
    )
    .expect("shifting support keeps the distribution valid");
    if d.round_distribution(RoundingMode::NearestUp)
        != shifted.round_distribution(RoundingMode::Floor)
    {
        failures += 1;
    }

    let down = d.round_distribution(RoundingMode::NearestDown);
    if down
        != d.negate()
            .round_distribution(RoundingMode::NearestUp)
            .negate()
    {
        failures += 1;
    }

    CheckResult::new(
        "rounding-duality",
        f64::from(failures),
        0.0,
        format!("3 exact distribution equalities, {failures} failed"),
    )
}

/// Checks that the folded characteristic function does not depend on which
/// residue system the fold index runs over (`m ∈ {-3, 1, q}` versus the
/// baseline `0..q-1`), for all four modes at one evaluation point.
pub fn check_shift_invariance(d: &LatticeDistribution, t: f64) -> CheckResult {
    let mut residual = 0.0f64;
    let q = i64::from(d.q());
    for mode in RoundingMode::ALL {
        let base = charfun_rounded(d, mode, t);
        for m in [-3, 1, q] {
            residual = residual.max((charfun_rounded_shifted(d, mode, t, m) - base).norm());
        }
    }
    CheckResult::new(
        "fold-shift-invariance",
        residual,
        1e-10,
        format!("t={t:.6}, shifts -3/1/{q}, all modes"),
    )
}

/// Grid sizes and seeding for [`run_all`].
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Upper `q` for the uniform-example grid (and cap, at 12, for random
    /// distributions).
    pub q_max: u32,
    /// Upper `q` for the trigonometric identity grid.
    pub trig_q_max: u32,
    /// Number of random distributions per randomized check.
    pub samples: usize,
    /// Seed for the deterministic generator.
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            q_max: 50,
            trig_q_max: 500,
            samples: 200,
            seed: 1729,
        }
    }
}

/// Draws a random distribution with `q ≤ max_q`, at most 8 support points
/// with `|k| ≤ k_bound`, and integer weights below 1000 normalized exactly.
pub fn random_distribution<R: Rng>(rng: &mut R, max_q: u32, k_bound: i64) -> LatticeDistribution {
    let q = rng.random_range(1..=max_q);
    let points = rng.random_range(1..=8usize);
    let entries: Vec<(i64, u64)> = (0..points)
        .map(|_| {
            (
                rng.random_range(-k_bound..=k_bound),
                rng.random_range(1..=1000u64),
            )
        })
        .collect();
    LatticeDistribution::from_weights(q, entries).expect("positive weights normalize to mass 1")
}

fn aggregate(name: &str, tolerance: f64, results: Vec<(f64, String)>) -> CheckResult {
    let mut worst = 0.0f64;
    let mut worst_at = String::from("none");
    for (residual, label) in &results {
        if *residual >= worst {
            worst = *residual;
            worst_at = label.clone();
        }
    }
    CheckResult::new(
        name,
        worst,
        tolerance,
        format!("{} cases, worst at {worst_at}", results.len()),
    )
}

/// Runs the whole suite over the configured grids.
///
/// Returns one aggregated [`CheckResult`] per named check, in a fixed
/// order. Failures are recorded in the results, never thrown. The same
/// config always reproduces the same residuals.
pub fn run_all(config: &VerifyConfig) -> Vec<CheckResult> {
    let mut results = Vec::new();

    // Identity grid: residuals are compared against 1e-9·q², so normalize
    // by q² to aggregate across the grid.
    let trig = (2..=config.trig_q_max.max(2))
        .map(|q| {
            let r = check_trig_identity(q).expect("grid starts at q=2");
            (r.residual / (f64::from(q) * f64::from(q)), format!("q={q}"))
        })
        .collect();
    results.push(aggregate("trig-identity", 1e-9, trig));

    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let q2 = (0..config.samples)
        .map(|i| {
            let d = random_distribution(&mut rng, 2, 50);
            // Force the half-integer lattice: re-express q=1 draws on q=2.
            let d = if d.q() == 2 { d } else { d.refine(2).unwrap() };
            let r = check_example_q2(&d).expect("distribution is on the q=2 lattice");
            (r.residual, format!("sample {i}"))
        })
        .collect();
    results.push(aggregate("half-integer-lattice-example", 1e-10, q2));

    let e0 = (1..=config.q_max.max(1))
        .map(|q| {
            let r = check_example_e0(q).expect("q is positive");
            (r.residual, format!("q={q}"))
        })
        .collect();
    results.push(aggregate("uniform-floor-example", 1e-9, e0));

    let mut rng = ChaCha12Rng::seed_from_u64(config.seed.wrapping_add(1));
    let duality = (0..config.samples)
        .map(|i| {
            let d = random_distribution(&mut rng, config.q_max.min(12), 50);
            (check_duality(&d).residual, format!("sample {i}"))
        })
        .collect();
    results.push(aggregate("rounding-duality", 0.0, duality));

    let mut rng = ChaCha12Rng::seed_from_u64(config.seed.wrapping_add(2));
    let shifts = (0..config.samples)
        .map(|i| {
            let d = random_distribution(&mut rng, config.q_max.min(12), 50);
            let t = rng.random_range(-10.0..10.0);
            (check_shift_invariance(&d, t).residual, format!("sample {i}"))
        })
        .collect();
    results.push(aggregate("fold-shift-invariance", 1e-10, shifts));

    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational;

    #[test]
    fn trig_identity_small_cases() {
        // q=2: 1/sin²(π/2) = 1 = (4-1)/3; q=3: two terms of 4/3 sum to 8/3.
        let r2 = check_trig_identity(2).unwrap();
        assert!(r2.passed && r2.residual < 1e-12);
        let r3 = check_trig_identity(3).unwrap();
        assert!(r3.passed && r3.residual < 1e-12);
        assert_eq!(
            check_trig_identity(1).unwrap_err(),
            Error::DenominatorTooSmall(1)
        );
    }

    #[test]
    fn trig_identity_large_q() {
        for q in [100, 499, 500] {
            let r = check_trig_identity(q).unwrap();
            assert!(r.passed, "q={q}: residual {}", r.residual);
        }
    }

    #[test]
    fn q2_example_on_known_distributions() {
        // Uniform on {0, 1/2}: E⌊X⌋ = 0 (φ_X(2π) = 0 cancels the -1/4).
        let half = LatticeDistribution::from_weights(2, [(0, 1), (1, 1)]).unwrap();
        let r = check_example_q2(&half).unwrap();
        assert!(r.passed, "{}", r.detail);

        // Point mass at 1/2: E⌈X⌉ = 1/2 + 1/4 - (-1)/4 = 1.
        let tie = LatticeDistribution::point_mass(2, 1).unwrap();
        let r = check_example_q2(&tie).unwrap();
        assert!(r.passed);
        assert_eq!(
            tie.round_distribution(RoundingMode::Ceil).exact_moment(1),
            rational(1, 1)
        );

        let wrong_lattice = LatticeDistribution::uniform_u(3).unwrap();
        assert_eq!(
            check_example_q2(&wrong_lattice).unwrap_err(),
            Error::NotHalfIntegerLattice(3)
        );
    }

    #[test]
    fn uniform_example_across_grid() {
        for q in 1..=50 {
            let r = check_example_e0(q).unwrap();
            assert!(r.passed, "q={q}: residual {}", r.residual);
        }
        assert_eq!(
            check_example_e0(0).unwrap_err(),
            Error::ZeroLatticeDenominator
        );
    }

    #[test]
    fn duality_and_shift_on_fixed_distribution() {
        let d = LatticeDistribution::from_weights(6, [(-7, 2), (0, 1), (3, 3), (11, 1)]).unwrap();
        let dual = check_duality(&d);
        assert!(dual.passed && dual.residual == 0.0);
        let shift = check_shift_invariance(&d, 1.3);
        assert!(shift.passed, "residual {}", shift.residual);
    }

    #[test]
    fn full_suite_passes_and_is_deterministic() {
        let config = VerifyConfig {
            q_max: 12,
            trig_q_max: 60,
            samples: 40,
            seed: 99,
        };
        let first = run_all(&config);
        assert_eq!(first.len(), 5);
        for check in &first {
            assert!(check.passed, "{}: {} ({})", check.name, check.residual, check.detail);
        }
        let names: Vec<&str> = first.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "trig-identity",
                "half-integer-lattice-example",
                "uniform-floor-example",
                "rounding-duality",
                "fold-shift-invariance"
            ]
        );
        let second = run_all(&config);
        for (a, b) in first.iter().zip(&second) {
            assert_eq!(a.residual.to_bits(), b.residual.to_bits(), "{}", a.name);
        }
    }

    #[test]
    fn random_distribution_respects_bounds() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let d = random_distribution(&mut rng, 12, 50);
            assert!(d.q() >= 1 && d.q() <= 12);
            assert!(d.support_len() <= 8);
            assert!(d.iter().all(|(k, _)| (-50..=50).contains(&k)));
        }
    }
}
