//! On-disk distribution format and output helpers shared by the `roundlat`
//! binary and its integration tests.
//!
//! A distribution file is a single UTF-8 JSON document:
//!
//! ```json
//! { "q": 3, "pmf": [ { "k": -1, "p": "1/3" }, { "k": 0, "p": "2/3" } ] }
//! ```
//!
//! `k` is the support point in units of `1/q` (the variable takes the value
//! `k/q`), and `p` is an exact rational probability written `a/b`, or a bare
//! integer. Parsing distinguishes two failure classes so the binary can map
//! them to different exit codes: structural problems ([`SpecError::Parse`],
//! exit 2) and well-formed files that describe an invalid distribution
//! ([`SpecError::Invariant`], exit 3).

use num_bigint::BigInt;
use num_traits::{One, Zero};
use roundlat::{LatticeDistribution, Rational};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The JSON document model: lattice denominator plus probability entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub q: u32,
    pub pmf: Vec<PmfEntry>,
}

/// One support point: `k` in lattice units, `p` an exact rational string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmfEntry {
    pub k: i64,
    pub p: String,
}

/// Why a spec file was rejected, split by exit-code class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecError {
    /// Malformed input: invalid JSON, unknown fields, or an unparseable
    /// rational (including zero denominators).
    Parse(String),
    /// Structurally valid input violating a distribution invariant, e.g.
    /// probabilities that do not sum to 1.
    Invariant(String),
}

impl SpecError {
    /// The process exit code the binary reports for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            SpecError::Parse(_) => 2,
            SpecError::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Parse(msg) | SpecError::Invariant(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for SpecError {}

/// Parses an exact rational from `a/b` or bare-integer form.
///
/// A zero denominator is a parse error, not a panic:
///
/// ```
/// use roundlat_cli::parse_rational;
/// assert_eq!(parse_rational("-3/6").unwrap(), roundlat::rational(-1, 2));
/// assert_eq!(parse_rational("4").unwrap(), roundlat::rational(4, 1));
/// assert!(parse_rational("1/0").is_err());
/// assert!(parse_rational("0.5").is_err());
/// ```
pub fn parse_rational(text: &str) -> Result<Rational, SpecError> {
    let trimmed = text.trim();
    let (numer_text, denom_text) = match trimmed.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (trimmed, None),
    };
    let numer = BigInt::from_str(numer_text)
        .map_err(|_| SpecError::Parse(format!("malformed rational {text:?}: bad numerator")))?;
    let denom = match denom_text {
        Some(b) => BigInt::from_str(b)
            .map_err(|_| SpecError::Parse(format!("malformed rational {text:?}: bad denominator")))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(SpecError::Parse(format!(
            "malformed rational {text:?}: zero denominator"
        )));
    }
    Ok(Rational::new(numer, denom))
}

/// Parses the JSON document model, reporting serde's line/column diagnostics.
pub fn parse_spec(text: &str) -> Result<DistributionSpec, SpecError> {
    serde_json::from_str(text).map_err(|e| SpecError::Parse(format!("invalid spec file: {e}")))
}

/// Converts a parsed spec into a validated [`LatticeDistribution`].
///
/// Rational-string problems are [`SpecError::Parse`]; everything the
/// distribution constructor rejects (mass ≠ 1, negative probabilities,
/// `q = 0`, empty support) becomes [`SpecError::Invariant`].
pub fn spec_to_distribution(spec: &DistributionSpec) -> Result<LatticeDistribution, SpecError> {
    let entries = spec
        .pmf
        .iter()
        .map(|entry| Ok((entry.k, parse_rational(&entry.p)?)))
        .collect::<Result<Vec<_>, SpecError>>()?;
    LatticeDistribution::new(spec.q, entries).map_err(|e| SpecError::Invariant(e.to_string()))
}

/// The canonical-form printer: entries in increasing `k`, rationals reduced.
///
/// Canonical output re-parses to the identical distribution:
///
/// ```
/// use roundlat_cli::{canonical_json, parse_spec, spec_to_distribution};
/// let text = r#"{ "q": 4, "pmf": [ { "k": 9, "p": "2/6" }, { "k": -1, "p": "4/6" } ] }"#;
/// let d = spec_to_distribution(&parse_spec(text).unwrap()).unwrap();
/// let canonical = canonical_json(&d);
/// let reparsed = spec_to_distribution(&parse_spec(&canonical).unwrap()).unwrap();
/// assert_eq!(d, reparsed);
/// ```
pub fn canonical_json(d: &LatticeDistribution) -> String {
    let spec = DistributionSpec {
        q: d.q(),
        pmf: d
            .iter()
            .map(|(k, p)| PmfEntry { k, p: p.to_string() })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&spec).expect("spec model serializes");
    text.push('\n');
    text
}

/// Formats a float with 17 significant digits, enough to round-trip `f64`.
///
/// ```
/// use roundlat_cli::fmt_float;
/// assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
/// assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
/// ```
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_accepts_signs_and_whitespace() {
        assert_eq!(parse_rational(" -2 / 4 ").unwrap(), roundlat::rational(-1, 2));
        assert_eq!(parse_rational("+3").unwrap(), roundlat::rational(3, 1));
        assert_eq!(parse_rational("5/-10").unwrap(), roundlat::rational(-1, 2));
    }

    #[test]
    fn rational_rejects_garbage() {
        for bad in ["", "/", "1/", "/2", "a/b", "1/2/3", "1e-3", "½"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn spec_errors_carry_exit_codes() {
        assert_eq!(parse_spec("not json").unwrap_err().exit_code(), 2);

        let spec = parse_spec(r#"{ "q": 2, "pmf": [ { "k": 0, "p": "1/3" } ] }"#).unwrap();
        let err = spec_to_distribution(&spec).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("sum"), "{err}");
    }

    #[test]
    fn unknown_fields_are_parse_errors() {
        let text = r#"{ "q": 2, "pmf": [ { "k": 0, "p": "1", "w": 3 } ] }"#;
        assert_eq!(parse_spec(text).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn duplicate_support_points_merge_before_canonicalizing() {
        let text = r#"{ "q": 2, "pmf": [
            { "k": 1, "p": "1/4" }, { "k": 1, "p": "1/4" }, { "k": 0, "p": "1/2" }
        ] }"#;
        let d = spec_to_distribution(&parse_spec(text).unwrap()).unwrap();
        let canonical = canonical_json(&d);
        assert!(canonical.contains("\"p\": \"1/2\""));
        let reparsed = spec_to_distribution(&parse_spec(&canonical).unwrap()).unwrap();
        assert_eq!(d, reparsed);
    }
}
