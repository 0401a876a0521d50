//! Proptest strategies shared by the unit-test suites.

use proptest::prelude::*;

use crate::lattice::LatticeDistribution;

/// Random distribution with `q ≤ 12`, up to 8 support points in
/// `[-50, 50]`, and integer weights normalized exactly.
pub(crate) fn arb_distribution() -> impl Strategy<Value = LatticeDistribution> {
    arb_distribution_with(12, 50)
}

/// Same shape with caller-chosen bounds on `q` and the support.
pub(crate) fn arb_distribution_with(
    max_q: u32,
    k_bound: i64,
) -> impl Strategy<Value = LatticeDistribution> {
    (
        1u32..=max_q,
        proptest::collection::btree_map(-k_bound..=k_bound, 1u64..=1000, 1..8),
    )
        .prop_map(|(q, weights)| LatticeDistribution::from_weights(q, weights).unwrap())
}
