use crate::Rational;

/// Errors reported by constructors and operations with preconditions.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("lattice denominator q must be at least 1")]
    ZeroLatticeDenominator,

    #[error("distribution needs at least one support point")]
    EmptySupport,

    #[error("negative probability {prob} at support point {k}")]
    NegativeProbability { k: i64, prob: Rational },

    #[error("probabilities sum to {0}, expected exactly 1")]
    MassNotOne(Rational),

    #[error("lattice mismatch: denominators {0} and {1} differ")]
    LatticeMismatch(u32, u32),

    #[error("scale factor must be at least 1")]
    ZeroScale,

    #[error("support point overflows the integer lattice")]
    SupportOverflow,

    #[error("moment order must be at least 1")]
    ZeroMomentOrder,

    #[error("weighted-sum model requires odd q, got {0}")]
    EvenLatticeDenominator(u32),

    #[error("weight list must be non-empty")]
    EmptyWeights,

    #[error("weights must be positive integers")]
    ZeroWeight,

    #[error("identity requires q >= 2, got {0}")]
    DenominatorTooSmall(u32),

    #[error("check requires a q=2 distribution, got q={0}")]
    NotHalfIntegerLattice(u32),
}
