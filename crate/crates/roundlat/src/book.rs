//! Compiles every code block in the guide (`book/`) as a doc-test, so the
//! chapters cannot drift away from the API. Built only under `cfg(doctest)`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub struct Introduction;

#[doc = include_str!("../../../book/src/lattice-distributions.md")]
pub struct LatticeDistributions;

#[doc = include_str!("../../../book/src/kernels-and-folding.md")]
pub struct KernelsAndFolding;

#[doc = include_str!("../../../book/src/moments.md")]
pub struct Moments;

#[doc = include_str!("../../../book/src/sheppard.md")]
pub struct SheppardCorrection;

#[doc = include_str!("../../../book/src/verification.md")]
pub struct Verification;

#[doc = include_str!("../../../book/src/cli.md")]
pub struct CommandLine;
