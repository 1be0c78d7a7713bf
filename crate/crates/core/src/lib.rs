//! Verifiable free-group machinery: run-length words over a free group,
//! folded subgroup graphs with finite completions, a concrete doubled
//! group carrying a non-injective endomorphism with strictly increasing
//! iterated kernels, and element-wise residual-finiteness certificates.

pub mod certify;
pub mod double;
pub mod example;
pub mod graphs;
pub mod report;
pub mod words;

use thiserror::Error;

/// Crate-wide error type. Operations that cannot fail return plain values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("symbol '{0}' is not in the alphabet")]
    UnknownSymbol(char),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet mismatch between operands")]
    AlphabetMismatch,
    #[error("exponent arithmetic overflowed")]
    ExponentOverflow,
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("construction needs {needed} vertices, over the limit of {limit}")]
    ResourceLimit { needed: u64, limit: u64 },
    #[error("infeasible: word '{word}' already lies in the subgroup")]
    Infeasible { word: String },
    #[error("ball radius mismatch: {0} vs {1}")]
    RadiusMismatch(u32, u32),
    #[error("graph is not a complete cover")]
    IncompleteCover,
    #[error("element is trivial")]
    TrivialElement,
    #[error("certification failed: {fact}")]
    CertificationFailed { fact: String },
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub use certify::{certify, check, CertCase, Certificate, CoverRecord, Fact};
pub use double::{kernel_witness, DoubleElement, MembershipOracle, Side};
pub use example::{SquaringSystem, TowerCore, TowerDecomposition};
pub use graphs::{
    balls_isomorphic, Ball, CoreGraph, FiniteCover, Perm, PermRep, DEFAULT_MAX_VERTICES,
};
pub use report::{Check, Report};
pub use words::{Alphabet, Endomorphism, FreeWord};
