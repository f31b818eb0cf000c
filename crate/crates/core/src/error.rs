use thiserror::Error;

use crate::instance::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} is out of range for an instance with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("term {term}: node {node} appears more than once")]
    DuplicateMember { term: usize, node: usize },

    #[error("term {term}: {reason}")]
    MalformedTerm { term: usize, reason: String },

    #[error("expected {expected} unary capacity pairs, got {got}")]
    UnaryLength { expected: usize, got: usize },

    #[error("magnitude bound exceeded: {0}")]
    Overflow(String),

    #[error("cardinality term cannot be normalized with an integral slope ({0}); represent it as a general table")]
    NonIntegralSlope(String),

    #[error("bi-cardinality term admits no integral slope pair ({0}); represent it as a general table")]
    NoSlopePair(String),

    #[error("term is not submodular: {0}")]
    NotSubmodular(String),

    #[error("general term has {size} members, above the cap of {cap}")]
    TermTooLarge { size: usize, cap: usize },

    #[error("instance failed validation:\n{0}")]
    Invalid(ValidationReport),

    #[error("exhaustive search limited to {limit} nodes, instance has {n}")]
    TooManyNodes { n: usize, limit: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
