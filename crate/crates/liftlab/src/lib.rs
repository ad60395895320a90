//! Lattice-point enumeration in SL₂(ℤ) and SL₃(ℤ), finite projective and
//! flag geometry over prime fields, and desk-scale lifting/counting
//! experiments built on top of them.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! exact (integer matrices, gauges)
//!   └─> enumeration (norm-ball streams)
//!         ├─> counting (congruence counts, fixed-pair sums, identity checks)
//!         └─> lifting  (reachable sets, minimal lifts, coverage curves)
//! finite (F_q linear algebra, P²(F_q), flags, fixed-point analysis)
//! archimedean (Cartan/Iwasawa gauges, Haar volumes, Ξ, Monte Carlo)
//! ```
//!
//! Everything is deterministic: enumeration streams are partition-ordered,
//! counts merge associatively, and all Monte Carlo takes an explicit seed.

pub mod archimedean;
pub mod cli;
pub mod counting;
pub mod enumeration;
pub mod exact;
pub mod finite;
pub mod lifting;
pub mod report;

pub use exact::{IntGauge, IntMat};
pub use finite::{Flag, MatModQ, ProjPoint, ReductionClass};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("integer overflow past the 64-bit guard bound")]
    Overflow,
    #[error("entry {0} exceeds the guard bound")]
    GuardBound(i64),
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(i64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: u8, got: u8 },
    #[error("{0} is not prime (or exceeds the modulus bound)")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("bound too large: {0}")]
    BoundTooLarge(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("class mismatch: {0}")]
    ClassMismatch(String),
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("determinant {0} is outside the unimodular tolerance")]
    DetTolerance(f64),
    #[error("rejection sampler exceeded its retry budget")]
    SamplerFailure,
    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to: feasibility problems
    /// exit with 3, configuration problems with 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BoundTooLarge(_) | Error::Infeasible(_) | Error::SamplerFailure => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
