//! Arc-reversal coined quantum walks on weighted graphs.
//!
//! The walk lives on the arcs of a connected weighted graph: the shift
//! operator reverses every arc, and the coin at each vertex is the
//! reflection about the corresponding row of the weighted arc-tail
//! incidence matrix. For uniform weights this is the familiar Grover-coin
//! walk. The spectrum of the transition operator is controlled by a
//! vertex-indexed Hermitian adjacency matrix, which makes antipodal
//! transfer on hypercubes analyzable in exact integer arithmetic.
//!
//! The crate provides:
//!
//! - graph builders (hypercubes, one-direction-reweighted hypercubes,
//!   edge-list files) in [`graph`],
//! - the arc space, shift/coin/transition operators and state evolution
//!   in [`walk`],
//! - numeric and exact spectral decompositions, the fidelity cosine sum
//!   and long-horizon scans in [`spectral`],
//! - a three-valued pretty-good-state-transfer certifier with
//!   machine-checkable certificates in [`certify`].
//!
//! ```
//! use pgst::certify::{certify_hypercube, Verdict};
//!
//! // Antipodal transfer on the 4-cube: provable once one direction per
//! // vertex is reweighted, refutable with plain Grover coins.
//! assert_eq!(certify_hypercube(4, 1).unwrap().verdict, Verdict::ProvenYes);
//! assert_eq!(certify_hypercube(4, 2).unwrap().verdict, Verdict::RefutedNo);
//! ```

use thiserror::Error;

pub mod bitgroup;
pub mod certify;
pub mod graph;
pub mod spectral;
pub mod walk;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {got} outside supported range {min}..={max}")]
    DimensionOutOfRange { got: u32, min: u32, max: u32 },

    #[error("group elements have mismatched dimensions {0} and {1}")]
    DimensionMismatch(u8, u8),

    #[error("bit mask {mask:#x} does not fit in {dim} bits")]
    MaskTooWide { mask: u32, dim: u8 },

    #[error("coin weight m must be at least 1")]
    InvalidCoinWeight,

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("vertices must be distinct")]
    VerticesNotDistinct,

    #[error("edge list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("edge {a}-{b} listed with conflicting weights {w1} and {w2}")]
    AsymmetricWeights { a: usize, b: usize, w1: f64, w2: f64 },

    #[error("graph is not connected")]
    Disconnected,

    #[error("operation requires real edge weights (complex weights are simulation-only)")]
    ComplexWeights,

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("arc space too large: {arcs} arcs exceeds cap {cap}")]
    ArcSpaceTooLarge { arcs: usize, cap: usize },

    #[error("matrix too large for dense decomposition: n = {n} exceeds cap {cap}")]
    MatrixTooLarge { n: usize, cap: usize },

    #[error("eigenvalue {0} lies outside [-1, 1] beyond tolerance; normalization is broken")]
    EigenvalueOutOfRange(f64),

    #[error("support classification ambiguous near tolerance: {0}")]
    IndeterminateSupport(String),

    #[error("state is not unit norm (norm {0})")]
    NotUnitNorm(f64),

    #[error("refuter bound {0} exceeds maximum 8")]
    RefuterBound(u32),

    #[error("q = {0} is not prime")]
    NotPrime(u64),

    #[error("lambda = {0} outside the open interval (0, {1})")]
    LambdaOutOfRange(i64, u64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
