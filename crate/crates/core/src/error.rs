//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, FoelError>;

/// Errors produced by graph construction, operator assembly, and solvers.
#[derive(Debug, Clone, Error)]
pub enum FoelError {
    #[error("chain length must be at least 2, got {0}")]
    ChainTooShort(usize),
    #[error("{what} size {size} exceeds the supported maximum {max}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        max: usize,
    },
    #[error("edge list contains a cycle")]
    CycleDetected,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("anisotropy must satisfy 1 <= delta < infinity, got {0}")]
    InvalidAnisotropy(f64),
    #[error("magnetization 2M = {two_m} is not a valid sector of an L = {l} chain")]
    InvalidSector { l: usize, two_m: i64 },
    #[error("deviation count n = {n} out of range for L = {l}")]
    InvalidDeviation { l: usize, n: usize },
    #[error("operator does not preserve the magnetization sector: |entry| = {magnitude:.3e} at ({row}, {col})")]
    SectorLeak {
        row: usize,
        col: usize,
        magnitude: f64,
    },
    #[error("highest-weight kernel dimension {found} does not match the multiplicity {expected} for (L, n) = ({l}, {n})")]
    MultiplicityMismatch {
        l: usize,
        n: usize,
        expected: usize,
        found: usize,
    },
    #[error("bond index {bond} out of range for {l} sites")]
    BondOutOfRange { bond: usize, l: usize },
    #[error("matrix has a positive off-diagonal entry {value:.3e} at ({row}, {col})")]
    PositiveOffDiagonal {
        row: usize,
        col: usize,
        value: f64,
    },
    #[error("eigenvalue has imaginary part {imag:.3e} above tolerance; expected a real spectrum")]
    ComplexSpectrum { imag: f64 },
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("Gram matrix is not positive definite (smallest eigenvalue {0:.3e}); bracket family not independent")]
    GramNotPositiveDefinite(f64),
    #[error("diagram and oracle energies disagree at (L, n) = ({l}, {n}): {diagram:.12e} vs {oracle:.12e}")]
    PipelineMismatch {
        l: usize,
        n: usize,
        diagram: f64,
        oracle: f64,
    },
    #[error("tree sequence is not nested by leaf addition at step {0}")]
    NotNested(usize),
    #[error("coupling between sites {x} and {y} violates the bipartite sign pattern")]
    SignPattern { x: usize, y: usize },
    #[error("coupling graph is reducible (not connected)")]
    ReducibleModel,
    #[error("spin labeling failed: Casimir eigenvalue {value:.6} is not near any S(S+1)")]
    SpinLabel { value: f64 },
    #[error("cannot parse input: {0}")]
    ParseInput(String),
    #[error("index map entry {0} is invalid: {1}")]
    BadIndexMap(usize, &'static str),
    #[error("energy table has no entry for (L, n) = ({l}, {n})")]
    MissingEntry { l: usize, n: usize },
}
