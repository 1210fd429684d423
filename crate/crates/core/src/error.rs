use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("operation needs at least {needed} vertices, graph has {found}")]
    TooFewVertices { needed: usize, found: usize },
    #[error("graph has no edges")]
    NoEdges,
    #[error("edge duplication factor must be positive")]
    ZeroDuplication,
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
    #[error("completion impossible: {0}")]
    CompletionImpossible(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("matrix is {rows}x{cols}, permanent needs a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("{what} cap exceeded: needs {needed}, cap is {cap}")]
    CapExceeded { what: &'static str, needed: u64, cap: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {prime} is not of the form n*{vertex_reps}+1")]
    NotAdmissible { prime: u64, vertex_reps: u64 },
    #[error("row reduction found rank {rank} < {rows} (graph disconnected or rows dependent mod p)")]
    RankDeficient { rank: usize, rows: usize },
    #[error("row reduction requires {row_reps} row copies to equal p-1 for p = {prime}")]
    ReductionModulus { row_reps: u64, prime: u64 },
    #[error("invalid four-vertex cut: {0}")]
    InvalidCut(String),
    #[error("twisted graph is not {0}-regular")]
    NotRegular(usize),
    #[error("invalid rotation system: {0}")]
    InvalidRotation(String),
    #[error("embedding is not planar: V - E + F = {euler}, expected 2")]
    NotPlanar { euler: i64 },
    #[error("vertices ({0}, {1}) are not a two-vertex cut")]
    NotACutPair(usize, usize),
    #[error("automorphism search limited to {limit} vertices, graph has {vertices}")]
    SizeLimit { vertices: usize, limit: usize },
    #[error("closed form needs an odd prime, got {0}")]
    EvenPrime(u64),
    #[error("expression error: {0}")]
    Expr(String),
    #[error("coefficient series has {available} terms, needs {needed}")]
    SeriesTooShort { available: usize, needed: usize },
    #[error("eta product leading exponent {numerator}/24 is not a positive integer")]
    FractionalLeadingPower { numerator: i64 },
    #[error("sequences are defined over different primes (row repetition {0} vs {1})")]
    MismatchedPrimes(u64, u64),
    #[error("no admissible prime <= {0}")]
    NoAdmissiblePrime(u64),
    #[error("unknown catalog graph {0}")]
    UnknownGraph(String),
    #[error("bundled catalog checksum mismatch: expected {expected}, found {found}")]
    Checksum { expected: String, found: String },
    #[error("catalog data: {0}")]
    Catalog(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
