use thiserror::Error;

use crate::baa::BaaRun;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("vertex {vertex} out of range for graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),

    #[error("non-finite value {0}")]
    NonFinite(f64),

    /// Normalized Laplacians need `d_u > 0` everywhere.
    #[error(
        "vertex {vertex} has degree {degree}; the normalized Laplacian needs positive degrees"
    )]
    ZeroDegree { vertex: usize, degree: f64 },

    #[error(
        "vertex {vertex} has negative potential {value}; the Dirichlet host embedding needs W >= 0"
    )]
    NegativePotentialUnsupported { vertex: usize, value: f64 },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal mass {off_norm:e}, tolerance {tolerance:e})")]
    ConvergenceFailure {
        sweeps: usize,
        off_norm: f64,
        tolerance: f64,
    },

    #[error("zero vector")]
    ZeroVector,

    #[error("empty vertex subset")]
    EmptySubset,

    #[error("cut must be a proper nonempty subset of the vertices")]
    ImproperCut,

    #[error("ground state is degenerate (gap {gap:e})")]
    DegenerateGround { gap: f64 },

    #[error(
        "amplitude at vertex {vertex} is {value:e}; a strictly positive ground state is required"
    )]
    ZeroAmplitude { vertex: usize, value: f64 },

    #[error("test function is not orthogonal to q*phi^2 (inner product {0:e})")]
    NotOrthogonal(f64),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("function is constant")]
    ConstantFunction,

    #[error("{vertex_count} vertices exceeds the exhaustive limit of {limit}")]
    TooLarge { vertex_count: usize, limit: usize },

    #[error("cycle is broken: zero entry between {0} and {1}")]
    BrokenCycle(usize, usize),

    #[error("off-diagonal support is disconnected")]
    DisconnectedSupport,

    #[error("matrix has negative off-diagonal weight on edge {{{0}, {1}}}; not stoquastic")]
    NotStoquastic(usize, usize),

    #[error("positive subgraph is disconnected")]
    PositiveSubgraphDisconnected,

    #[error("negative edge {{{0}, {1}}} has no routed paths")]
    IncompleteCover(usize, usize),

    #[error("path fractions for negative edge {{{x}, {y}}} sum to {sum}")]
    MassMismatch { x: usize, y: usize, sum: f64 },

    #[error("residual weight {residual:e} on edge {{{u}, {v}}} is not positive")]
    NonPositiveResidual { u: usize, v: usize, residual: f64 },

    #[error("path for negative edge {{{x}, {y}}} leaves the positive subgraph")]
    PathLeavesPositive { x: usize, y: usize },

    #[error("routing infeasible; best minimum residual {best_residual:e}")]
    RoutingInfeasible { best_residual: f64 },

    #[error("routed paths overlap on edge {{{0}, {1}}}")]
    OverlappingPaths(usize, usize),

    #[error("residual {residual:e} on edge {{{u}, {v}}} is negative")]
    ResidualNegative { u: usize, v: usize, residual: f64 },

    #[error("invalid routing plan: {0}")]
    RoutingInvalid(Box<Error>),

    #[error("schedule endpoints are incompatible: {0}")]
    ScheduleMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("step control failed near t = {t}: step {step:e} still misses tolerance")]
    StepTooLarge { t: f64, step: f64 },

    #[error("samples landed on a single vertex; empirical Cheeger ratio undefined")]
    AllMassOneVertex,

    #[error("gap bound {bound:e} fell below gamma_min {gamma_min:e} at tau = {tau}")]
    GapCollapse {
        bound: f64,
        gamma_min: f64,
        tau: f64,
        run: Box<BaaRun>,
    },

    #[error("checkpoint limit {0} reached")]
    CheckpointLimit(usize),

    #[error("line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    ParseDuplicateEdge { line: usize, u: usize, v: usize },

    #[error("line {line}: self-loop at vertex {vertex}")]
    ParseSelfLoop { line: usize, vertex: usize },

    #[error("line {line}: bad header: {msg}")]
    BadHeader { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
