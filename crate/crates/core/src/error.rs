use thiserror::Error;

/// Errors raised by grids, problem instances, solvers and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid sizing: {0}")]
    Sizing(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ambiguous kernel: no spectral gap around threshold {threshold:e} (nearest singular value {nearest:e})")]
    AmbiguousKernel { threshold: f64, nearest: f64 },

    #[error("degenerate orbit: kernel dimension {kernel_dim} vs orbit rank {orbit_rank} (principal angle {angle:e})")]
    DegenerateOrbit {
        kernel_dim: usize,
        orbit_rank: usize,
        angle: f64,
    },

    #[error("ill-posed complement: bordered matrix condition number {0:e}")]
    IllPosedComplement(f64),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular bordered matrix")]
    SingularBorderedMatrix,

    #[error("continuation step underflow at lambda = {lambda} (step {step:e})")]
    StepUnderflow { lambda: f64, step: f64 },

    #[error("initial point is not critical (residual {0:e})")]
    InitialPointNotCritical(f64),

    #[error("group element outside the local action domain (|g| = {norm}, radius {radius})")]
    OutOfActionDomain { norm: f64, radius: f64 },

    #[error("unsupported group dimension {0} for winding degree")]
    UnsupportedDimension(usize),

    #[error("residual map vanishes on the contour")]
    ResidualVanishesOnContour,

    #[error("curve leaves the chart domain")]
    ChartExit,

    #[error("unknown family or problem `{name}`{hint}")]
    Unknown { name: String, hint: String },

    #[error("graph curve self-intersects or folds (min separation {0:e})")]
    SelfIntersection(f64),

    #[error("ambient has no volume primitive")]
    NoPrimitive,

    #[error("regraphing failed at node {node}: group element outside the action domain")]
    RegraphFailure { node: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
