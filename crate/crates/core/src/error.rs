use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("derivative order {0} outside the supported range")]
    InvalidOrder(i32),

    #[error("symbol k^4 - c^2 k^2 + 1 is not positive for c = {c} (need 0 <= c < sqrt(2))")]
    SymbolNotPositive { c: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation not supported for the {0} nonlinearity")]
    UnsupportedForFamily(&'static str),

    #[error("field has {found} samples, grid has {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("field contains non-finite samples")]
    NonFinite,

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("solver collapsed onto the trivial solution (sup norm {sup_norm:.3e})")]
    TrivialSolution { sup_norm: f64 },

    #[error("homotopy broke at stage {stage} (last good: {last_good}): {source}")]
    HomotopyBroken {
        stage: usize,
        last_good: String,
        #[source]
        source: Box<Error>,
    },

    #[error("no extremum of the momentum diagnostic is bracketed by the branch")]
    NoTransitionInRange,

    #[error("right-hand side is not orthogonal to the kernel (relative overlap {overlap:.3e})")]
    FredholmViolation { overlap: f64 },

    #[error("numerical kernel has dimension {dimension}, expected 1")]
    DegenerateKernel { dimension: usize },

    #[error("eigensolver failed: {0}")]
    EigenFailure(String),

    #[error("instability index mismatch: k_r + 2 k_c + 2 k_i^- = {lhs}, n(L) - n(D) = {rhs}")]
    IndexMismatch { lhs: i64, rhs: i64 },

    #[error("implicit stage iteration did not converge at t = {time} (change {change:.3e})")]
    StageNonConvergence { time: f64, change: f64 },

    #[error("decay-fit window lies below the noise floor")]
    WindowBelowFloor,

    #[error("only {found} tail envelope points, need at least 4")]
    InsufficientTail { found: usize },
}
