use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Contract arithmetic was asked for a non-default state.
    #[error("contract violation: {0}")]
    Contract(String),

    /// `c = 1` leaves no idiosyncratic variance; the conditional law collapses.
    #[error("degenerate compound parameter: correlation c = 1 leaves no idiosyncratic variance")]
    DegenerateB,

    /// The adaptive integrator ran out of subdivisions before reaching the
    /// requested tolerance. Carries the best estimate and its error bound.
    #[error("quadrature budget exhausted: estimate {estimate}, error bound {error_bound}")]
    Quadrature { estimate: f64, error_bound: f64 },

    /// A density transform hit a derivative too small to divide by.
    #[error("grid refinement needed: {0}")]
    GridRefinement(String),

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("empty data set: {0}")]
    EmptyData(String),

    /// 1-D fit did not converge; carries the best iterate found.
    #[error("fit did not converge within {iterations} iterations (best b = {best_b}, sse = {sse})")]
    NonConvergence {
        best_b: f64,
        sse: f64,
        iterations: u32,
    },

    #[error("malformed record at line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
