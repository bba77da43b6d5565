use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("site {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("matrix is not Hermitian (max |A - A^dag| = {0:.3e})")]
    NotHermitian(f64),

    #[error("expectation value has imaginary part {0:.3e}")]
    ComplexExpectation(f64),

    #[error("ground level is degenerate (gap {gap:.3e}); prepare the state explicitly")]
    DegenerateGround { gap: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("CPTP violation: {0}")]
    Cptp(String),

    #[error(
        "state invariant violated at t = {t}: trace drift {trace_drift:.3e}, \
         hermiticity {hermiticity:.3e}, min eigenvalue {min_eigenvalue:.3e}"
    )]
    StateInvariant {
        t: f64,
        trace_drift: f64,
        hermiticity: f64,
        min_eigenvalue: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension {dim} too large (limit {limit})")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("config error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("time grids differ: {0}")]
    GridMismatch(String),

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) => 2,
            Error::Cptp(_) => 3,
            Error::StateInvariant { .. } | Error::InvalidState(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
