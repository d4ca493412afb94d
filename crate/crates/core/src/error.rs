use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point ({x}, {y}) lies outside the macrocell")]
    OutOfDomain { x: f64, y: f64 },

    #[error("polynomial fit failed: {0}")]
    FitFailure(String),

    #[error("no coverage disc exists: ROP at the reference distance is {rop} >= eta {eta}")]
    NoCoverage { rop: f64, eta: f64 },

    #[error(
        "quadrature did not converge: {nodes}-node estimate {coarse}, refined {refined}, \
         difference {diff:e} exceeds {tol:e}"
    )]
    Quadrature {
        nodes: usize,
        coarse: f64,
        refined: f64,
        diff: f64,
        tol: f64,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("site set '{0}' is empty after windowing")]
    EmptySet(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
