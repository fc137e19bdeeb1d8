use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular model: total cavity decay rate is zero")]
    SingularModel,

    #[error("eigen-solver did not converge at field {field} T")]
    EigenNonConvergence { field: f64 },

    #[error("unphysical operating point: {0}")]
    Unphysical(String),

    #[error("at field {field} T, frequency {freq} Hz: {source}")]
    AtGridPoint {
        field: f64,
        freq: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown magnon mode `{0}`")]
    UnknownMode(String),

    #[error("no resonance found: {0}")]
    NoResonance(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("invalid fit configuration: {0}")]
    FitConfig(String),

    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("non-rectangular grid, missing cells: {0}")]
    NonRectangular(String),

    #[error("invalid spectrum file: {0}")]
    SpectrumFile(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
