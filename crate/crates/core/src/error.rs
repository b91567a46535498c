use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown material '{name}' (valid: {valid})")]
    NotFound { name: String, valid: String },

    #[error("material '{material}' is missing {capability} properties: {}", missing.join(", "))]
    MissingProperty {
        material: String,
        capability: String,
        missing: Vec<&'static str>,
    },

    #[error("invalid anneal calibration: {0}")]
    InvalidCalibration(String),

    #[error("unsupported layer stack: {0}")]
    UnsupportedStack(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no resonance peak in [{f_min} Hz, {f_max} Hz]")]
    NoPeak { f_min: f64, f_max: f64 },

    #[error("time step {dt} s exceeds the limit {limit} s")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("response not settled: last two periods differ by {relative_change:.3e}")]
    Unsettled { relative_change: f64 },

    #[error("singular linear system in beam solver")]
    SingularSystem,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("unknown parameter path '{0}'")]
    UnknownPath(String),

    #[error("no feasible point found after {evaluations} evaluations")]
    Infeasible { evaluations: usize },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn in_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Parse(_)
            | Error::Validation(_)
            | Error::UnknownPath(_)
            | Error::InvalidInput(_)
            | Error::NotFound { .. }
            | Error::InvalidGeometry(_) => true,
            Error::Stage { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
