use std::path::PathBuf;

use thiserror::Error;

use crate::grassmann::BergerReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad error classes. Each maps to one process exit code in the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorClass {
    Parse,
    Invariant,
    FrameTolerance,
    DegenerateRegion,
    FlatTensor,
    Io,
    NonConvergence,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("blocks are not trace-free (tr W+ = {plus:e}, tr W- = {minus:e})")]
    NotTraceFree { plus: f64, minus: f64 },

    #[error("frame is not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("tensor is not Einstein (plane-duality residual {residual:e} > {tolerance:e})")]
    NotEinstein { residual: f64, tolerance: f64 },

    #[error("tensor is not Ricci-flat (max |Ric| = {residual:e} > {tolerance:e})")]
    NotRicciFlat { residual: f64, tolerance: f64 },

    #[error("Berger frame residual {residual:e} exceeds tolerance {tolerance:e}")]
    BergerToleranceExceeded {
        residual: f64,
        tolerance: f64,
        report: Box<BergerReport>,
    },

    #[error("direction is not critical (three-index residual {residual:e} > {tolerance:e})")]
    FrameNotCritical { residual: f64, tolerance: f64 },

    #[error("delta = {delta} is outside [1/2, 2]")]
    DegenerateRegion { delta: f64 },

    #[error("tensor is flat (K_max = {k_max:e}); nothing to certify")]
    FlatTensor { k_max: f64 },

    #[error("numeric search stalled at gradient norm {grad_norm:e}")]
    NonConvergence { grad_norm: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. } | Error::Schema(_) => ErrorClass::Parse,
            Error::NotTraceFree { .. }
            | Error::NotOrthonormal(_)
            | Error::Invariant(_)
            | Error::NotEinstein { .. }
            | Error::NotRicciFlat { .. } => ErrorClass::Invariant,
            Error::BergerToleranceExceeded { .. } | Error::FrameNotCritical { .. } => {
                ErrorClass::FrameTolerance
            }
            Error::DegenerateRegion { .. } => ErrorClass::DegenerateRegion,
            Error::FlatTensor { .. } => ErrorClass::FlatTensor,
            Error::NonConvergence { .. } => ErrorClass::NonConvergence,
            Error::Io { .. } => ErrorClass::Io,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
