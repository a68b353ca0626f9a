use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape: {0}")]
    Shape(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("svd_convergence: no convergence after {sweeps} sweeps")]
    SvdConvergence { sweeps: usize },

    #[error("eig_convergence: no convergence after {sweeps} sweeps")]
    EigConvergence { sweeps: usize },

    #[error("not_psd: smallest eigenvalue {min_eig:e} below tolerance")]
    NotPsd { min_eig: f64 },

    #[error("modularity_method_mismatch: projection residual {projection:e}, direct violation {direct:e}")]
    ModularityMethodMismatch { projection: f64, direct: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    /// Stable short identifier, shared with the C interface.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::SvdConvergence { .. } => "svd_convergence",
            Error::EigConvergence { .. } => "eig_convergence",
            Error::NotPsd { .. } => "not_psd",
            Error::ModularityMethodMismatch { .. } => "modularity_method_mismatch",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse(_) => "parse",
        }
    }
}

pub(crate) fn shape_err(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
