use thiserror::Error;

use crate::model::BasisId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("model is already spin-expanded")]
    AlreadySpinful,
    #[error("grid label {label} out of range for mode {mode} ({points} points)")]
    IndexOutOfGrid { mode: usize, label: i64, points: usize },
    #[error("basis function {0} is unknown to this model")]
    UnknownBasisId(BasisId),
    #[error("model failed validation: {0}")]
    InvalidModel(String),
    #[error("interaction factorization needs n_mol <= n_metal (got {n_mol} > {n_metal})")]
    MolExceedsMetal { n_mol: usize, n_metal: usize },
    #[error("{modes} fermionic modes exceed the dense limit of {limit}")]
    TooLargeForDense { modes: usize, limit: usize },
    #[error("dimension {dim} exceeds the limit {limit} for this operation")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("register {0} is not declared in this circuit")]
    UnknownRegister(usize),
    #[error("uncompute refers to node {0}, which is not an open compute")]
    UnmatchedUncompute(usize),
    #[error("{0} compute node(s) were never uncomputed")]
    UnbalancedCompute(usize),
    #[error("unsupported operand width {0}")]
    UnsupportedWidth(u32),
    #[error("value {value} overflows the fixed-point range at grid label {label}")]
    OverflowAtGridPoint { label: i64, value: f64 },
    #[error("basis function {0} is not analytic")]
    NotAnalytic(BasisId),
    #[error("unknown observable: {0}")]
    UnknownObservable(String),
    #[error("model has no lead partition")]
    MissingLeads,
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Stable machine-readable identifier, used in CLI error documents.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownPreset(_) => "UnknownPreset",
            Error::AlreadySpinful => "AlreadySpinful",
            Error::IndexOutOfGrid { .. } => "IndexOutOfGrid",
            Error::UnknownBasisId(_) => "UnknownBasisId",
            Error::InvalidModel(_) => "InvalidModel",
            Error::MolExceedsMetal { .. } => "MolExceedsMetal",
            Error::TooLargeForDense { .. } => "TooLargeForDense",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::UnknownRegister(_) => "UnknownRegister",
            Error::UnmatchedUncompute(_) => "UnmatchedUncompute",
            Error::UnbalancedCompute(_) => "UnbalancedCompute",
            Error::UnsupportedWidth(_) => "UnsupportedWidth",
            Error::OverflowAtGridPoint { .. } => "OverflowAtGridPoint",
            Error::NotAnalytic(_) => "NotAnalytic",
            Error::UnknownObservable(_) => "UnknownObservable",
            Error::MissingLeads => "MissingLeads",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
