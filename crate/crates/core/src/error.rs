use thiserror::Error;

use crate::mixture::ValidationReport;

pub type Result<T, E = HcmError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HcmError {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid mixture: {0}")]
    InvalidMixture(ValidationReport),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("mixture spec: {0}")]
    MixtureSpec(String),

    #[error("edge list: {0}")]
    EdgeList(String),

    #[error("nu_D undefined: E[D] = 0")]
    UndefinedNu,

    #[error("parity repair failed after {tries} redraws of the final community")]
    ParityRepairFailed { tries: u64 },

    #[error(
        "no simple graph after {attempts} matchings (nu_D = {nu_d:.4}, \
         heuristic simple probability e^(-nu_D/2) = {heuristic:.3e})"
    )]
    SimpleRetriesExceeded {
        attempts: u64,
        nu_d: f64,
        heuristic: f64,
    },

    #[error("shape has {edges} intra edges, above the enumeration cap of {cap}")]
    SpectrumCapExceeded { edges: usize, cap: usize },

    #[error("graph is not simple: {0}")]
    NotSimple(String),

    #[error("tail fit: {0}")]
    TailFit(String),

    #[error("collapsed degree law has zero normalizer (no component carries a half-edge)")]
    ZeroNormalizer,

    #[error("solver did not converge: {0}")]
    SolverDiverged(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HcmError {
    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            HcmError::SolverDiverged(_) | HcmError::ZeroNormalizer | HcmError::UndefinedNu
        )
    }
}
