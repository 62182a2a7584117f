use thiserror::Error;

/// Errors raised by the colligation constructions.
///
/// The display strings start with the variant name so that command-line
/// diagnostics can be matched by tooling.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("NotUnitary: unitarity defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { defect: f64, tol: f64 },

    #[error("NotOrthogonal: orthogonality defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotOrthogonal { defect: f64, tol: f64 },

    #[error("BadSplit: exposed dimension {alpha} does not fit a matrix of size {size}")]
    BadSplit { alpha: usize, size: usize },

    #[error("NonFinite: matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    #[error("NearSingular: relative smallest singular value {ratio:.3e} (sigma_min {sigma_min:.3e})")]
    NearSingular { sigma_min: f64, ratio: f64 },

    #[error("NearPole: 1 - zD is near-singular (sigma_min {sigma_min:.3e})")]
    NearPole { sigma_min: f64 },

    #[error("OnEigensurface: eliminated system is near-singular (sigma_min {sigma_min:.3e})")]
    OnEigensurface { sigma_min: f64 },

    #[error("AlphaMismatch: exposed dimensions {left} and {right} differ")]
    AlphaMismatch { left: usize, right: usize },

    #[error("ArityMismatch: collections of sizes {left} and {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("ResidualTooLarge: relative residual {residual:.3e}")]
    ResidualTooLarge { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
