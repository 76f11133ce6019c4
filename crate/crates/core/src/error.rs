use thiserror::Error;

/// Errors raised by density estimation and bandwidth selection.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KdeError {
    #[error("bandwidth must be positive and finite, got {0}")]
    NonPositiveBandwidth(f64),

    #[error("roughness must be positive, got {0}")]
    NonPositiveRoughness(f64),

    #[error("grid of {cells} cells exceeds the cap of {cap}")]
    GridTooLarge { cells: u128, cap: usize },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("corrected roughness stayed non-positive after {0} bandwidth backoffs")]
    BackoffExhausted(usize),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, KdeError>;

pub(crate) fn check_bandwidth(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(KdeError::NonPositiveBandwidth(h))
    }
}
