use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix or vector dimensions do not match.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A truncated state failed its tail-weight budget even after the
    /// truncation index was escalated to the hard cap.
    #[error("truncation failure: tail weight {tail_weight:.3e} exceeds {tolerance:.3e} at m_max = {m_max}")]
    Truncation {
        tail_weight: f64,
        tolerance: f64,
        m_max: usize,
    },

    /// The normalization series of an analytic-coefficient state diverges at
    /// the supplied argument.
    #[error("normalization series diverges at |z| = {z_abs}")]
    DivergentNormalization { z_abs: f64 },

    /// The operator-product expansion conjugates the ladder operators through
    /// the finite group action, which requires a group-generated state.
    /// Barut-Girardello states are eigenstates of the lowering operator and
    /// are not reachable from the lowest weight by any su(1,1) group element,
    /// so the expansion machinery does not apply to them.
    #[error(
        "operator-product expansion requires a group-generated coherent state; \
         Barut-Girardello states are not generated by the su(1,1) group action"
    )]
    BarutGirardelloExpansion,
}

pub type Result<T> = std::result::Result<T, Error>;
