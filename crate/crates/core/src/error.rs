use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates its documented range.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Parameters are individually valid but the combination is unusable
    /// for the requested quantity.
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// Evaluation outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at a singular point of a vector field.
    #[error("singular point: {0}")]
    Singular(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("integration diverged at t = {time}")]
    Diverged { time: f64 },

    #[error("floor {floor} violated at t = {time} after {halvings} step halvings")]
    FloorViolation {
        time: f64,
        floor: f64,
        halvings: u32,
    },

    #[error("criterion does not change across [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
