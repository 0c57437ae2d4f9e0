use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Relative velocity is (numerically) zero, so TCPA is undefined.
    #[error("degenerate relative motion: |dv|^2 = {rel_speed_sq:e}")]
    DegenerateRelativeMotion { rel_speed_sq: f64 },

    #[error("coincident positions: bearing is undefined")]
    CoincidentPositions,

    #[error("invalid sample count {0}")]
    InvalidCount(usize),

    #[error("negative input for {0}")]
    NegativeInput(&'static str),

    #[error("invalid vessel state: {0}")]
    InvalidState(String),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("bandwidth must be positive and finite, got {0}")]
    NonpositiveBandwidth(f64),

    #[error("samples have zero dispersion")]
    ZeroDispersion,

    #[error("ISJ fixed-point equation has no bracketed root")]
    FixedPointFailure,

    #[error("bandwidth grid is empty")]
    EmptyGrid,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input")]
    EmptyInput,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
