use thiserror::Error;

/// Errors raised by the library. Variants map onto the CLI's exit codes:
/// configuration problems exit with 2, everything else with 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state {0} is outside the closed unit interval")]
    StateOutOfRange(f64),

    #[error("parameter {0} is outside (0, 4]")]
    LambdaOutOfRange(f64),

    #[error("no interior fixed point for lambda = {0} (only the origin is fixed)")]
    NoInteriorFixedPoint(f64),

    #[error("kernel degenerates to a point mass at 0 for x = {0}")]
    DegenerateState(f64),

    #[error("density has a pole at x = {0}")]
    DensityPole(f64),

    #[error("parameter law has no density: {0}")]
    NotAbsolutelyContinuous(String),

    #[error("invalid parameter law: {0}")]
    InvalidLaw(String),

    #[error("invalid interval set: {0}")]
    InvalidIntervals(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("bin edges do not match; rebin first")]
    BinningMismatch,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("rejection sampler for {law} exceeded {attempts} attempts")]
    RejectionCap { law: String, attempts: usize },

    #[error("operator row {0} has no mass")]
    EmptyRow(usize),

    #[error("power iteration did not reach tolerance after {iterations} iterations (residual {residual:e}){}", if *.oscillating { ", residual oscillates" } else { "" })]
    NotConverged {
        iterations: usize,
        residual: f64,
        oscillating: bool,
        last: Vec<f64>,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::StateOutOfRange(_)
                | Error::LambdaOutOfRange(_)
                | Error::InvalidLaw(_)
                | Error::InvalidIntervals(_)
                | Error::Config(_)
                | Error::Parse { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
