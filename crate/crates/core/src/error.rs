use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite sample: {0}")]
    NonFiniteSample(f64),

    #[error("density evaluated to {value} at x = {x}; densities must be positive and finite")]
    InvalidDensity { x: f64, value: f64 },

    #[error("custom distribution has no sampler for {0}")]
    MissingSampler(&'static str),

    #[error("distribution pair is indistinguishable (d0' = {d0_prime})")]
    IndistinguishablePair { d0_prime: f64 },

    #[error(
        "calibration target {target} unreachable within bounds: \
         rate {achieved} at boundary {boundary}"
    )]
    CalibrationUnreachable {
        target: f64,
        achieved: f64,
        boundary: f64,
    },

    #[error("calibration did not converge after {iterations} iterations (closest rate {closest})")]
    CalibrationDidNotConverge { iterations: u32, closest: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
