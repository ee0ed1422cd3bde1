use thiserror::Error;

use crate::background::Background;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid background: {0}")]
    InvalidBackground(String),
    #[error("pointwise evaluation is not supported on {0}")]
    Unsupported(Background),
    #[error("mode {label} does not belong to {background}")]
    InvalidMode { background: Background, label: String },
    #[error("point {point:?} is not on the unit-scale shrinker (defect {defect:e})")]
    OffShrinker { point: Vec<f64>, defect: f64 },
    #[error("time must be strictly negative, got {0}")]
    NonNegativeTime(f64),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    #[error("frequency undefined for the zero field at t = {0}")]
    ZeroField(f64),
    #[error("grid interval [{start}, {end}] needs more than {max_substeps} sub-steps to reach tolerance {tolerance:e}")]
    GridTooCoarse {
        start: f64,
        end: f64,
        max_substeps: usize,
        tolerance: f64,
    },
    #[error("invalid forcing: {0}")]
    InvalidForcing(String),
}

pub type Result<T> = std::result::Result<T, Error>;
