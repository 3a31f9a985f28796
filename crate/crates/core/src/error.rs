//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("custom symbol evaluated outside its table: |xi| = {xi} not in [{min}, {max}]")]
    SymbolOutOfRange { xi: f64, min: f64, max: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error(
        "frequency {frequency} is not resolved on a grid with {n_modes} modes over length {length}"
    )]
    UnresolvedFrequency {
        frequency: f64,
        n_modes: usize,
        length: f64,
    },

    #[error("wave packet does not fit: domain length {length} < required {required}")]
    PacketTooWide { length: f64, required: f64 },

    #[error("numerical blow-up detected at t = {time}")]
    Blowup { time: f64 },

    #[error("time step underflow at t = {time} (dt = {dt})")]
    StepUnderflow { time: f64, dt: f64 },

    #[error("norm trajectory cannot be matched by the a-priori bound: {0}")]
    FitFailure(String),

    #[error("family does not provide an analytic time derivative at t = {0}")]
    UnsupportedFamily(f64),

    #[error("slope fit rejected input: {0}")]
    BadFitData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("failed to parse {path}: {msg}")]
    Parse { path: String, msg: String },
}
