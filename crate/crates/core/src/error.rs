use alloc::string::String;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not of doubled-up form (max deviation {deviation:e})")]
    Structure { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symplectic (residual {residual:e})")]
    NonSymplectic { residual: f64 },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid covariance: {0}")]
    InvalidCovariance(String),

    #[error("zero-occupation mode {mode} has squeezing coupling {coupling:e}")]
    InconsistentZeroMode { mode: usize, coupling: f64 },

    #[error("state has a nonzero mean")]
    NonZeroMean,

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("not physically realizable: {identity} violated (residual {residual:e})")]
    NotRealizable {
        identity: &'static str,
        residual: f64,
    },

    #[error("channel mismatch: {left} vs {right}")]
    ChannelMismatch { left: usize, right: usize },

    #[error("component has a nonzero Hamiltonian (max entry {magnitude:e})")]
    NotZeroHamiltonian { magnitude: f64 },

    #[error("bad partition: {0}")]
    BadPartition(String),

    #[error("ill-posed feedback loop (smallest singular value {min_singular_value:e}, threshold {threshold:e})")]
    IllPosed {
        min_singular_value: f64,
        threshold: f64,
    },

    #[error("s = {s} is at a pole ({pole})")]
    PoleHit { s: Complex64, pole: Complex64 },

    #[error("s = {s} is at a transmission zero ({zero})")]
    ZeroHit { s: Complex64, zero: Complex64 },

    #[error("components share mode {0}")]
    SharedModes(String),

    #[error("dangling port {0}")]
    DanglingPort(String),

    #[error("port used more than once: {0}")]
    PortReuse(String),

    #[error("unknown port {0}")]
    UnknownPort(String),

    #[error("wire-only cycle through {0}")]
    CycleWithoutComponent(String),
}
