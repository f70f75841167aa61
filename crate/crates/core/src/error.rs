use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid Jordan data: {0}")]
    InvalidJordan(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular or numerically singular ({0})")]
    Singular(String),

    #[error("basis matrix is ill-conditioned (reciprocal condition {rcond:e})")]
    IllConditioned { rcond: f64 },

    #[error("eigenvalue iteration did not converge; {} of {} eigenvalues found", partial.len(), n)]
    NoConvergence { partial: Vec<Complex64>, n: usize },

    #[error("spike below outer radius: |theta| = {modulus} <= b = {b}")]
    SpikeBelowRadius { modulus: f64, b: f64 },

    #[error("covariance is indefinite (pivot {pivot:e})")]
    Indefinite { pivot: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("order cap: permutation order {k} exceeds {max}")]
    OrderCap { k: usize, max: usize },

    #[error("Weingarten function needs n >= k (n = {n}, k = {k})")]
    DimensionTooSmall { n: usize, k: usize },

    #[error("count mismatch: expected {expected}, got {got}")]
    CountMismatch { expected: usize, got: usize },

    #[error("experiment failed: {0}")]
    Experiment(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
