use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("field is not mean-zero: |mean| = {mean:e}, max = {max:e}")]
    NotMeanZero { mean: f64, max: f64 },
    #[error("field is not divergence-free: relative divergence {0:e}")]
    NotDivergenceFree(f64),
    #[error("density below vacuum floor: min sqrt(rho) = {min:e} < {floor:e}")]
    Vacuum { min: f64, floor: f64 },
    #[error("non-realizable initial velocity: {0}")]
    NonRealizable(String),
    #[error("time step {dt:e} exceeds stability bound {bound:e}")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("states are not synchronized: t = {a} vs t = {b}")]
    Desynchronized { a: f64, b: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
