use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("operation requires a {expected} grid")]
    WrongGrid { expected: &'static str },

    #[error("point {0:?} is outside the map's domain")]
    OutsideDomain([f64; 2]),

    #[error("coincident points {0:?}")]
    Coincident([f64; 2]),

    #[error("incompatible Neumann data: defect {defect:e} exceeds tolerance {tolerance:e}")]
    Incompatible { defect: f64, tolerance: f64 },

    #[error("invalid counterexample parameters: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("row (beta={beta}, eps={eps}, n={n}) failed: {source}")]
    Row {
        beta: f64,
        eps: f64,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
