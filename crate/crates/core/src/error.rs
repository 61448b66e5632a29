use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance has {n} nodes, above the brute-force cap of {cap}; raise the cap explicitly (e.g. --cap) to enumerate anyway")]
    AboveCap { n: usize, cap: usize },

    #[error("simplex stalled after {iterations} iterations")]
    SolverStall { iterations: usize },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error(
        "planted cut vector is not optimal: LP value {lp_value} vs planted value {planted_value}"
    )]
    PlantedNotOptimal { lp_value: f64, planted_value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
