use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error("enumeration cap exceeded: {what} is {size}, cap {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("malformed circuit: {0}")]
    Circuit(String),
    #[error("no lattice fragment for tile {0}")]
    NoFragment(String),
    #[error("fragment {label} failed certification: {detail}")]
    Certification { label: String, detail: String },
    #[error("stitching failed: {0}")]
    Stitch(String),
    #[error("open circuit: {0} dangling connecting vertices")]
    OpenCircuit(usize),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
