use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge {0} is a loop; subdivide it into a cycle of length at least 3 first")]
    Loop(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown graph {0}")]
    UnknownGraph(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("graph is not suitably subdivided for n = {n}: {reason}")]
    Unsuitable { n: usize, reason: String },
    #[error("graph is not planar")]
    NotPlanar,
    #[error("tree conditions not satisfied: {0}")]
    Conditions(String),
    #[error("cell count exceeds cap {0}")]
    CapExceeded(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("iteration cap exceeded in {0}")]
    IterationCap(&'static str),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
