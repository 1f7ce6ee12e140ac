use thiserror::Error;

/// Errors raised by graph queries.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertices {0} and {1} lie in different components")]
    DisconnectedPair(u32, u32),
    #[error("target vertex set is empty")]
    EmptyTarget,
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    BadVertex(u32, u32),
    #[error("path is not a valid ({l},{a})-quasi-geodesic: {reason}")]
    NotCertified { l: String, a: String, reason: String },
}

/// Errors raised by group-model operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("generator {0:?} not in the model's generating set")]
    UnknownGenerator(char),
    #[error("rank {0} out of supported range 1..=26")]
    BadRank(usize),
    #[error("cannot parse word {0:?}")]
    BadWord(String),
}

/// Errors raised by horoball and cusped-space construction.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("horoball base graph is empty")]
    EmptyBase,
    #[error("vertex {0} is not at level zero of a horoball")]
    NotLevelZero(u32),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors raised by the measurement engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("table never satisfies the sublinearity condition within r_max = {0}")]
    NotSublinearWithinRange(u32),
    #[error("window {0} too large for table with r_max = {1}")]
    WindowTooLarge(u32, u32),
    #[error("no certified paths generated")]
    NoPathsGenerated,
    #[error("the three paths do not close into a triangle")]
    NotATriangle,
    #[error("reference path never leaves the ball of radius {0}")]
    RadiusExceedsPath(u32),
    #[error("basepoint {0} lies inside the horoball under inspection")]
    BasepointInsideHoroball(u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
