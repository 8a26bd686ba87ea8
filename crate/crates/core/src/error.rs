use thiserror::Error;

use crate::morphism::SplitMove;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid track `{track}`: {issues}")]
    InvalidTrack { track: String, issues: String },

    #[error(
        "track is not orientable; conflicting cycle through edges {}",
        join(witness)
    )]
    NotOrientable { witness: Vec<String> },

    #[error("no splitting available: every switch has valency at most 3")]
    NoSplitAvailable,

    #[error("illegal move {mv}: condition ({condition}) {reason}")]
    IllegalMove {
        mv: SplitMove,
        condition: char,
        reason: String,
    },

    #[error("move {index} of the sequence is illegal: {source}")]
    IllegalMoveAt {
        index: usize,
        #[source]
        source: Box<Error>,
        /// Serialized track on which the move was attempted.
        track_dump: String,
    },

    #[error("morphisms do not chain: {0}")]
    ChainMismatch(String),

    #[error("not a bijection: {0}")]
    NotABijection(String),

    #[error("not a self-map: source `{source_name}` and target `{target}` differ")]
    NotASelfMap { source_name: String, target: String },

    #[error("matrix is not irreducible")]
    NotIrreducible,

    #[error("power iteration did not reach the requested tolerance after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error(
        "boundary curve {boundary} is not mapped onto a boundary curve: image reduces to `{image}`"
    )]
    BoundaryNotPreserved { boundary: usize, image: String },

    #[error("side alignment failed: {0}")]
    Alignment(String),

    #[error("unknown atlas entry `{0}`")]
    UnknownEntry(String),

    #[error("bad family index {0}")]
    BadIndex(i64),

    #[error("inconsistent constraints: {0}")]
    InconsistentConstraints(String),

    #[error("map `{map}` has no image for edge `{edge}`")]
    MissingImage { map: String, edge: String },

    #[error("unknown edge label `{0}`")]
    UnknownLabel(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("search aborted after visiting {nodes} nodes")]
    ResourceLimit { nodes: usize },

    #[error("not an identification: {0}")]
    NotAnIdentification(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

fn join(items: &[String]) -> String {
    items.join(" ")
}
