use alloc::string::String;
use thiserror::Error;

use crate::structure::Level;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("undig: {0}")]
    Undig(String),
    #[error("atom {0} is outside the domain of the injection")]
    Uncovered(String),
    #[error("map is not injective at {0}")]
    NotInjective(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StructError {
    #[error("malformed structure: {0}")]
    Malformed(String),
    #[error("unknown port {0}")]
    UnknownPort(String),
    #[error("unknown cell {0}")]
    UnknownCell(String),
    #[error("operation needs level {need:?}, structure is {have:?}")]
    Level { need: Level, have: Level },
    #[error("cell {0} is not terminal")]
    NotTerminal(String),
    #[error("cell {0} cannot be used here: {1}")]
    BadCell(String, String),
    #[error("structure is not in class cbox")]
    NotCbox,
    #[error("bad conclusion indexing: {0}")]
    BadIndex(String),
    #[error("invalid proof-structure: {0}")]
    InvalidPs(String),
    #[error("ambiguous boxes: the structure is not connected")]
    AmbiguousBoxes,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Structure(#[from] StructError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("axiom at port {0} has no label")]
    MissingLabel(String),
    #[error("label of port {0} must be an element of D (no indexed atoms)")]
    NotInD(String),
    #[error("labels of axiom ports {0} and {1} are not orthogonal")]
    NotOrthogonal(String, String),
    #[error("label propagation does not terminate at port {0}")]
    Cycle(String),
    #[error("description does not fit the structure: {0}")]
    Shape(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SeparationError {
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Structure(#[from] StructError),
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error("precondition failed: {0}")]
    Precondition(String),
}
