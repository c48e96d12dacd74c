//! Untyped cut-free MELL proof-structures, their relational experiments and
//! the separation procedure that rebuilds an isomorphism of linear
//! proof-structures from the results of injective atomic k-experiments.

#![no_std]

extern crate alloc;

pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod iso;
pub mod ps;
pub mod psexp;
pub mod separation;
pub mod structure;
pub mod value;

pub use error::{ExperimentError, SeparationError, StructError, ValueError};
pub use structure::{
    Builder, Cell, CellType, Class, Id, Indexed, Level, Measure, Structure, Validation, Violation, WhyKind,
};
pub use value::{Atom, Multiset, PartialInjection, Pol, Substitution, Value};
