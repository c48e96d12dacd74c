//! File formats, random generation of proof-structures, DOT export and the
//! reports printed by the `mell` command.

pub mod error;
pub mod generate;
pub mod io;
pub mod render;
pub mod report;

pub use error::CliError;
