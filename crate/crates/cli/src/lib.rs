//! File formats, the instance generator and the subcommands behind the
//! `submin` binary.

pub mod commands;
pub mod format;
pub mod generate;
