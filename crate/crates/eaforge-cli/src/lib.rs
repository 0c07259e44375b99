//! Batch front end for the S-box equivalence toolkit: function file
//! parsing and the JSON-lines subcommand implementations behind the
//! `eaforge` binary.

pub mod commands;
pub mod format;
