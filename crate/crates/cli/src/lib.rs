//! Library side of the `cloudsift` command.

pub mod commands;
pub mod pipeline;
pub mod report;
