//! File formats, configuration and command implementations behind the
//! `hhardy` binary.

pub mod commands;
pub mod config;
pub mod polytope_file;
pub mod report;
