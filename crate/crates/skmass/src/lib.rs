//! Command-line plumbing for skmass-core: the eigenbasis cache, run
//! configuration, the command pipelines and the JSON/CSV writers.

pub mod cache;
pub mod commands;
pub mod config;
pub mod output;
