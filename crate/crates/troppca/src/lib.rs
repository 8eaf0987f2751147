//! File formats, experiment runners and the command-line tool built on
//! [`troppca_core`].

pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod newick;
pub mod render;
pub mod report;
pub mod runner;
pub mod vectors;

pub use troppca_core as core;
