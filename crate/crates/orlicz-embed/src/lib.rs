//! Verification suites, report formats and the command-line front end for
//! [`orlicz_embed_core`].

pub mod cli;
pub mod config;
pub mod construct;
pub mod report;
pub mod suites;
pub mod threads;

pub use threads::Threaded;
