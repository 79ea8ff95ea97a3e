//! Reproducible experiment runner for `shadowkit`.
//!
//! A run is fully determined by its TOML config (and the `--seed`
//! override): trials execute in parallel but reports are assembled in
//! trial and grid order, so repeated runs write identical bytes.

pub mod config;
pub mod recheck;
pub mod report;
pub mod run;
pub mod sweep;
pub mod systems;

use shadowkit::ShadowError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Shadow(#[from] ShadowError),
    #[error("i/o error: {0}")]
    Io(String),
}

/// All verdicts passed.
pub const EXIT_PASS: i32 = 0;
/// Some bound or verdict failed.
pub const EXIT_FAIL: i32 = 1;
/// Config, precondition or i/o error.
pub const EXIT_ERROR: i32 = 2;

pub fn exit_code(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
