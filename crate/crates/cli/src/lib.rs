//! Configuration, the verification suite and data export behind the
//! `nonkahler` binary.

pub mod commands;
pub mod config;
pub mod verify;

use num_complex::Complex64;
use thiserror::Error;

/// Exit code for a completed run in which every check passed.
pub const EXIT_PASS: i32 = 0;
/// Exit code for a failed check or a numerical failure.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code for unusable input: config, cocycle file, sweep, I/O.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("cannot parse cocycle file: {0}")]
    Parse(String),
    #[error("sweep point {w} is outside 0 < |w| < {rho1}")]
    SweepOutsideDomain { w: Complex64, rho1: f64 },
    #[error("{0}")]
    Computation(String),
}

impl CliError {
    pub fn computation(e: impl std::fmt::Display) -> Self {
        CliError::Computation(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Computation(_) => EXIT_FAILURE,
            _ => EXIT_INPUT,
        }
    }
}
