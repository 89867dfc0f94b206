//! Batch front end for `hyperleaf-core`: TOML run configs, OBJ/JSON/CSV
//! artifacts, and the `solve`, `sweep`, `verify` and `oracle` verbs.
//!
//! Exit codes are part of the interface: 0 success, 1 config or usage
//! error, 2 solver failure, 3 verification failure.

pub mod checks;
pub mod commands;
pub mod config;
pub mod io;

use std::fmt;

pub use config::RunConfig;

/// Why a verb did not succeed; maps one-to-one onto the exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Config(String),
    Solver(String),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "config error: {m}"),
            Failure::Solver(m) => write!(f, "solver failure: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<hyperleaf_core::Error> for Failure {
    fn from(e: hyperleaf_core::Error) -> Self {
        use hyperleaf_core::Error as E;
        match e {
            E::CurvatureOutOfRange { .. } | E::InvalidArgument(_) | E::InvalidCurve(_) => Failure::Config(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}
