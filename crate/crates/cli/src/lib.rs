//! Front-end for the `elcone` solver: problem files, the `solve`, `verify`
//! and `reproduce` subcommands, traces and reports.

pub mod commands;
pub mod exit;
pub mod output;
pub mod problem_file;

pub use exit::{CliError, ExitCode};
pub use problem_file::{parse_problem, MapSpec, OptionsOverride, ProblemFile};
