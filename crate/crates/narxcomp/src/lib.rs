//! Model files, CSV output and the `narxcomp` command-line runner on top of
//! [`narxcomp_core`].

pub mod cli;
pub mod config;
pub mod csv;
pub mod error;
pub mod model_file;
pub mod parallel;
pub mod reproduce;
pub mod signal_arg;

pub use error::{AppError, AppResult};
