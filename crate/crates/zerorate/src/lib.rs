//! Documents, codebook files and the `zerorate` command line on top of
//! [`zerorate_core`].

pub mod cli;
pub mod codebook_file;
pub mod document;
pub mod error;
pub mod parallel;
pub mod report;
pub mod schema;

pub use error::{CliError, Result};
