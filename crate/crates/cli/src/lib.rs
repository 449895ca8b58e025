//! Command-line front end for `nlslab-core`: JSON configs in, CSV/JSON
//! reports and NLST trajectory files out.

pub mod config;
pub mod error;
pub mod report_io;
pub mod run;
pub mod trajfile;

pub use error::CliError;
