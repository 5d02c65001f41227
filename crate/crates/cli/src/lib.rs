//! Command-line front end for `slhkit`: model files, validation, frequency
//! sweeps, series composition and adiabatic limits.

pub mod commands;
pub mod csv;
pub mod error;
pub mod io;
pub mod plot;

pub use commands::{run, Cli, Command};
pub use error::{CliError, CliResult};
pub use io::ModelFile;
