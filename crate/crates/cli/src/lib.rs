//! Library side of the `unistab` command-line tool: scenario files, literal
//! parsing, output formats and the subcommands.

pub mod commands;
pub mod file;
pub mod output;
pub mod parse;

pub use commands::{run, CliError, Source};
pub use file::ScenarioFile;
pub use output::ResultRecord;
