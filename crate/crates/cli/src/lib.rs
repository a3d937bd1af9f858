//! Library side of the `rareperm` command: input parsing, request execution
//! and report rendering.

pub mod args;
pub mod input;
pub mod report;
pub mod run;

pub use args::Cli;
pub use input::{load_matrix, parse_matrix, Feature, ParseError};
pub use run::{run, run_seed, MethodChoice, OutputFormat, RunOutput, RunRequest, Source};
