//! Command-line front end: JSON channel specs in, CSV frontiers and witness
//! sidecars out.

pub mod commands;
pub mod error;
pub mod output;
pub mod quantities;
pub mod spec;

pub use commands::run;
pub use error::{CliError, CliResult};
pub use spec::{load_channel, parse_channel_spec, ChannelSpecDocument, ParsedChannel};

/// Environment variable overriding the worker thread count.
pub const THREADS_VAR: &str = "QBC_THREADS";
