//! Network description files and the `lqfn` command-line tool.
//!
//! Networks are written as JSON (see [`file`]) and compiled with
//! [`lqfn_core::network`]. The [`cli`] module implements the subcommands;
//! [`examples`] holds the bundled network files.

pub mod cli;
pub mod error;
pub mod examples;
pub mod file;
pub mod output;

pub use error::CliError;
pub use file::{parse_network, parse_network_str, NetworkFile};
