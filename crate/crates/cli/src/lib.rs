//! The `amoeba` command-line tool: configuration, initial contours, subcommands and run manifests.

pub mod commands;
pub mod config;
pub mod error;
pub mod init;

pub use commands::{contour_overlay, execute, Invocation, Outcome, RunContext, RunManifest};
pub use config::{parse_override, Config};
pub use error::{exit_code, UsageError};
pub use init::InitSpec;
