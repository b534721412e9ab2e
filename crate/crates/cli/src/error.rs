//! Error classification for exit codes.

use std::fmt;

/// A bad invocation or configuration. Exits with code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Exit code for a failed run: 2 for usage and parameter errors, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let usage = err.chain().any(|e| {
        e.is::<UsageError>() || matches!(e.downcast_ref::<field_core::Error>(), Some(field_core::Error::InvalidParameter { .. }))
    });
    if usage {
        2
    } else {
        1
    }
}
