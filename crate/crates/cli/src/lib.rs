//! Command implementations for the `timtin` binary.

pub mod commands;
pub mod config;
pub mod experiments;
pub mod io;

/// A computed scheme failed its own verification.
#[derive(Debug, thiserror::Error)]
#[error("verification failed: {0}")]
pub struct Verification(pub String);

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;

/// Exit status for an error returned by a command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<Verification>().is_some() {
        return EXIT_VERIFICATION;
    }
    match err.downcast_ref::<timtin_core::Error>() {
        Some(timtin_core::Error::RingNotAligned { .. }) => EXIT_VERIFICATION,
        _ => EXIT_VALIDATION,
    }
}
