//! Batch driver behind the `fbsing` binary.

pub mod config;
pub mod oracle;
pub mod pipeline;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CONFIG: u8 = 1;
    pub const NOT_CONVERGED: u8 = 2;
    pub const IO: u8 = 3;
}
