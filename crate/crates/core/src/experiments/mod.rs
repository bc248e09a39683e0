//! Parameter sweeps, growth fits, the invariant suite and the CLI.

pub mod checks;
pub mod cli;
pub mod config;
pub mod fit;
pub mod sweep;

pub use config::SweepConfig;
pub use fit::{fit_log_exponent, fit_log_exponent_offset, Fit};
pub use sweep::{evaluate, run_sweep, Row, SweepReport};
