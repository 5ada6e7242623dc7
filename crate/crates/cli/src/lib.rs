//! Sweeps, single-point evaluation and the closed-form / quadrature / Monte
//! Carlo validation triangle behind the `rispls` binary.

pub mod config;
pub mod output;
pub mod sweep;
pub mod validate;

pub use config::{load_config, Preset, Settings};
pub use output::{write_rows, Format};
pub use sweep::{run_sweep, EvalMethod, Metric, Row, SweepOutcome, SweepSpec, SweepVar};
pub use validate::{run_validation, TriangleRow, ValidationReport};

/// Environment variable holding the worker count; unset or `0` uses every core.
pub const WORKERS_ENV: &str = "RISPLS_WORKERS";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
