//! Experiment harness: declarative run configs, the sweep runner, result
//! tables and field snapshots.
//!
//! ```no_run
//! use ibdl_harness::{run, RunOptions, benchmarks::benchmark};
//! let cfg = benchmark("bessel-helmholtz").unwrap();
//! let out = run(&cfg, &RunOptions { write: true, ..Default::default() }).unwrap();
//! println!("{}", out.tables[0].body_csv());
//! ```

pub mod benchmarks;
pub mod config;
pub mod problems;
pub mod runner;
pub mod snapshot;
pub mod table;

pub use benchmarks::{benchmark, builtin_benchmarks};
pub use config::RunConfig;
pub use runner::{run, RunOptions, RunOutput};
pub use table::ResultTable;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// Malformed TOML, CSV or snapshot.
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed input with an invalid value.
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] ibdl_core::Error),
}
