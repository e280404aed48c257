//! Benchmark harness for the detectors in `padd-core`: experiment
//! configuration, the stream × detector grid, the PADD α/θ sweep and the
//! `drift-bench` command line.

pub mod benchmark;
pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod runner;
pub mod sweep;

pub use benchmark::{run_benchmark, write_results, BenchmarkResults};
pub use config::{parse_config, ExperimentConfig};
pub use error::{BenchError, Result};
pub use sweep::{run_sweep, write_sweep, SweepSpec};
