//! Monte-Carlo CCDF campaigns for the PAPR-reduction techniques in
//! `papr-core`: configuration parsing, a deterministic parallel runner and
//! CSV output.

pub mod config;
pub mod error;
pub mod output;
pub mod reproduce;
pub mod run;

pub use config::{parse_config, ExperimentConfig, TechniqueConfig};
pub use error::{BenchError, ConfigError, ConfigErrors, Result};
pub use output::{read_csv, write_csv, CsvCurve};
pub use reproduce::{reproduce, Figure};
pub use run::{run_experiment, RunResult, Summary};
