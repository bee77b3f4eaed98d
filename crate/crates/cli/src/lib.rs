//! Command-line driver: configuration parsing, experiment orchestration,
//! snapshot and CSV output.

pub mod config;
pub mod plot;
pub mod run;

use serde::Serialize;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use plot::{emit_plot_data, plot_csv};
pub use run::{run, Command, Outcome};

/// Machine-readable error record, printed as one JSON line on stderr.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub code: String,
    pub module: String,
    pub message: String,
}

impl From<&ConfigError> for ErrorRecord {
    fn from(e: &ConfigError) -> Self {
        Self {
            code: e.code().into(),
            module: "experiment-cli".into(),
            message: e.to_string(),
        }
    }
}

impl From<&eustat_core::Error> for ErrorRecord {
    fn from(e: &eustat_core::Error) -> Self {
        Self {
            code: e.code().into(),
            module: e.module().into(),
            message: e.to_string(),
        }
    }
}

impl ErrorRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain strings serialize")
    }
}
