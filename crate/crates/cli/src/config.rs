//! Run configuration, loadable from TOML and overridable from the command line.

use std::path::{Path, PathBuf};

use ngd_core::providers::ProviderConfig;
use ngd_core::NgdOptions;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Term whose cached count stands in for the page total `M` of a search
/// source when no `M` is configured.
pub const DEFAULT_PAGE_TOTAL_PROBE: &str = "the";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Tsv,
}

/// Everything besides the subcommand that determines a report.
///
/// Seeds and counts above `i64::MAX` cannot be written to TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub provider: ProviderConfig,
    /// Explicit normalizer `N`; wins over everything else.
    pub normalizer_n: Option<u64>,
    /// Page total `M`; `N = α·M` when no `N` is given.
    pub page_total_m: Option<u64>,
    /// Cached term whose count is used as `M` for search sources; empty
    /// disables the lookup.
    pub page_total_probe: String,
    pub terms_per_page_alpha: Option<f64>,
    pub options: NgdOptions,
    pub cache: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            provider: ProviderConfig::default(),
            normalizer_n: None,
            page_total_m: None,
            page_total_probe: DEFAULT_PAGE_TOTAL_PROBE.to_string(),
            terms_per_page_alpha: None,
            options: NgdOptions::default(),
            cache: None,
            format: OutputFormat::Text,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {}", e.message())))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}
