use ngd_core::classifier::ClassifierError;
use ngd_core::clustering::ClusterError;
use ngd_core::providers::ProviderError;
use ngd_core::{DistanceError, SnapshotError, TermError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    /// Process exit status.
    pub fn code(&self) -> i32 {
        match self.kind() {
            "usage" => 1,
            "provider" => 2,
            _ => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Provider(e) => match e {
                ProviderError::MissingFile(_) => "usage",
                ProviderError::DuplicateDocId(_)
                | ProviderError::EmptyCorpus
                | ProviderError::Format { .. }
                | ProviderError::Snapshot(_) => "data",
                _ => "provider",
            },
            CliError::Data(_) => "data",
        }
    }

    /// The one-line form written to stderr.
    pub fn line(&self) -> String {
        format!(
            "error kind={} code={} message={}",
            self.kind(),
            self.code(),
            serde_json::to_string(&self.to_string()).expect("string serializes")
        )
    }
}

macro_rules! data_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        })*
    };
}

data_error!(ClassifierError, ClusterError, DistanceError, SnapshotError);

impl From<TermError> for CliError {
    fn from(e: TermError) -> Self {
        CliError::Usage(e.to_string())
    }
}
