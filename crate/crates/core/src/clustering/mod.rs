//! Pairwise distance matrices, spectral clustering and gap-statistic
//! selection of the number of clusters.

pub mod gap;
pub mod kmeans;
pub mod matrix;
pub mod spectral;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::DistanceError;
use crate::term::Term;

pub use gap::{gap_statistic, intra_dispersion, Dispersion, GapReport, GapRow};
pub use matrix::{build_matrix, pairwise_queries, DistanceMatrix, SquareMatrix};
pub use spectral::{spectral_cluster, SpectralEmbedding, SpectralOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("matrix shape: {0}")]
    Shape(String),
    #[error("entry ({i}, {j}) = {value} is not a finite nonnegative distance")]
    InvalidEntry { i: usize, j: usize, value: f64 },
    #[error("matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("k = {k} is out of range for {n} elements")]
    InvalidK { k: usize, n: usize },
    #[error("all off-diagonal distances are equal; the gap statistic is undefined")]
    AllEqualMatrix,
    #[error("at least one reference matrix is required")]
    NoReferences,
    #[error("distance between \"{}\" and \"{}\": {source}", pair.0, pair.1)]
    Distance {
        pair: (Term, Term),
        #[source]
        source: DistanceError,
    },
    #[error("matrix TSV line {line}: {reason}")]
    Tsv { line: usize, reason: String },
}

/// A partition of `n` elements into `k` nonempty clusters numbered `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub k: usize,
    /// Cluster id per element, in `1..=k`.
    pub labels: Vec<usize>,
    /// `n_r` per cluster.
    pub sizes: Vec<usize>,
    /// Produced without spectral information because all distances were equal.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl ClusterAssignment {
    /// From zero-based cluster indices; panics if a cluster is empty or an
    /// index is out of range.
    pub fn from_zero_based(k: usize, labels: &[usize], degenerate: bool) -> Self {
        let mut sizes = vec![0; k];
        for &l in labels {
            sizes[l] += 1;
        }
        assert!(
            sizes.iter().all(|&s| s > 0),
            "every cluster must be nonempty"
        );
        ClusterAssignment {
            k,
            labels: labels.iter().map(|l| l + 1).collect(),
            sizes,
            degenerate,
        }
    }

    /// Members of cluster `r` (1-based).
    pub fn members(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l == r)
            .map(|(i, _)| i)
    }
}
