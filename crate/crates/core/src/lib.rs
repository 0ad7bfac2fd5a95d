//! Normalized Google distance (NGD) for pairs and multisets of search terms.
//!
//! Counts come from pluggable [`providers`] and are frozen into a
//! [`FrequencySnapshot`]; [`distance`] computes NGD from a snapshot;
//! [`classifier`] and [`clustering`] build on the distance.

pub mod classifier;
pub mod clustering;
pub mod distance;
pub mod providers;
pub mod snapshot;
pub mod term;

pub use classifier::{ClassProfile, ClassSet, ClassificationResult, QueryMode};
pub use clustering::{ClusterAssignment, DistanceMatrix, GapReport};
pub use distance::{
    google_code, google_probability, ngd, ngd_pairwise, ngd_queries, DenominatorVariant,
    DistanceError, Ngd, NgdNote, NgdOptions,
};
pub use snapshot::{FrequencySnapshot, SnapshotError};
pub use term::{Term, TermError, TermMultiset};
