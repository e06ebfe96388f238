//! k-Motiflet discovery for univariate time series.
//!
//! A k-Motiflet is the set of `k` mutually non-overlapping windows of length
//! `l` whose largest pairwise z-normalized Euclidean distance (the extent) is
//! smallest. The crate provides
//!
//! * [`series`]: sliding window statistics, the trivial-match rule and a
//!   direct distance used as reference,
//! * [`distance`]: the O(n²) all-pairs distance sweep and non-trivial kNN,
//! * [`search`]: approximate, exact and reference motiflet search,
//! * [`learn`]: extent functions, elbow detection and length selection,
//! * [`fixture`], [`io`], [`run`]: synthetic data, ingestion and the
//!   end-to-end driver used by the command-line tool.

pub mod distance;
pub mod error;
pub mod fixture;
pub mod io;
pub mod learn;
pub mod run;
pub mod search;
pub mod series;

pub use distance::{compute_distance_source, row_knn, CustomMatrix, DistanceSource, Distances, NeighborList, Policy};
pub use error::{Error, Result};
pub use learn::{au_ef, extent_function, find_elbows, select_length, ElbowConfig, ExtentProfile, LengthScore};
pub use search::{
    approx_k_motiflet, exact_k_motiflet, oracle_k_motiflet, pairwise_extent, Exactness, Extent, Motiflet,
    SearchOptions, SearchOutcome, SearchState,
};
pub use series::{overlaps, sliding_stats, znorm_distance_naive, SeriesView};
