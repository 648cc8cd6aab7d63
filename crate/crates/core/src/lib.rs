//! Rumour detection toolkit.
//!
//! Tweets are turned into one of two representations, a 39-slot integer
//! feature vector ([`features`]) or a sentence embedding ([`embedding`]),
//! and classified as rumour or non-rumour by one of six classifiers
//! ([`classifiers`]). [`eval`] implements the confusion-matrix metrics,
//! hold-out and k-fold protocols, and the comparison tables.

pub mod classifiers;
pub mod dataset;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod features;

pub use dataset::{ClassLabel, LabeledDataset, Tweet, UserMeta};
pub use error::{Error, Result};
