//! Heading detection for text runs extracted from PDF-derived HTML.
//!
//! The crate is organised as a pipeline:
//!
//! - [`ingest`] pulls styled spans out of converter HTML and reads/writes
//!   labelled CSV datasets.
//! - [`features`] turns spans into the fourteen typographic and
//!   part-of-speech features.
//! - [`resample`] balances a dataset with SMOTE.
//! - [`classifiers`] holds the from-scratch classifier suite and the model
//!   file format.
//! - [`selection`] runs k-fold cross-validation, recursive feature
//!   elimination and grid search.
//! - [`evaluation`] computes confusion-matrix metrics, ROC/AUC, feature
//!   correlations and timings.
//!
//! Data-parallel loops go through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise. Results are
//! identical either way.

pub mod classifiers;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod features;
pub mod ingest;
pub mod resample;
pub mod rng;
pub mod selection;
pub mod synth;

pub use error::{Error, Result};
