//! Regional indicator analysis: correlation-matrix PCA with component
//! selection, complete-linkage clustering of regions in raw and component
//! space, partition concordance, per-cluster descriptive profiles and SVG
//! figures.
//!
//! The typical flow is [`ingest::load_table`] → [`ingest::impute_means`] →
//! [`ingest::standardize`] → [`pca::fit_pca`], then clustering with
//! [`hclust`] and comparison with [`concordance`]. [`pipeline::run_pipeline`]
//! wires all of it together from a [`config::PipelineConfig`].

pub mod concordance;
pub mod config;
pub mod error;
pub mod hclust;
pub mod ingest;
pub mod linalg;
pub mod pca;
pub mod pipeline;
pub mod plot;
pub mod profile;
pub mod report;
pub mod synthetic;

pub use error::{Error, Result};
