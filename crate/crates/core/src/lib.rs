//! Graph condensation toolkit: a small dense/sparse tensor layer with
//! reverse-mode differentiation, GNN models, gradient-matching condensation
//! with a learned pairwise structure generator, coreset baselines, an
//! evaluation harness, and text-based dataset I/O.

pub mod condense;
pub mod coresets;
pub mod dataio;
pub mod error;
pub mod graph;
pub mod harness;
pub mod models;
pub mod ndtape;

pub use error::{Error, Result};
