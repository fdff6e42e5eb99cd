//! Multiparameter persistence fingerprints for molecular graphs.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! * [`molgraph`]: molecule data model, SDF/JSON ingestion, hop distances.
//! * [`filtration`]: sublevel hierarchies, clique complexes, power (Vietoris-Rips)
//!   slices and the sublevel/weight bifiltrations.
//! * [`persistence`]: persistence diagrams in dimensions 0 and 1, plus a
//!   rank-based Betti oracle.
//! * [`vectorize`]: single-parameter vectorizations (Betti curve, landscape,
//!   silhouette, entropy curve, persistence image).
//! * [`mpfingerprint`]: slice-wise fingerprint matrices and arrays, bigraded
//!   Betti numbers, multimodal stacking and the on-disk container.
//! * [`metric`]: Wasserstein distances, slice-wise matching distance,
//!   fingerprint distance and the stability check.
//! * [`pipeline`]: library-wide thresholds and multimodal extraction.
//! * [`screening`]: embeddings, template ranking, EF/AUC, triplet mining,
//!   a linear metric learner and cross-validation.

pub mod error;
pub mod filtration;
pub mod metric;
pub mod molgraph;
pub mod mpfingerprint;
pub mod persistence;
pub mod pipeline;
pub mod screening;
pub mod synthetic;
pub mod vectorize;

mod assignment;

pub use error::{Error, Result};
