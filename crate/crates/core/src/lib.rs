//! Triplet-Markov naive Bayes classification of fixed-length DNA reads,
//! with a toolkit for measuring and exploring the classifier's decision
//! boundary on the Hamming graph of sequences.
//!
//! The pieces:
//!
//! - [`seq`] — the `{A,C,G,T,N}` alphabet, Hamming distances, neighbor
//!   enumeration and Hamming paths;
//! - [`fasta`] — FASTA/FASTQ and plain-text read ingestion;
//! - [`triplet`] — triplet (second-order Markov) models, Hellinger
//!   distances, model-driven genome simulation and null quantiles, plus
//!   three bundled reference models;
//! - [`bayes`] — log-space likelihoods with exact marginalization over
//!   undetermined bases, posteriors and MAP decisions;
//! - [`boundary`] — boundary membership, Neighbor Similarity (full and
//!   sampled) and distance-from-boundary bounds;
//! - [`explore`] — Hamming-path search, random walks and boundary crawls;
//! - [`readsim`] — a simplified substitution/N read simulator;
//! - [`analysis`] — confusion matrices, chi-square and KS statistics,
//!   ROC/AUC, quadratic regression and the neighbor-sampling error curve.
//!
//! Everything that consumes randomness takes an explicit seed or generator,
//! and all parallel reductions are order-independent, so results are
//! reproducible bit-for-bit across runs and worker counts.

pub mod analysis;
pub mod bayes;
pub mod boundary;
pub mod error;
pub mod explore;
pub mod fasta;
pub mod readsim;
pub mod seq;
pub mod triplet;

pub use bayes::{BayesClassifier, ClassLabel, Classifier, Posterior, Prior};
pub use error::{Error, Result};
pub use seq::{Alphabet, Sequence};
pub use triplet::TripletModel;
