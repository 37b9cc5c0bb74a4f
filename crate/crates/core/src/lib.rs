//! Commit-time defect detection with convolution tree kernels.
//!
//! An incoming method-level change is matched against the project's history in
//! two stages: a textual more-like-this query over an inverted index picks the
//! candidates, and a tree kernel over the abstract syntax trees ranks them. A
//! K-NN rule biased towards bug-inducing neighbours then labels the change.

pub mod ast;
pub mod classifier;
pub mod corpus;
pub mod evaluation;
pub mod kernels;
pub mod retrieval;
#[cfg(feature = "synth")]
pub mod synth;

pub use ast::{Label, Tree};
pub use kernels::{KernelConfig, KernelKind, SimilarityScore};
