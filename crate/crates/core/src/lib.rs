//! Ranking-based semantic similarity and zero-shot classification.
//!
//! Semantic relatedness between classes is represented by rankings instead of
//! raw numeric similarity, which makes information from heterogeneous sources
//! comparable and easy to aggregate. The crate provides:
//!
//! - rankings, top-K lists, and Kendall distances ([`ranking`]);
//! - probabilistic ranking models with exact log-domain evaluation and
//!   samplers ([`models`]);
//! - prior fitting from multiple ranking observations per class, including
//!   consensus search ([`priors`]);
//! - probabilistic rankers built from pre-trained classifier scores
//!   ([`rankers`]);
//! - the DR / PR / DS zero-shot classifiers and similarity aggregation
//!   ([`zero_shot`]);
//! - a small linear-classifier suite producing the scores the rankers
//!   consume ([`classifiers`]);
//! - synthetic benchmark generation and file formats ([`synth`], [`io`]);
//! - evaluation harnesses ([`eval`]).

pub mod classifiers;
pub mod error;
pub mod eval;
pub mod io;
pub mod models;
mod opt;
pub mod priors;
pub mod rankers;
pub mod ranking;
pub mod synth;
pub mod zero_shot;

pub use error::{Error, Result};
