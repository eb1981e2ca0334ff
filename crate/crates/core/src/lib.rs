//! Textual data distribution (TDD) tooling.
//!
//! The crate covers the whole life-cycle of comparing two text corpora:
//! cleaning and labeling ([`corpus`], [`sentiment`]), bag-of-words features
//! ([`features`]), supervised and unsupervised baselines ([`classify`],
//! [`cluster`]), Markov-chain generation ([`generate`]) and the KL-TDC
//! alignment score with its self-sample baseline ([`distributions`]).

pub mod classify;
pub mod cluster;
pub mod corpus;
pub mod distributions;
pub mod error;
pub mod features;
pub mod generate;
pub mod seed;
pub mod sentiment;
pub mod synth;

pub use error::{Error, Result};
