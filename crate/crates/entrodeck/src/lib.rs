//! Empirical entropy, De Bruijn sequences, and the card trick that connects
//! them.
//!
//! The crate computes exact k-th order empirical entropy of sigma-ary
//! strings under both linear and cyclic context conventions, generates,
//! verifies, counts, and (at tiny scale) exhaustively enumerates De Bruijn
//! sequences, models the deterministic Markov and unbiased memoryless
//! sources, simulates both variants of the color-decoding card trick, and
//! runs seeded Monte Carlo experiments that check each of the associated
//! finite-scale probability bounds.
//!
//! Interchangeable algorithm families (De Bruijn generation strategies,
//! distinguishers, experiments) sit behind traits and are selected by name
//! at runtime; see [`debruijn::strategy`], [`experiments::distinguisher`],
//! and [`experiments::run_experiment`].

pub mod cli;
pub mod debruijn;
pub mod deck;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod rng;
pub mod seq;
pub mod sources;

pub use error::{Error, Result};
pub use rng::RngSpec;
pub use seq::{parse_sequence, random_sequence, Alphabet, ParseMode, Sequence};
