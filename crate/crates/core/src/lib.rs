//! Simulation of a Fibonacci-anyon quantum memory on a torus of hexagonal
//! tiles, corrected by a hierarchical cellular-automaton decoder.
//!
//! The crate is layered bottom-up:
//!
//! - [`anyon`]: fusion rules, F, R, B and S symbols, consistency checks.
//! - [`fusion`]: exact fusion-tree state of one connected group of anyons.
//! - [`lattice`]: torus geometry and the colony hierarchy.
//! - [`state`]: anyons on tiles, their groups and universal-cover positions.
//! - [`noise`]: pair-creation noise and faulty syndrome measurement.
//! - [`decoder`]: the cellular-automaton decoder and its scheduler.
//! - [`verifier`]: clustering decoder with perfect syndromes.
//! - [`sim`]: Monte Carlo lifetime estimation and result files.

pub mod anyon;
pub mod decoder;
pub mod error;
pub mod fusion;
pub mod lattice;
pub mod noise;
pub mod rng;
pub mod sim;
pub mod state;
pub mod verifier;

pub use error::{Error, Result};
