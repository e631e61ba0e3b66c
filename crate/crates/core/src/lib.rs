//! Detecting Fourier subspaces of `l²(G)` for finite abelian groups `G`.
//!
//! The crate builds standard and Fourier subspaces, measures their overlap
//! `‖PQ‖`, checks the finite uncertainty principle, and runs the
//! barrier-potential greedy selection that produces standard subspaces a
//! small Fourier subspace can barely detect.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod group;
pub mod linalg;
pub mod operator;
pub mod rng;
pub mod sparsifier;
pub mod subspaces;

pub use error::{Error, Result};
