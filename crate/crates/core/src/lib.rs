//! Signed orders on words over signed directed graphs, admissibility and
//! tuning, certified constructions, and the spectral side: Markov partitions,
//! incidence matrices, zeta denominators and kneading polynomials.

pub mod classify;
pub mod cli;
pub mod construct;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod matrix;
pub mod poly;
pub mod roots;
pub mod spectral;
pub mod tuning;
pub mod word;

pub use error::{Error, Result};
pub use graph::{SignedGraph, SystemConfig, Vertex};
pub use word::{Comparison, Word};

/// Integer polynomials with exact coefficients.
pub type IntPoly = poly::Poly<num_bigint::BigInt>;
/// Integer matrices as used for incidence matrices.
pub type IntMatrix = matrix::Matrix<i64>;
/// Double-precision spectra.
pub type Spectrum64 = spectral::Spectrum<f64>;
