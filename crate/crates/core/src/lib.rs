//! Spectral measures, ℓ²-Betti numbers and Benjamini–Schramm statistics of
//! finite and random rooted simplicial complexes.

pub mod canon;
pub mod complex;
pub mod error;
pub mod estimators;
pub mod generators;
pub mod linalg;
pub mod measures;
pub mod rng;
pub mod scx;
pub mod spectral;

pub use complex::{RootedComplex, Simplex, SimplicialComplex, Vertex};
pub use error::{Error, Result};
