//! Exact Newton polytopes of discriminants, resultants and eliminants of
//! projections, built on mixed fiber polytopes and combinatorial Euler
//! obstructions of lattice point configurations.

pub mod cli;
pub mod discriminant;
pub mod error;
pub mod fiber;
pub mod io;
pub mod lattice;
pub mod obstruction;
pub mod oracle;
pub mod polytope;
pub mod rational;
pub mod selftest;
pub mod volume;

pub use error::{Error, Result};
