//! Exact toolkit for convex-hull peeling sequences.
//!
//! A peeling sequence of a labeled point set in general position removes one
//! extreme point at a time until nothing is left. This crate counts and
//! enumerates such sequences exactly, builds recursive configurations with few
//! peeling sequences, certifies their structural invariants, and checks the
//! accompanying combinatorial and scalar inequalities with big integers.

pub mod combinatorics;
pub mod constructions;
pub mod error;
pub mod geometry;
pub mod bounds;
pub mod peeling;
pub mod report;
pub mod search;

pub use error::{Error, Result};
