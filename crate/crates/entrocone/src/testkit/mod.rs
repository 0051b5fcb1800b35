//! Test support: independent oracles and generators for the test suites.
//!
//! Nothing here is part of the stable API; the feature exists so
//! integration tests and benches can reach the same machinery the unit
//! tests use. The oracles are deliberately written against different
//! algorithms than the code they check: a textbook rational simplex, a
//! brute-force ray enumerator, and an exact entropy evaluator that tracks
//! prime logarithms instead of pivoting anything.

pub mod dist;
pub mod randcone;
pub mod refsimplex;

pub use dist::RatDist;
