//! Inter-plane link matching for multi-plane LEO constellations.
//!
//! Satellites on circular orbits are propagated analytically, links are
//! priced with a two-level transmit power policy, and each snapshot is solved
//! as a matching between planes: optimally for two planes, greedily, or
//! greedily with the previous snapshot's links kept while still in range.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod io;
pub mod linkbudget;
pub mod matching;
pub mod sim;

pub use error::{Error, Result};
