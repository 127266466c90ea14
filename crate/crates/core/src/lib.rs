//! Fault-tolerant graph spanners.
//!
//! A subgraph `H` of `G` is an `f`-fault-tolerant `t`-spanner if for every
//! fault set `F` of at most `f` vertices (or edges) and every surviving pair
//! `u, v`, the distance in `H \ F` is at most `t` times the distance in
//! `G \ F`. This crate builds such spanners with `t = 2k - 1`:
//!
//! * [`greedy`] — an exact exponential-time construction and a polynomial
//!   one driven by length-bounded cut decisions,
//! * [`lbc`] — the gap decision procedure for length-bounded cuts,
//! * [`verify`] — brute-force checkers, girth search, and size audits,
//! * [`gen`] — deterministic seeded graph generators,
//! * [`distsim`] — round-synchronous simulations of message-passing
//!   constructions with round and bandwidth accounting.

pub mod distsim;
pub mod gen;
pub mod graph;
pub mod greedy;
pub mod io;
pub mod lbc;
mod seeding;
pub mod verify;

pub use graph::{EdgeId, FaultMode, FaultSet, Graph, Path, VertexId, Weight};
