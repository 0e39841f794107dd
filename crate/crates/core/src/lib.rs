//! Influence maximization under the independent cascade model.
//!
//! Seeds are chosen greedily by walk-probability scores: the score of a vertex
//! is the summed probability of every walk of length at most `L` that starts
//! at it. After each selection the scores of the remaining vertices are
//! corrected incrementally from the reverse walk columns of the new seed, and
//! corrections are applied lazily, only to vertices that could still be the
//! next maximum.
//!
//! Modules:
//!
//! - [`graph`]: dual-CSR influence graphs, edge-list and binary IO, the WC/TR/UN
//!   probability models.
//! - [`score`]: initial per-hop score vectors and reverse walk columns.
//! - [`update`]: basic and lazy incremental score updating.
//! - [`select`]: the greedy drivers (QuickIM, basic greedy, CELF baseline).
//! - [`eval`]: Monte-Carlo spread estimation and the robustness harness.
//! - [`oracle`]: exponential-time exact references for tiny graphs.
//! - [`cli`]: the `quickim` command-line front end.

pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod oracle;
pub mod score;
pub mod select;
pub mod update;

pub use error::{Error, Result};
pub use graph::{InfluenceGraph, VertexId};
