//! Opinion-aware seed selection under the spread-acknowledge cascade.
//!
//! Opinions evolve by Friedkin-Johnsen dynamics on an undirected weighted
//! graph. A campaign seeded at a few users spreads through the graph and
//! shifts the innate opinion of every user it reaches. The crate estimates
//! how polarization, disagreement and related indices change and selects
//! seed sets that maximize them through reverse-reachable sampling.

// `!(x >= lo)` style checks also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cascade;
pub mod error;
pub mod experiment;
pub mod fj;
pub mod generators;
pub mod graph;
pub mod numeric;
pub mod optimizer;
pub mod rr;
pub mod world;

pub use cascade::{CampaignConfig, CampaignKind, CascadeOutcome, NodeState};
pub use error::{Error, Result};
pub use fj::{ColumnCache, IndexKind, SolverConfig};
pub use graph::{EdgeId, Graph, NodeId, OpinionVector};
pub use optimizer::{OptimizerParams, SeedResult, SelectionMode};
pub use rr::{RRPair, RRSet, WeightTable};
pub use world::{EdgeCoins, EdgeLabel, LazyWorld};
