//! Fast-failover routing over edge-disjoint paths extended into trees.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the algorithmic
//! pieces: graph representation and generators, unit-capacity max-flow for
//! edge-disjoint paths, tree extension / truncation / ranking, compilation of
//! routing structures into static per-node forwarding rules, a hop-by-hop
//! forwarding simulator, and the random and clustered link-failure models.
//!
//! File formats, timing, experiment orchestration and the command line live in
//! the `tree-route` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod error;
pub mod failures;
mod flow;
pub mod generate;
pub mod graph;
pub mod rng;
pub mod routing;
pub mod structures;

pub use error::Error;
pub use failures::{clustered_failures, random_failures, Decay, FailureModel, FailureScenario};
pub use generate::{erdos_renyi, erdos_renyi_giant, random_regular, Generated};
pub use graph::{edge_connectivity, Edge, Graph, NodeId};
pub use routing::{
    compile_rules, lookup, simulate, Action, FailReason, ForwardingTable, Hop, Outcome,
    PacketTrace, PortContext,
};
pub use structures::{
    build_structures, compute_edps, extend_multiple_trees, extend_one_tree, rank_branches,
    truncate_tree, EdpSet, Mode, Path, RoutingStructures, Tree, Unit,
};

pub type Result<T, E = Error> = core::result::Result<T, E>;
