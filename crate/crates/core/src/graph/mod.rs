//! Radio networks and their conflict graphs.

mod coloring;
mod conflict;
mod network;

pub use coloring::{exact_chromatic, greedy_coloring, Coloring, DEFAULT_VERTEX_LIMIT};
pub use conflict::{build_conflict_graph, degree_bound_check, ConflictGraph, DegreeBoundReport};
pub use network::{Link, LinkId, NetworkGraph, NodeId, RoundOutcome};
