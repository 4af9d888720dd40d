use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{InjectionTrace, Packet};
use crate::graph::{build_conflict_graph, LinkId, NetworkGraph, NodeId};
use crate::{Error, Rational, Result};

/// A clique network fed above its coloring threshold.
#[derive(Debug, Clone)]
pub struct CliqueScenario {
    pub graph: NetworkGraph,
    pub trace: InjectionTrace,
    /// Chromatic number of the conflict graph, `n^2 - n`.
    pub chi: u64,
    /// Period of the second injection stream, `ceil(1/epsilon)`.
    pub extra_period: u64,
}

impl CliqueScenario {
    /// Lower bound on the packets still queued once the rounds `0..T` have
    /// transmitted and the round-`T` injections have arrived, for
    /// `T = k * chi`: `(floor(T / extra_period) + 2) * (n^2 - n)`.
    ///
    /// Each link receives `k + 1` packets from the periodic stream and
    /// `floor(T / extra_period) + 1` from the extra stream, while the whole
    /// network delivers at most one packet per round, `k * (n^2 - n)` in
    /// total. The bound is met exactly by any schedule that delivers a
    /// packet in every round.
    pub fn predicted_backlog(&self, k: u64) -> u64 {
        let t = k * self.chi;
        (t / self.extra_period + 2) * self.chi
    }
}

/// Clique on `n` nodes with single-link packets: one per link every
/// `chi = n^2 - n` rounds and one more per link every `ceil(1/epsilon)`
/// rounds, both streams starting at round 0. The trace is
/// `(1/chi + epsilon, 2)`-admissible.
pub fn gen_clique_scenario(n: u32, epsilon: Rational, horizon: u64) -> Result<CliqueScenario> {
    if n < 2 {
        return Err(Error::param(format!("clique scenario needs n >= 2, got {n}")));
    }
    if epsilon <= Rational::from_integer(0) || epsilon > Rational::from_integer(1) {
        return Err(Error::param(format!("epsilon={epsilon} must lie in (0, 1]")));
    }
    let graph = NetworkGraph::clique(n);
    let h = build_conflict_graph(&graph);
    let m = graph.link_count();
    debug_assert!((0..m).all(|u| h.neighbors(u).len() == m - 1));
    let chi = m as u64;
    let extra_period = epsilon.recip().ceil().to_integer() as u64;
    let mut packets = Vec::new();
    for round in 0..=horizon {
        let streams = (round % chi == 0) as usize + (round % extra_period == 0) as usize;
        for _ in 0..streams {
            for link in 0..m {
                packets.push(Packet::new(packets.len() as u64, round, vec![link]));
            }
        }
    }
    Ok(CliqueScenario {
        graph,
        trace: InjectionTrace::new(packets, horizon)?,
        chi,
        extra_period,
    })
}

/// Depth-2 trees used to show that degree bounds alone cannot support rates
/// above order `1/Delta^2`.
#[derive(Debug, Clone)]
pub struct TreeFamily {
    pub delta: u32,
    /// The complete tree first, then the swapped variants in `(i, j)` order.
    pub trees: Vec<NetworkGraph>,
    /// `None` for the complete tree, `Some((i, j))` for a swapped variant.
    pub swaps: Vec<Option<(u32, u32)>>,
    /// Links `x_k -> l_{k,a}`; they have the same id in every tree.
    pub shared_links: Vec<LinkId>,
    pub trace: InjectionTrace,
}

impl TreeFamily {
    pub fn root(&self) -> NodeId {
        0
    }

    pub fn middle(&self, i: u32) -> NodeId {
        i
    }

    pub fn leaf(&self, i: u32, j: u32) -> NodeId {
        leaf_id(self.delta, i, j)
    }

    /// The shared link that ends at the root of tree `index`, if any.
    pub fn root_link(&self, index: usize) -> Option<LinkId> {
        let (i, j) = self.swaps[index]?;
        self.trees[index].link_index(self.middle(i), self.leaf(i, j))
    }
}

fn leaf_id(delta: u32, i: u32, j: u32) -> NodeId {
    delta + (i - 1) * (delta - 1) + j
}

/// Complete `delta`-regular depth-2 tree `T` (root `0`, middle nodes
/// `1..=delta`, leaves `l_{i,j}` for `j in 1..delta`) and every tree
/// `T_{i,j}` obtained by swapping the root with leaf `l_{i,j}`.
///
/// Shared edges come first in every tree, so their link ids agree across
/// the family. The trace injects one single-link packet on every shared
/// `x_k -> l_{k,a}` link every `ceil(1/rho)` rounds from round 0.
pub fn gen_tree_family(delta: u32, rho: Rational, horizon: u64) -> Result<TreeFamily> {
    if delta < 2 {
        return Err(Error::param(format!("tree family needs delta >= 2, got {delta}")));
    }
    if rho <= Rational::from_integer(0) || rho > Rational::from_integer(1) {
        return Err(Error::param(format!("rho={rho} must lie in (0, 1]")));
    }
    let node_count = 1 + delta + delta * (delta - 1);
    let mut shared_edges = Vec::new();
    for k in 1..=delta {
        for a in 1..delta {
            shared_edges.push((k, leaf_id(delta, k, a)));
        }
    }
    let build = |root_edges: Vec<(NodeId, NodeId)>| {
        let mut edges = shared_edges.clone();
        edges.extend(root_edges);
        NetworkGraph::from_edges(node_count, &edges)
    };
    let mut trees = vec![build((1..=delta).map(|k| (k, 0)).collect())?];
    let mut swaps = vec![None];
    for i in 1..=delta {
        for j in 1..delta {
            let new_root = leaf_id(delta, i, j);
            let mut root_edges = vec![(i, 0)];
            root_edges.extend((1..=delta).filter(|&k| k != i).map(|k| (k, new_root)));
            trees.push(build(root_edges)?);
            swaps.push(Some((i, j)));
        }
    }
    let shared_links: Vec<LinkId> = (0..shared_edges.len()).map(|e| 2 * e).collect();
    for tree in &trees {
        for (&l, &(x, leaf)) in shared_links.iter().zip(&shared_edges) {
            debug_assert_eq!(tree.link_index(x, leaf), Some(l));
        }
    }
    let period = rho.recip().ceil().to_integer() as u64;
    let mut packets = Vec::new();
    for round in (0..=horizon).step_by(period as usize) {
        for &l in &shared_links {
            packets.push(Packet::new(packets.len() as u64, round, vec![l]));
        }
    }
    Ok(TreeFamily {
        delta,
        trees,
        swaps,
        shared_links,
        trace: InjectionTrace::new(packets, horizon)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::{validate_trace, AdversaryConfig};

    #[test]
    fn clique_of_three() {
        let s = gen_clique_scenario(3, Rational::new(1, 32), 64).unwrap();
        assert_eq!(s.chi, 6);
        assert_eq!(s.extra_period, 32);
        assert_eq!(s.trace.injections_at(0).len(), 12);
        assert_eq!(s.trace.injections_at(6).len(), 6);
        assert_eq!(s.trace.injections_at(32).len(), 6);
        assert_eq!(s.trace.injections_at(7).len(), 0);
        let adv = AdversaryConfig::new(Rational::new(1, 6) + Rational::new(1, 32), 2).unwrap();
        assert!(validate_trace(&s.trace, &adv).admissible);
    }

    #[test]
    fn tree_family_shape() {
        let fam = gen_tree_family(3, Rational::new(1, 9), 50).unwrap();
        assert_eq!(fam.trees.len(), 7);
        assert_eq!(fam.shared_links.len(), 6);
        for (idx, tree) in fam.trees.iter().enumerate() {
            assert_eq!(tree.node_count(), 10);
            assert_eq!(tree.link_count(), 18);
            assert!(tree.max_degree() <= 3);
            let adv = AdversaryConfig::new(Rational::new(1, 9), 1).unwrap();
            assert!(validate_trace(&fam.trace, &adv).admissible);
            assert!(fam.trace.validate_routes(tree).is_ok());
            match fam.swaps[idx] {
                None => assert_eq!(fam.root_link(idx), None),
                Some((i, j)) => {
                    let l = fam.root_link(idx).unwrap();
                    assert!(fam.shared_links.contains(&l));
                    // the new root is adjacent to every middle node
                    let root = fam.leaf(i, j);
                    assert_eq!(tree.degree(root), 3);
                    assert_eq!(tree.degree(0), 1);
                }
            }
        }
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(gen_clique_scenario(1, Rational::new(1, 2), 10).is_err());
        assert!(gen_tree_family(1, Rational::new(1, 2), 10).is_err());
        assert!(gen_tree_family(3, Rational::from_integer(0), 10).is_err());
    }
}
