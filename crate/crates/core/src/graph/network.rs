use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub type NodeId = u32;

/// Index of a directed link, assigned in input order.
pub type LinkId = usize;

/// A directed link `tail -> head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Link {
    pub tail: NodeId,
    pub head: NodeId,
}

impl Link {
    pub fn new(tail: NodeId, head: NodeId) -> Self {
        Link { tail, head }
    }

    pub fn reversed(self) -> Self {
        Link::new(self.head, self.tail)
    }
}

/// Which candidate links got through in one round.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundOutcome {
    pub successful: Vec<LinkId>,
    pub collided: Vec<LinkId>,
}

/// A directed symmetric radio network.
///
/// Every link `(i, j)` has its reverse `(j, i)`; there are no self-loops or
/// duplicate links, and every endpoint is a declared node. Links keep the
/// order they were given in, and that order defines their [`LinkId`]s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkGraph {
    nodes: Vec<NodeId>,
    links: Vec<Link>,
    position: BTreeMap<NodeId, usize>,
    index: BTreeMap<(NodeId, NodeId), LinkId>,
    // Indexed by node position.
    out_links: Vec<Vec<LinkId>>,
    neighbors: Vec<Vec<usize>>,
    // Indexed by link id: (tail position, head position).
    endpoints: Vec<(usize, usize)>,
}

impl NetworkGraph {
    pub fn new(nodes: Vec<NodeId>, links: Vec<Link>) -> Result<Self> {
        let mut position = BTreeMap::new();
        for (pos, &id) in nodes.iter().enumerate() {
            if position.insert(id, pos).is_some() {
                return Err(Error::InvalidGraph(format!("node {id} declared twice")));
            }
        }
        let mut index = BTreeMap::new();
        let mut out_links = vec![Vec::new(); nodes.len()];
        let mut endpoints = Vec::with_capacity(links.len());
        for (id, link) in links.iter().enumerate() {
            if link.tail == link.head {
                return Err(Error::InvalidGraph(format!("self-loop at node {}", link.tail)));
            }
            let (Some(&t), Some(&h)) = (position.get(&link.tail), position.get(&link.head)) else {
                return Err(Error::InvalidGraph(format!(
                    "link ({}, {}) uses an undeclared node",
                    link.tail, link.head
                )));
            };
            if index.insert((link.tail, link.head), id).is_some() {
                return Err(Error::InvalidGraph(format!(
                    "duplicate link ({}, {})",
                    link.tail, link.head
                )));
            }
            out_links[t].push(id);
            endpoints.push((t, h));
        }
        for link in &links {
            if !index.contains_key(&(link.head, link.tail)) {
                return Err(Error::InvalidGraph(format!(
                    "link ({}, {}) has no reverse link; radio networks must be symmetric",
                    link.tail, link.head
                )));
            }
        }
        let neighbors = out_links
            .iter()
            .map(|out| out.iter().map(|&l| endpoints[l].1).collect())
            .collect();
        Ok(NetworkGraph {
            nodes,
            links,
            position,
            index,
            out_links,
            neighbors,
            endpoints,
        })
    }

    /// Nodes `0..node_count`; each undirected edge `(a, b)` becomes the links
    /// `(a, b)` and `(b, a)`, in that order.
    pub fn from_edges(node_count: u32, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let links = edges
            .iter()
            .flat_map(|&(a, b)| [Link::new(a, b), Link::new(b, a)])
            .collect();
        NetworkGraph::new((0..node_count).collect(), links)
    }

    pub fn path(node_count: u32) -> Self {
        let edges: Vec<_> = (1..node_count).map(|i| (i - 1, i)).collect();
        NetworkGraph::from_edges(node_count, &edges).expect("path is a valid network")
    }

    pub fn clique(node_count: u32) -> Self {
        let mut edges = Vec::new();
        for a in 0..node_count {
            for b in a + 1..node_count {
                edges.push((a, b));
            }
        }
        NetworkGraph::from_edges(node_count, &edges).expect("clique is a valid network")
    }

    /// Random symmetric network on `node_count` nodes where each pair is
    /// proposed with probability `density` and accepted only while both
    /// endpoints stay below `max_degree`.
    pub fn random(node_count: u32, max_degree: usize, density: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        for a in 0..node_count {
            for b in a + 1..node_count {
                pairs.push((a, b));
            }
        }
        // shuffled so high-numbered nodes are not starved by the degree cap
        pairs.shuffle(&mut rng);
        let mut degree = vec![0usize; node_count as usize];
        let mut edges = Vec::new();
        for (a, b) in pairs {
            if degree[a as usize] < max_degree
                && degree[b as usize] < max_degree
                && rng.random_bool(density.clamp(0.0, 1.0))
            {
                degree[a as usize] += 1;
                degree[b as usize] += 1;
                edges.push((a, b));
            }
        }
        edges.sort_unstable();
        NetworkGraph::from_edges(node_count, &edges).expect("generated network is valid")
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> Link {
        self.links[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn link_index(&self, tail: NodeId, head: NodeId) -> Option<LinkId> {
        self.index.get(&(tail, head)).copied()
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.position.contains_key(&node)
    }

    /// Outgoing links of `node`, in link-index order.
    pub fn out_links(&self, node: NodeId) -> &[LinkId] {
        match self.position.get(&node) {
            Some(&p) => &self.out_links[p],
            None => &[],
        }
    }

    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out_links(node).iter().map(|&l| self.links[l].head)
    }

    pub fn are_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.index.contains_key(&(a, b))
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.out_links(node).len()
    }

    /// Maximum in-degree, equal to the maximum out-degree by symmetry.
    pub fn max_degree(&self) -> usize {
        self.out_links.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Whether `route` is a nonempty sequence of valid links where each link
    /// starts at the head of the previous one.
    pub fn is_route(&self, route: &[LinkId]) -> bool {
        !route.is_empty()
            && route.iter().all(|&l| l < self.links.len())
            && route.windows(2).all(|w| self.links[w[0]].head == self.links[w[1]].tail)
    }

    /// All routes with at most `max_len` links that never revisit a node,
    /// ordered by length and then lexicographically by link ids.
    pub fn simple_routes(&self, max_len: usize) -> Vec<Vec<LinkId>> {
        let mut out = Vec::new();
        let mut frontier: Vec<Vec<LinkId>> = (0..self.links.len()).map(|l| vec![l]).collect();
        for _ in 0..max_len {
            let mut next = Vec::new();
            for route in &frontier {
                let visited: BTreeSet<NodeId> = route
                    .iter()
                    .map(|&l| self.links[l].tail)
                    .chain(core::iter::once(self.links[*route.last().unwrap()].head))
                    .collect();
                let end = self.links[*route.last().unwrap()].head;
                for &l in self.out_links(end) {
                    if !visited.contains(&self.links[l].head) {
                        let mut r = route.clone();
                        r.push(l);
                        next.push(r);
                    }
                }
            }
            out.append(&mut frontier);
            frontier = next;
        }
        out
    }

    /// Applies the radio reception rule to one round.
    ///
    /// `candidates` are the links that actually transmit (scheduled and with a
    /// packet to send). A node transmits if it is the tail of at least one
    /// candidate. Candidate `(u, v)` succeeds iff `u` is the tail of exactly
    /// one candidate, `v` does not transmit, and `u` is the only transmitting
    /// neighbor of `v`. Both output lists are sorted.
    pub fn resolve_round(&self, candidates: &[LinkId]) -> RoundOutcome {
        let mut sending = vec![0u32; self.nodes.len()];
        for &l in candidates {
            sending[self.endpoints[l].0] += 1;
        }
        let mut heard = vec![0u32; self.nodes.len()];
        for (node, &count) in sending.iter().enumerate() {
            if count > 0 {
                for &nb in &self.neighbors[node] {
                    heard[nb] += 1;
                }
            }
        }
        let mut outcome = RoundOutcome::default();
        let mut sorted: Vec<LinkId> = candidates.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for l in sorted {
            let (t, h) = self.endpoints[l];
            if sending[t] == 1 && sending[h] == 0 && heard[h] == 1 {
                outcome.successful.push(l);
            } else {
                outcome.collided.push(l);
            }
        }
        outcome
    }
}
