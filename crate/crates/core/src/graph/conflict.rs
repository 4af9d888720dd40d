use alloc::vec;
use alloc::vec::Vec;

use super::network::{LinkId, NetworkGraph};

/// Conflict graph of a radio network: one vertex per link, and a directed
/// edge `u -> v` whenever a transmission on `v` fails while `u` transmits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    blocks: Vec<Vec<LinkId>>,
    blocked_by: Vec<Vec<LinkId>>,
    adjacent: Vec<Vec<LinkId>>,
}

/// Builds the conflict graph of `g`.
///
/// Link `u = (a, b)` blocks link `v = (c, d)`, `u != v`, when
/// - `a == c` (one transmitter cannot address two receivers),
/// - `a == d` (the receiver of `v` is busy transmitting), or
/// - `a != c` and `a` is a neighbor of `d` (a second signal reaches `d`).
pub fn build_conflict_graph(g: &NetworkGraph) -> ConflictGraph {
    let m = g.link_count();
    let mut blocked_by = vec![Vec::new(); m];
    for (v, link) in g.links().iter().enumerate() {
        let (c, d) = (link.tail, link.head);
        let mut blockers: Vec<LinkId> = g
            .out_links(c)
            .iter()
            .copied()
            .filter(|&u| u != v)
            .chain(g.out_links(d).iter().copied())
            .collect();
        for w in g.neighbors(d).filter(|&w| w != c) {
            blockers.extend_from_slice(g.out_links(w));
        }
        blockers.sort_unstable();
        blockers.dedup();
        blocked_by[v] = blockers;
    }
    ConflictGraph::from_blocked_by(blocked_by)
}

impl ConflictGraph {
    /// Builds from in-adjacency lists (`blocked_by[v]` = links blocking `v`).
    pub fn from_blocked_by(mut blocked_by: Vec<Vec<LinkId>>) -> Self {
        let m = blocked_by.len();
        let mut blocks = vec![Vec::new(); m];
        let mut adjacent = vec![Vec::new(); m];
        for (v, list) in blocked_by.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            list.retain(|&u| u != v && u < m);
            for &u in list.iter() {
                blocks[u].push(v);
                adjacent[u].push(v);
                adjacent[v].push(u);
            }
        }
        for list in blocks.iter_mut().chain(adjacent.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        ConflictGraph {
            blocks,
            blocked_by,
            adjacent,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn edge_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Links whose transmissions `u` spoils.
    pub fn blocks(&self, u: LinkId) -> &[LinkId] {
        &self.blocks[u]
    }

    /// Links that spoil `v`.
    pub fn blocked_by(&self, v: LinkId) -> &[LinkId] {
        &self.blocked_by[v]
    }

    pub fn has_edge(&self, u: LinkId, v: LinkId) -> bool {
        self.blocks[u].binary_search(&v).is_ok()
    }

    /// Neighbors in the undirected closure of the conflict relation.
    pub fn neighbors(&self, v: LinkId) -> &[LinkId] {
        &self.adjacent[v]
    }

    pub fn is_adjacent(&self, u: LinkId, v: LinkId) -> bool {
        self.adjacent[u].binary_search(&v).is_ok()
    }

    pub fn in_degree(&self, v: LinkId) -> usize {
        self.blocked_by[v].len()
    }

    /// Maximum in-degree (`Delta_in^H`).
    pub fn max_in_degree(&self) -> usize {
        self.blocked_by.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Maximum degree of the undirected conflict relation (`Delta^H`).
    pub fn max_degree(&self) -> usize {
        self.adjacent.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// No two members conflict in either direction.
    pub fn is_independent(&self, set: &[LinkId]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.is_adjacent(u, v)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeBoundReport {
    pub delta_g: usize,
    pub delta_in_h: usize,
    /// `delta_g^2 + delta_g - 1`, or 0 for an edgeless network.
    pub bound: usize,
    pub holds: bool,
}

/// Compares the conflict in-degree against `Delta_G^2 + Delta_G - 1`.
pub fn degree_bound_check(g: &NetworkGraph) -> DegreeBoundReport {
    let delta_g = g.max_degree();
    let delta_in_h = build_conflict_graph(g).max_in_degree();
    let bound = if delta_g == 0 {
        0
    } else {
        delta_g * delta_g + delta_g - 1
    };
    DegreeBoundReport {
        delta_g,
        delta_in_h,
        bound,
        holds: delta_g == 0 || delta_in_h <= bound,
    }
}
