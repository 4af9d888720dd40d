use alloc::vec;
use alloc::vec::Vec;

use super::conflict::ConflictGraph;
use super::network::LinkId;
use crate::{Error, Result};

/// Largest conflict graph [`exact_chromatic`] accepts by default.
pub const DEFAULT_VERTEX_LIMIT: usize = 24;

/// Assignment of a color in `0..color_count` to every link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    color_of: Vec<usize>,
    color_count: usize,
}

impl Coloring {
    pub fn new(color_of: Vec<usize>) -> Self {
        let color_count = color_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        Coloring { color_of, color_count }
    }

    pub fn color_of(&self, link: LinkId) -> usize {
        self.color_of[link]
    }

    pub fn colors(&self) -> &[usize] {
        &self.color_of
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    pub fn link_count(&self) -> usize {
        self.color_of.len()
    }

    /// Links of each color, in link order.
    pub fn classes(&self) -> Vec<Vec<LinkId>> {
        let mut classes = vec![Vec::new(); self.color_count];
        for (link, &c) in self.color_of.iter().enumerate() {
            classes[c].push(link);
        }
        classes
    }

    /// Proper for the undirected closure of the conflict relation.
    pub fn is_proper(&self, h: &ConflictGraph) -> bool {
        self.color_of.len() == h.vertex_count()
            && (0..h.vertex_count()).all(|u| h.neighbors(u).iter().all(|&v| self.color_of[u] != self.color_of[v]))
    }
}

/// Smallest-available-color greedy coloring in link-index order.
pub fn greedy_coloring(h: &ConflictGraph) -> Coloring {
    let n = h.vertex_count();
    let mut color_of = vec![usize::MAX; n];
    let mut taken = Vec::new();
    for v in 0..n {
        taken.clear();
        taken.resize(h.neighbors(v).len() + 1, false);
        for &u in h.neighbors(v) {
            let c = color_of[u];
            if c < taken.len() {
                taken[c] = true;
            }
        }
        color_of[v] = taken.iter().position(|&t| !t).unwrap();
    }
    Coloring::new(color_of)
}

/// Minimum coloring by DSatur branch and bound.
///
/// Refuses conflict graphs with more than `vertex_limit` vertices.
pub fn exact_chromatic(h: &ConflictGraph, vertex_limit: usize) -> Result<Coloring> {
    let n = h.vertex_count();
    if n > vertex_limit {
        return Err(Error::Size {
            what: "exact coloring",
            required: n as u128,
            limit: vertex_limit as u128,
            hint: "use the greedy coloring for conflict graphs this large",
        });
    }
    if n == 0 {
        return Ok(Coloring::new(Vec::new()));
    }
    let greedy = greedy_coloring(h);
    let dsatur = dsatur_coloring(h);
    let mut search = Search {
        h,
        best: if dsatur.color_count() < greedy.color_count() {
            dsatur
        } else {
            greedy
        },
        lower: greedy_clique_size(h),
        color_of: vec![usize::MAX; n],
        // neighbor_colors[v][c] = number of colored neighbors of v with color c
        neighbor_colors: vec![vec![0u32; n]; n],
    };
    if search.best.color_count() > search.lower {
        search.branch(0, 0);
    }
    debug_assert!(search.best.is_proper(h));
    Ok(search.best)
}

struct Search<'a> {
    h: &'a ConflictGraph,
    best: Coloring,
    lower: usize,
    color_of: Vec<usize>,
    neighbor_colors: Vec<Vec<u32>>,
}

impl Search<'_> {
    fn saturation(&self, v: usize, used: usize) -> usize {
        self.neighbor_colors[v][..used].iter().filter(|&&c| c > 0).count()
    }

    /// Returns true once the lower bound is met and the search can stop.
    fn branch(&mut self, colored: usize, used: usize) -> bool {
        let n = self.color_of.len();
        if colored == n {
            if used < self.best.color_count() {
                self.best = Coloring::new(self.color_of.clone());
            }
            return self.best.color_count() <= self.lower;
        }
        let v = (0..n)
            .filter(|&v| self.color_of[v] == usize::MAX)
            .max_by_key(|&v| {
                let free_degree = self
                    .h
                    .neighbors(v)
                    .iter()
                    .filter(|&&u| self.color_of[u] == usize::MAX)
                    .count();
                (self.saturation(v, used), free_degree, core::cmp::Reverse(v))
            })
            .unwrap();
        for c in 0..=used {
            let next_used = used.max(c + 1);
            if next_used >= self.best.color_count() {
                break;
            }
            if self.neighbor_colors[v][c] > 0 {
                continue;
            }
            self.assign(v, c);
            let done = self.branch(colored + 1, next_used);
            self.unassign(v, c);
            if done {
                return true;
            }
        }
        false
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.color_of[v] = c;
        for &u in self.h.neighbors(v) {
            self.neighbor_colors[u][c] += 1;
        }
    }

    fn unassign(&mut self, v: usize, c: usize) {
        self.color_of[v] = usize::MAX;
        for &u in self.h.neighbors(v) {
            self.neighbor_colors[u][c] -= 1;
        }
    }
}

fn dsatur_coloring(h: &ConflictGraph) -> Coloring {
    let n = h.vertex_count();
    let mut color_of = vec![usize::MAX; n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color_of[v] == usize::MAX)
            .max_by_key(|&v| {
                let mut seen: Vec<usize> = h
                    .neighbors(v)
                    .iter()
                    .map(|&u| color_of[u])
                    .filter(|&c| c != usize::MAX)
                    .collect();
                seen.sort_unstable();
                seen.dedup();
                (seen.len(), h.neighbors(v).len(), core::cmp::Reverse(v))
            })
            .unwrap();
        let mut c = 0;
        while h.neighbors(v).iter().any(|&u| color_of[u] == c) {
            c += 1;
        }
        color_of[v] = c;
    }
    Coloring::new(color_of)
}

/// Size of a clique found greedily by decreasing degree; a lower bound on
/// the chromatic number.
fn greedy_clique_size(h: &ConflictGraph) -> usize {
    let n = h.vertex_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (core::cmp::Reverse(h.neighbors(v).len()), v));
    let mut best = 0;
    for &start in &order {
        let mut clique = vec![start];
        for &v in &order {
            if v != start && clique.iter().all(|&u| h.is_adjacent(u, v)) {
                clique.push(v);
            }
        }
        best = best.max(clique.len());
    }
    best
}
