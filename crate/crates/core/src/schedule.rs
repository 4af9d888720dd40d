//! Cyclic per-link transmission schedules.
//!
//! Round `r` of a schedule with period `t` activates the links listed in
//! row `r mod t`. A scheduled link with an empty queue stays silent.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::graph::{build_conflict_graph, Coloring, ConflictGraph, LinkId, NetworkGraph};
use crate::selector::SelectorMatrix;
use crate::{Error, Rational, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Selector,
    Coloring,
    /// Coloring whose classes were grown to maximal independent sets.
    MaximalIndependent,
    Custom,
}

/// A `(rho, window)` frequency: every backlogged link gets at least
/// `rho * window` successful transmissions in any `window` consecutive rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frequency {
    pub rho: Rational,
    pub window: usize,
}

impl Frequency {
    /// `rho * window`, the guaranteed successes per window.
    pub fn required_successes(&self) -> Rational {
        self.rho * Rational::from_integer(self.window as i128)
    }
}

/// Upper bounds a node may know without seeing the topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalBounds {
    pub max_links: usize,
    /// Bound on the conflict-graph in-degree.
    pub max_conflict_in_degree: usize,
}

impl LocalBounds {
    /// Derives the conflict in-degree bound `d^2 + d - 1` from a bound `d`
    /// on the network degree.
    pub fn from_network_degree(max_links: usize, max_degree: usize) -> Self {
        LocalBounds {
            max_links,
            max_conflict_in_degree: if max_degree == 0 {
                0
            } else {
                max_degree * max_degree + max_degree - 1
            },
        }
    }
}

/// A local bound the actual network exceeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundWarning {
    TooManyLinks { bound: usize, actual: usize },
    ConflictDegreeExceeded { bound: usize, actual: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionSchedule {
    link_count: usize,
    active: Vec<Vec<LinkId>>,
    provenance: Provenance,
    claimed_frequency: Option<Frequency>,
    local_bounds: Option<LocalBounds>,
}

impl TransmissionSchedule {
    pub fn new(link_count: usize, mut active: Vec<Vec<LinkId>>, provenance: Provenance) -> Result<Self> {
        for (r, row) in active.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            if let Some(&bad) = row.iter().find(|&&l| l >= link_count) {
                return Err(Error::param(format!(
                    "round {r} schedules link {bad}, but there are only {link_count} links"
                )));
            }
        }
        Ok(TransmissionSchedule {
            link_count,
            active,
            provenance,
            claimed_frequency: None,
            local_bounds: None,
        })
    }

    pub fn empty(link_count: usize, provenance: Provenance) -> Self {
        TransmissionSchedule {
            link_count,
            active: Vec::new(),
            provenance,
            claimed_frequency: None,
            local_bounds: None,
        }
    }

    pub fn with_claimed_frequency(mut self, freq: Frequency) -> Self {
        self.claimed_frequency = Some(freq);
        self
    }

    pub fn period(&self) -> usize {
        self.active.len()
    }

    pub fn link_count(&self) -> usize {
        self.link_count
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn claimed_frequency(&self) -> Option<Frequency> {
        self.claimed_frequency
    }

    pub fn local_bounds(&self) -> Option<LocalBounds> {
        self.local_bounds
    }

    pub fn rounds(&self) -> &[Vec<LinkId>] {
        &self.active
    }

    /// Links scheduled in `round` (cyclically).
    pub fn active_at(&self, round: u64) -> &[LinkId] {
        if self.active.is_empty() {
            &[]
        } else {
            &self.active[(round % self.active.len() as u64) as usize]
        }
    }

    /// The same calendar started `offset` rounds later.
    pub fn rotated(&self, offset: usize) -> Self {
        let mut out = self.clone();
        if !out.active.is_empty() {
            let k = offset % out.active.len();
            out.active.rotate_left(k);
        }
        out
    }

    /// Number of rounds per period in which `link` is scheduled.
    pub fn slots_of(&self, link: LinkId) -> usize {
        self.active
            .iter()
            .filter(|row| row.binary_search(&link).is_ok())
            .count()
    }
}

/// Schedule where link `z` transmits in round `i` iff `M[i mod t][z] = 1`.
///
/// The selector's claimed `k` must exceed the conflict in-degree of `g`.
pub fn schedule_from_selector(sel: &SelectorMatrix, g: &NetworkGraph) -> Result<TransmissionSchedule> {
    let m = g.link_count();
    if m == 0 {
        return Ok(TransmissionSchedule::empty(0, Provenance::Selector));
    }
    let delta_in = build_conflict_graph(g).max_in_degree();
    let bounds = LocalBounds {
        max_links: m,
        max_conflict_in_degree: delta_in,
    };
    let mut s = schedule_from_selector_local(sel, bounds, m)?;
    s.local_bounds = None;
    Ok(s)
}

/// Selector schedule built only from upper bounds on the link count and the
/// conflict in-degree. The bounds are trusted and recorded; use
/// [`check_local_bounds`] to compare them with a concrete network.
pub fn schedule_from_selector_local(
    sel: &SelectorMatrix,
    bounds: LocalBounds,
    link_count: usize,
) -> Result<TransmissionSchedule> {
    let (Some(k), Some(eps)) = (sel.claimed_k(), sel.claimed_eps()) else {
        return Err(Error::param(
            "selector carries no verified (k, eps); verify it before scheduling",
        ));
    };
    let needed_columns = bounds.max_links.max(link_count);
    if sel.n() < needed_columns {
        return Err(Error::param(format!(
            "selector has n={} columns but the network needs {needed_columns} (one per link)",
            sel.n()
        )));
    }
    if k < bounds.max_conflict_in_degree + 1 {
        return Err(Error::param(format!(
            "selector k={k} is below conflict in-degree + 1 = {}",
            bounds.max_conflict_in_degree + 1
        )));
    }
    let active = sel
        .rows()
        .iter()
        .map(|row| (0..link_count).filter(|&z| row.get(z)).collect())
        .collect();
    let mut s = TransmissionSchedule::new(link_count, active, Provenance::Selector)?;
    s.claimed_frequency = Some(Frequency {
        rho: eps / Rational::from_integer(k as i128),
        window: sel.t(),
    });
    s.local_bounds = Some(bounds);
    Ok(s)
}

pub fn check_local_bounds(bounds: LocalBounds, g: &NetworkGraph) -> Vec<BoundWarning> {
    let mut out = Vec::new();
    if g.link_count() > bounds.max_links {
        out.push(BoundWarning::TooManyLinks {
            bound: bounds.max_links,
            actual: g.link_count(),
        });
    }
    let actual = build_conflict_graph(g).max_in_degree();
    if actual > bounds.max_conflict_in_degree {
        out.push(BoundWarning::ConflictDegreeExceeded {
            bound: bounds.max_conflict_in_degree,
            actual,
        });
    }
    out
}

/// Round `r` activates the links of color `r`; a proper `x`-coloring is a
/// `(1/x, x)`-frequent schedule.
pub fn schedule_from_coloring(col: &Coloring) -> TransmissionSchedule {
    let x = col.color_count();
    let s = TransmissionSchedule::new(col.link_count(), col.classes(), Provenance::Coloring)
        .expect("coloring classes are valid link ids");
    if x == 0 {
        return s;
    }
    s.with_claimed_frequency(Frequency {
        rho: Rational::new(1, x as i128),
        window: x,
    })
}

/// Grows every color class greedily (in link order) into a maximal
/// independent set of the conflict relation. The period is unchanged and no
/// link loses a slot.
pub fn extend_to_maximal_independent(col: &Coloring, h: &ConflictGraph) -> TransmissionSchedule {
    let base = schedule_from_coloring(col);
    let active = col
        .classes()
        .into_iter()
        .map(|mut class| {
            for v in 0..h.vertex_count() {
                if class.binary_search(&v).is_err() && h.neighbors(v).iter().all(|u| class.binary_search(u).is_err()) {
                    let pos = class.binary_search(&v).unwrap_err();
                    class.insert(pos, v);
                }
            }
            class
        })
        .collect();
    let mut s = TransmissionSchedule::new(col.link_count(), active, Provenance::MaximalIndependent)
        .expect("classes are valid link ids");
    s.claimed_frequency = base.claimed_frequency;
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyReport {
    pub frequency: Frequency,
    pub rounds_simulated: usize,
    /// Per link, the fewest successes seen in any window.
    pub per_link_min_successes: Vec<usize>,
    /// Link and window start of the overall minimum.
    pub worst: Option<(LinkId, usize)>,
    pub satisfied: bool,
}

/// Checks the schedule's claimed frequency under full backlog; see
/// [`verify_frequency`]. Schedules without a claim are measured against
/// `(0, period)`.
pub fn verify_frequent(s: &TransmissionSchedule, g: &NetworkGraph, windows: usize) -> Result<FrequencyReport> {
    let freq = s.claimed_frequency().unwrap_or(Frequency {
        rho: Rational::zero(),
        window: s.period(),
    });
    verify_frequency(s, g, freq, windows)
}

/// Runs `windows * freq.window` rounds with every queue permanently
/// nonempty, counts each link's successes in every sliding window of length
/// `freq.window`, and compares the minimum with `rho * window`.
pub fn verify_frequency(
    s: &TransmissionSchedule,
    g: &NetworkGraph,
    freq: Frequency,
    windows: usize,
) -> Result<FrequencyReport> {
    if s.link_count() != g.link_count() {
        return Err(Error::param(format!(
            "schedule targets {} links but the network has {}",
            s.link_count(),
            g.link_count()
        )));
    }
    let m = g.link_count();
    let window = freq.window;
    let rounds = windows * window;
    if m == 0 || window == 0 || windows == 0 {
        return Ok(FrequencyReport {
            frequency: freq,
            rounds_simulated: 0,
            per_link_min_successes: vec![0; m],
            worst: None,
            satisfied: m == 0 || freq.rho.is_zero(),
        });
    }
    // prefix[l][r] = successes of link l in rounds [0, r)
    let mut prefix = vec![vec![0u32; rounds + 1]; m];
    for r in 0..rounds {
        let outcome = g.resolve_round(s.active_at(r as u64));
        for p in prefix.iter_mut() {
            p[r + 1] = p[r];
        }
        for l in outcome.successful {
            prefix[l][r + 1] += 1;
        }
    }
    let mut per_link = vec![usize::MAX; m];
    let mut worst: Option<(LinkId, usize)> = None;
    let mut worst_count = usize::MAX;
    for (l, p) in prefix.iter().enumerate() {
        for start in 0..=rounds - window {
            let count = (p[start + window] - p[start]) as usize;
            if count < per_link[l] {
                per_link[l] = count;
            }
            if count < worst_count {
                worst_count = count;
                worst = Some((l, start));
            }
        }
    }
    let required = freq.required_successes();
    let satisfied = per_link.iter().all(|&c| Rational::from_integer(c as i128) >= required);
    Ok(FrequencyReport {
        frequency: freq,
        rounds_simulated: rounds,
        per_link_min_successes: per_link,
        worst,
        satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{exact_chromatic, greedy_coloring, DEFAULT_VERTEX_LIMIT};
    use crate::selector::{poly_uss, uss_min_count};

    fn identity_selector(n: usize, k: usize) -> SelectorMatrix {
        let m = SelectorMatrix::identity(n).unwrap();
        let eps = uss_min_count(&m, k).unwrap().eps;
        m.with_claims(k, eps)
    }

    #[test]
    fn identity_selector_on_two_nodes() {
        let g = NetworkGraph::from_edges(2, &[(0, 1)]).unwrap();
        let s = schedule_from_selector(&identity_selector(2, 2), &g).unwrap();
        assert_eq!(s.rounds(), &[vec![0], vec![1]]);
        let f = s.claimed_frequency().unwrap();
        assert_eq!((f.rho, f.window), (Rational::new(1, 2), 2));
        assert!(verify_frequent(&s, &g, 5).unwrap().satisfied);
    }

    #[test]
    fn selector_preconditions() {
        let g = NetworkGraph::path(3);
        // k = 2 < in-degree 3 + 1
        assert!(schedule_from_selector(&identity_selector(4, 2), &g).is_err());
        // too few columns
        assert!(schedule_from_selector(&identity_selector(3, 3), &g).is_err());
        // unverified
        assert!(schedule_from_selector(&SelectorMatrix::identity(4).unwrap(), &g).is_err());
        assert!(schedule_from_selector(&identity_selector(4, 4), &g).is_ok());
    }

    #[test]
    fn zero_link_network_gets_empty_schedule() {
        let g = NetworkGraph::new(vec![0, 1], vec![]).unwrap();
        let s = schedule_from_selector(&identity_selector(3, 2), &g).unwrap();
        assert_eq!(s.period(), 0);
        assert!(verify_frequent(&s, &g, 3).unwrap().satisfied);
        let empty = schedule_from_coloring(&Coloring::new(Vec::new()));
        assert_eq!(empty.period(), 0);
        assert!(empty.claimed_frequency().is_none());
    }

    #[test]
    fn poly_selector_claims() {
        let sel = poly_uss(16, 4, 2).unwrap();
        let bounds = LocalBounds {
            max_links: 16,
            max_conflict_in_degree: 3,
        };
        let s = schedule_from_selector_local(&sel, bounds, 16).unwrap();
        let f = s.claimed_frequency().unwrap();
        assert_eq!(f.rho, Rational::new(36, 289) / 4);
        assert_eq!(f.window, 289);
    }

    #[test]
    fn coloring_schedule_on_path() {
        let g = NetworkGraph::path(3);
        let h = build_conflict_graph(&g);
        let col = exact_chromatic(&h, DEFAULT_VERTEX_LIMIT).unwrap();
        let s = schedule_from_coloring(&col);
        assert_eq!(s.period(), 4);
        assert!((0..4).all(|l| s.slots_of(l) == 1));
        let report = verify_frequent(&s, &g, 6).unwrap();
        assert!(report.satisfied);
        assert_eq!(report.per_link_min_successes, vec![1; 4]);
    }

    #[test]
    fn permanent_collision_refutes_any_positive_rate() {
        let g = NetworkGraph::from_edges(2, &[(0, 1)]).unwrap();
        let s = TransmissionSchedule::new(2, vec![vec![0, 1]], Provenance::Custom)
            .unwrap()
            .with_claimed_frequency(Frequency {
                rho: Rational::new(1, 100),
                window: 100,
            });
        let report = verify_frequent(&s, &g, 2).unwrap();
        assert!(!report.satisfied);
        assert_eq!(report.per_link_min_successes, vec![0, 0]);
    }

    #[test]
    fn maximal_extension_is_fixed_point_on_maximal_classes() {
        let h = build_conflict_graph(&NetworkGraph::path(3));
        let col = greedy_coloring(&h);
        let base = schedule_from_coloring(&col);
        let ext = extend_to_maximal_independent(&col, &h);
        assert_eq!(base.rounds(), ext.rounds());
    }

    #[test]
    fn maximal_extension_adds_slots_on_four_node_path() {
        // a-b-c-d: (b,a) and (c,d) do not conflict, nor do (a,b) and (d,c).
        let g = NetworkGraph::path(4);
        let h = build_conflict_graph(&g);
        assert!(!h.is_adjacent(1, 4));
        assert!(!h.is_adjacent(0, 5));
        let singletons = Coloring::new((0..g.link_count()).collect());
        let ext = extend_to_maximal_independent(&singletons, &h);
        assert_eq!(ext.period(), 6);
        for row in ext.rounds() {
            assert!(h.is_independent(row));
            // maximal: nothing else fits
            for v in 0..6 {
                if !row.contains(&v) {
                    assert!(row.iter().any(|&u| h.is_adjacent(u, v)));
                }
            }
        }
        assert!(ext.slots_of(1) > 1 && ext.slots_of(4) > 1);
        assert!(ext.slots_of(2) == 1 && ext.slots_of(3) == 1);
    }

    #[test]
    fn rotation_keeps_frequency() {
        let g = NetworkGraph::random(8, 3, 0.5, 4);
        let h = build_conflict_graph(&g);
        let s = schedule_from_coloring(&greedy_coloring(&h));
        for offset in 0..s.period() {
            assert!(verify_frequent(&s.rotated(offset), &g, 4).unwrap().satisfied);
        }
    }
}
