use alloc::vec;
use alloc::vec::Vec;

use super::policy::{policy_select, Policy};
use crate::graph::{LinkId, NetworkGraph};
use crate::schedule::TransmissionSchedule;
use crate::traffic::{InjectionTrace, Packet, PacketId};
use crate::{Error, Result};

/// Backlog slopes below this many packets per round count as stable.
pub const STABILITY_SLOPE_THRESHOLD: f64 = 1e-3;

/// What happened in one round. Link lists are sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoundRecord {
    pub round: u64,
    /// Links the schedule activated.
    pub scheduled: Vec<LinkId>,
    /// Scheduled links that had a packet and therefore transmitted.
    pub transmitting: Vec<LinkId>,
    pub successful: Vec<LinkId>,
    pub collided: Vec<LinkId>,
    /// Links whose queue was nonempty when transmissions started.
    pub backlogged: Vec<LinkId>,
}

/// A delivered packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub packet: PacketId,
    pub injection_round: u64,
    pub delivery_round: u64,
}

impl Delivery {
    pub fn latency(&self) -> u64 {
        self.delivery_round - self.injection_round
    }
}

/// Queue contents and history of a simulation in progress.
#[derive(Debug, Clone)]
pub struct SimState {
    round: u64,
    queues: Vec<Vec<Packet>>,
    delivered: Vec<Delivery>,
    injected: usize,
}

impl SimState {
    pub fn new(link_count: usize) -> Self {
        SimState {
            round: 0,
            queues: vec![Vec::new(); link_count],
            delivered: Vec::new(),
            injected: 0,
        }
    }

    /// The round the next call to [`SimState::step`] executes.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn queue(&self, link: LinkId) -> &[Packet] {
        &self.queues[link]
    }

    pub fn backlog(&self) -> usize {
        self.queues.iter().map(Vec::len).sum()
    }

    pub fn max_queue(&self) -> usize {
        self.queues.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn delivered(&self) -> &[Delivery] {
        &self.delivered
    }

    pub fn injected(&self) -> usize {
        self.injected
    }

    /// Runs one round with `active` as the scheduled link set.
    pub fn step(&mut self, g: &NetworkGraph, trace: &InjectionTrace, active: &[LinkId], policy: Policy) -> RoundRecord {
        let round = self.round;
        for p in trace.injections_at(round) {
            self.queues[p.route[0]].push(p.clone());
            self.injected += 1;
        }

        let backlogged: Vec<LinkId> = (0..self.queues.len()).filter(|&l| !self.queues[l].is_empty()).collect();
        let mut scheduled = active.to_vec();
        scheduled.sort_unstable();
        scheduled.dedup();
        let transmitting: Vec<LinkId> = scheduled
            .iter()
            .copied()
            .filter(|&l| !self.queues[l].is_empty())
            .collect();
        let outcome = g.resolve_round(&transmitting);

        let mut moving = Vec::with_capacity(outcome.successful.len());
        for &link in &outcome.successful {
            let idx = policy_select(&self.queues[link], policy).expect("transmitting link has a packet");
            let mut p = self.queues[link].swap_remove(idx);
            p.hops_done += 1;
            if p.is_delivered() {
                self.delivered.push(Delivery {
                    packet: p.id,
                    injection_round: p.injection_round,
                    delivery_round: round,
                });
            } else {
                moving.push(p);
            }
        }
        for p in moving {
            let next = p.current_link().expect("undelivered packet has a next link");
            self.queues[next].push(p);
        }
        self.round += 1;

        let mut successful = outcome.successful;
        let mut collided = outcome.collided;
        successful.sort_unstable();
        collided.sort_unstable();
        RoundRecord {
            round,
            scheduled,
            transmitting,
            successful,
            collided,
            backlogged,
        }
    }
}

/// Measurements of a complete run.
#[derive(Debug, Clone, Default)]
pub struct RunMetrics {
    pub rounds: u64,
    /// Packets queued at the end of each round.
    pub per_round_backlog: Vec<usize>,
    /// Packets delivered up to and including each round.
    pub delivered_cumulative: Vec<usize>,
    /// Longest single queue at the end of each round.
    pub per_round_max_queue: Vec<usize>,
    pub max_backlog: usize,
    pub max_latency: u64,
    pub delivered: Vec<Delivery>,
    pub injected: usize,
    pub undelivered_count: usize,
    pub log: Vec<RoundRecord>,
}

impl RunMetrics {
    pub fn latencies(&self) -> impl Iterator<Item = u64> + '_ {
        self.delivered.iter().map(Delivery::latency)
    }

    /// Least-squares trend of the backlog over the final half of the run.
    pub fn stability(&self) -> StabilityVerdict {
        let half = self.per_round_backlog.len() / 2;
        let slope = backlog_slope(&self.per_round_backlog[half..]);
        StabilityVerdict {
            slope,
            stable: slope < STABILITY_SLOPE_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub slope: f64,
    pub stable: bool,
}

/// Least-squares slope of `series` against its index; zero for fewer than
/// two points.
pub fn backlog_slope(series: &[usize]) -> f64 {
    let n = series.len();
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let mean_x = (nf - 1.0) / 2.0;
    let mean_y = series.iter().map(|&y| y as f64).sum::<f64>() / nf;
    let (mut num, mut den) = (0.0, 0.0);
    for (i, &y) in series.iter().enumerate() {
        let dx = i as f64 - mean_x;
        num += dx * (y as f64 - mean_y);
        den += dx * dx;
    }
    num / den
}

/// Simulates `rounds` rounds, activating `s.active_at(round)` in each.
pub fn run(
    g: &NetworkGraph,
    s: &TransmissionSchedule,
    pol: Policy,
    tr: &InjectionTrace,
    rounds: u64,
) -> Result<RunMetrics> {
    if s.link_count() != g.link_count() {
        return Err(Error::param(alloc::format!(
            "schedule covers {} links but the network has {}",
            s.link_count(),
            g.link_count()
        )));
    }
    tr.validate_routes(g)?;
    let mut state = SimState::new(g.link_count());
    let mut m = RunMetrics {
        rounds,
        ..RunMetrics::default()
    };
    let cap = usize::try_from(rounds).unwrap_or(0);
    m.per_round_backlog.reserve(cap);
    m.delivered_cumulative.reserve(cap);
    m.per_round_max_queue.reserve(cap);
    m.log.reserve(cap);
    for round in 0..rounds {
        let record = state.step(g, tr, s.active_at(round), pol);
        let backlog = state.backlog();
        m.max_backlog = m.max_backlog.max(backlog);
        m.per_round_backlog.push(backlog);
        m.delivered_cumulative.push(state.delivered.len());
        m.per_round_max_queue.push(state.max_queue());
        m.log.push(record);
    }
    m.injected = state.injected;
    m.undelivered_count = state.backlog();
    m.max_latency = state.delivered.iter().map(Delivery::latency).max().unwrap_or(0);
    m.delivered = state.delivered;
    debug_assert_eq!(m.injected, m.delivered.len() + m.undelivered_count);
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_conflict_graph, greedy_coloring};
    use crate::schedule::{schedule_from_coloring, Provenance};

    fn coloring_schedule(g: &NetworkGraph) -> TransmissionSchedule {
        schedule_from_coloring(&greedy_coloring(&build_conflict_graph(g)))
    }

    #[test]
    fn zero_injection_trace_gives_zero_metrics() {
        let g = NetworkGraph::path(3);
        let m = run(&g, &coloring_schedule(&g), Policy::Lis, &InjectionTrace::empty(50), 50).unwrap();
        assert_eq!(m.max_backlog, 0);
        assert_eq!(m.max_latency, 0);
        assert_eq!(m.undelivered_count, 0);
        assert!(m.per_round_backlog.iter().all(|&b| b == 0));
        assert!(m.log.iter().all(|r| r.transmitting.is_empty()));
    }

    #[test]
    fn packet_crosses_one_link_per_round() {
        // 0 -> 1 -> 2 with both links active every round: the second hop
        // can only happen in the round after the first.
        let g = NetworkGraph::path(3);
        let l01 = g.link_index(0, 1).unwrap();
        let l12 = g.link_index(1, 2).unwrap();
        let s = TransmissionSchedule::new(g.link_count(), vec![vec![l01], vec![l12]], Provenance::Custom).unwrap();
        let tr = InjectionTrace::new(vec![Packet::new(0, 0, vec![l01, l12])], 10).unwrap();
        let m = run(&g, &s, Policy::Lis, &tr, 10).unwrap();
        assert_eq!(m.delivered.len(), 1);
        assert_eq!(m.delivered[0].delivery_round, 1);
        assert_eq!(m.max_latency, 1);
        assert_eq!(m.per_round_backlog[0], 1);
        assert_eq!(m.per_round_backlog[1], 0);
    }

    #[test]
    fn collisions_keep_packets_queued() {
        let g = NetworkGraph::path(3);
        let l01 = g.link_index(0, 1).unwrap();
        let l21 = g.link_index(2, 1).unwrap();
        let s = TransmissionSchedule::new(g.link_count(), vec![vec![l01, l21]], Provenance::Custom).unwrap();
        let tr = InjectionTrace::new(vec![Packet::new(0, 0, vec![l01]), Packet::new(1, 0, vec![l21])], 5).unwrap();
        let m = run(&g, &s, Policy::Lis, &tr, 5).unwrap();
        assert!(m.delivered.is_empty());
        assert_eq!(m.undelivered_count, 2);
        assert_eq!(m.log[0].collided.len(), 2);
    }

    #[test]
    fn slope_of_linear_series() {
        let series: Vec<usize> = (0..100).map(|i| 3 * i + 7).collect();
        assert!((backlog_slope(&series) - 3.0).abs() < 1e-12);
        assert_eq!(backlog_slope(&[4; 50]), 0.0);
        assert_eq!(backlog_slope(&[1]), 0.0);
    }

    #[test]
    fn mismatched_schedule_is_rejected() {
        let g = NetworkGraph::path(3);
        let s = TransmissionSchedule::empty(2, Provenance::Custom);
        assert!(run(&g, &s, Policy::Lis, &InjectionTrace::empty(1), 1).is_err());
    }
}
