//! Packets, `(rho, b)`-adversaries and injection traces.

mod admissibility;
mod generators;
mod scenarios;

pub use admissibility::{validate_trace, AdmissibilityVerdict, Violation};
pub use generators::{gen_leaky_bucket, gen_leaky_bucket_with, DEFAULT_INTENSITY};
pub use scenarios::{gen_clique_scenario, gen_tree_family, CliqueScenario, TreeFamily};

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::graph::{LinkId, NetworkGraph};
use crate::{Error, Rational, Result};

pub type PacketId = u64;

/// A packet and its fixed route.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub id: PacketId,
    pub injection_round: u64,
    pub route: Vec<LinkId>,
    /// Links already crossed.
    pub hops_done: usize,
}

impl Packet {
    pub fn new(id: PacketId, injection_round: u64, route: Vec<LinkId>) -> Self {
        assert!(!route.is_empty(), "packet {id} has an empty route");
        Packet {
            id,
            injection_round,
            route,
            hops_done: 0,
        }
    }

    /// The link the packet waits on, or `None` once delivered.
    pub fn current_link(&self) -> Option<LinkId> {
        self.route.get(self.hops_done).copied()
    }

    pub fn remaining_hops(&self) -> usize {
        self.route.len() - self.hops_done
    }

    pub fn is_delivered(&self) -> bool {
        self.hops_done >= self.route.len()
    }

    /// Distinct links on the route.
    pub fn links(&self) -> BTreeSet<LinkId> {
        self.route.iter().copied().collect()
    }
}

/// A `(rho, b)`-adversary: any window of `T` rounds puts at most
/// `rho * T + b` injected packets on every link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdversaryConfig {
    rho: Rational,
    b: u64,
}

impl AdversaryConfig {
    pub fn new(rho: Rational, b: u64) -> Result<Self> {
        if rho < Rational::from_integer(0) || rho > Rational::from_integer(1) {
            return Err(Error::param(format!("rho={rho} must lie in [0, 1]")));
        }
        if b < 1 {
            return Err(Error::param("burst b must be at least 1"));
        }
        Ok(AdversaryConfig { rho, b })
    }

    pub fn rho(&self) -> Rational {
        self.rho
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// `rho * window + b`.
    pub fn allowance(&self, window: u64) -> Rational {
        self.rho * Rational::from_integer(window as i128) + Rational::from_integer(self.b as i128)
    }
}

/// Injections sorted by round, covering rounds `0..=horizon`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectionTrace {
    packets: Vec<Packet>,
    horizon: u64,
}

impl InjectionTrace {
    pub fn new(packets: Vec<Packet>, horizon: u64) -> Result<Self> {
        let mut ids = BTreeSet::new();
        let mut last = 0;
        for p in &packets {
            if p.injection_round < last {
                return Err(Error::InvalidTrace(format!(
                    "packet {} injected at round {} after round {last}",
                    p.id, p.injection_round
                )));
            }
            last = p.injection_round;
            if p.injection_round > horizon {
                return Err(Error::InvalidTrace(format!(
                    "packet {} injected at round {} beyond horizon {horizon}",
                    p.id, p.injection_round
                )));
            }
            if !ids.insert(p.id) {
                return Err(Error::InvalidTrace(format!("packet id {} repeats", p.id)));
            }
            if p.route.is_empty() || p.hops_done != 0 {
                return Err(Error::InvalidTrace(format!(
                    "packet {} must have a nonempty route and no hops done",
                    p.id
                )));
            }
        }
        Ok(InjectionTrace { packets, horizon })
    }

    pub fn empty(horizon: u64) -> Self {
        InjectionTrace {
            packets: Vec::new(),
            horizon,
        }
    }

    pub fn packets(&self) -> &[Packet] {
        &self.packets
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }

    /// Packets injected in `round`.
    pub fn injections_at(&self, round: u64) -> &[Packet] {
        let lo = self.packets.partition_point(|p| p.injection_round < round);
        let hi = self.packets.partition_point(|p| p.injection_round <= round);
        &self.packets[lo..hi]
    }

    /// Packets injected in rounds `0..=round`.
    pub fn injected_through(&self, round: u64) -> usize {
        self.packets.partition_point(|p| p.injection_round <= round)
    }

    /// Checks every route is a connected path of `g`.
    pub fn validate_routes(&self, g: &NetworkGraph) -> Result<()> {
        match self.packets.iter().find(|p| !g.is_route(&p.route)) {
            Some(p) => Err(Error::InvalidTrace(format!(
                "packet {} has route {:?}, which is not a path of the network",
                p.id, p.route
            ))),
            None => Ok(()),
        }
    }

    /// Largest route length `L`.
    pub fn max_route_len(&self) -> usize {
        self.packets.iter().map(|p| p.route.len()).max().unwrap_or(0)
    }
}
