use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AdversaryConfig, InjectionTrace, Packet};
use crate::graph::{LinkId, NetworkGraph};
use crate::{Error, Result};

/// Probability that a route tries to inject when offered a slot.
pub const DEFAULT_INTENSITY: f64 = 0.5;

/// Random injections gated by one token bucket per link (rate `rho`, depth
/// `b`), so the trace is admissible by construction.
pub fn gen_leaky_bucket(
    g: &NetworkGraph,
    routes: &[Vec<LinkId>],
    adv: &AdversaryConfig,
    horizon: u64,
    seed: u64,
) -> Result<InjectionTrace> {
    gen_leaky_bucket_with(g, routes, adv, horizon, seed, DEFAULT_INTENSITY)
}

/// As [`gen_leaky_bucket`]. Each round offers every route (in random order)
/// up to `b` slots, each taken with probability `intensity`; a taken slot
/// injects iff every link on the route still holds a whole token.
pub fn gen_leaky_bucket_with(
    g: &NetworkGraph,
    routes: &[Vec<LinkId>],
    adv: &AdversaryConfig,
    horizon: u64,
    seed: u64,
    intensity: f64,
) -> Result<InjectionTrace> {
    if let Some(bad) = routes.iter().find(|r| !g.is_route(r)) {
        return Err(Error::InvalidTrace(format!(
            "route {bad:?} is not a path of the network"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Tokens are counted in units of 1/den.
    let refill = *adv.rho().numer();
    let unit = *adv.rho().denom();
    let depth = adv.b() as i128 * unit;
    let route_links: Vec<Vec<LinkId>> = routes
        .iter()
        .map(|r| {
            let mut ls = r.clone();
            ls.sort_unstable();
            ls.dedup();
            ls
        })
        .collect();
    let mut tokens: BTreeMap<LinkId, i128> = route_links.iter().flatten().map(|&l| (l, depth)).collect();
    let mut order: Vec<usize> = (0..routes.len()).collect();
    let mut packets = Vec::new();
    for round in 0..=horizon {
        for t in tokens.values_mut() {
            *t = (*t + refill).min(depth);
        }
        for _ in 0..adv.b() {
            order.shuffle(&mut rng);
            let mut injected = false;
            for &ri in &order {
                if !rng.random_bool(intensity.clamp(0.0, 1.0)) {
                    continue;
                }
                if route_links[ri].iter().all(|l| tokens[l] >= unit) {
                    for l in &route_links[ri] {
                        *tokens.get_mut(l).unwrap() -= unit;
                    }
                    packets.push(Packet::new(packets.len() as u64, round, routes[ri].clone()));
                    injected = true;
                }
            }
            if !injected {
                break;
            }
        }
    }
    InjectionTrace::new(packets, horizon)
}
