use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{AdversaryConfig, InjectionTrace};
use crate::graph::LinkId;

/// A window `[window_start, window_start + window_len)` where `link`
/// carries more than `rho * window_len + b` injected packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub link: LinkId,
    pub window_start: u64,
    pub window_len: u64,
    pub load: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    pub violation: Option<Violation>,
}

/// Checks every link against every window inside `0..=horizon`.
///
/// A packet loads every distinct link of its route at its injection round.
/// Runs in `O(horizon * links)`: with `f(r) = den * P(r) - num * r`, where
/// `P(r)` counts injections before round `r`, a window `[s, e)` violates the
/// bound iff `f(e) - f(s) > b * den`, so it suffices to track the running
/// minimum of `f`. The reported violation is the one with the earliest end
/// (lowest link id first), starting where `f` was smallest.
pub fn validate_trace(tr: &InjectionTrace, adv: &AdversaryConfig) -> AdmissibilityVerdict {
    let rounds = tr.horizon() as usize + 1;
    let mut per_link: BTreeMap<LinkId, Vec<u32>> = BTreeMap::new();
    for p in tr.packets() {
        for l in p.links() {
            per_link.entry(l).or_insert_with(|| vec![0; rounds])[p.injection_round as usize] += 1;
        }
    }
    let num = *adv.rho().numer();
    let den = *adv.rho().denom();
    let slack = adv.b() as i128 * den;
    let mut first: Option<Violation> = None;
    for (&link, counts) in &per_link {
        let mut prefix: i128 = 0;
        let mut min_f: i128 = 0; // f(0)
        let mut min_at: u64 = 0;
        for (r, &c) in counts.iter().enumerate() {
            prefix += c as i128;
            let end = r as u64 + 1;
            let f = den * prefix - num * end as i128;
            if f - min_f > slack {
                if first.is_none_or(|v| end < v.window_start + v.window_len) {
                    let load: u32 = counts[min_at as usize..end as usize].iter().sum();
                    first = Some(Violation {
                        link,
                        window_start: min_at,
                        window_len: end - min_at,
                        load: load as u64,
                    });
                }
                break;
            }
            if f < min_f {
                min_f = f;
                min_at = end;
            }
        }
    }
    AdmissibilityVerdict {
        admissible: first.is_none(),
        violation: first,
    }
}
