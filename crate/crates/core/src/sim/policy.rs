use core::fmt;
use core::str::FromStr;

use crate::traffic::Packet;
use crate::Error;

/// Queueing policy deciding which waiting packet a link forwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    /// Longest in system: earliest injection first.
    Lis,
    /// Shortest in system: latest injection first.
    Sis,
    /// Nearest from source: fewest hops done first.
    Nfs,
    /// Furthest to go: most hops remaining first.
    Ftg,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Lis, Policy::Sis, Policy::Nfs, Policy::Ftg];

    /// Sort key; the smallest key wins. Ties go to the lower packet id.
    fn key(self, p: &Packet) -> (i128, u64) {
        let primary = match self {
            Policy::Lis => p.injection_round as i128,
            Policy::Sis => -(p.injection_round as i128),
            Policy::Nfs => p.hops_done as i128,
            Policy::Ftg => -(p.remaining_hops() as i128),
        };
        (primary, p.id)
    }
}

/// Index of the packet `pol` forwards next, or `None` for an empty queue.
pub fn policy_select(queue: &[Packet], pol: Policy) -> Option<usize> {
    queue.iter().enumerate().min_by_key(|(_, p)| pol.key(p)).map(|(i, _)| i)
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "lis" => Ok(Policy::Lis),
            "sis" => Ok(Policy::Sis),
            "nfs" => Ok(Policy::Nfs),
            "ftg" => Ok(Policy::Ftg),
            other => Err(Error::param(alloc::format!(
                "unknown policy `{other}` (expected lis, sis, nfs or ftg)"
            ))),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Lis => "lis",
            Policy::Sis => "sis",
            Policy::Nfs => "nfs",
            Policy::Ftg => "ftg",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn packet(id: u64, round: u64, route_len: usize, hops: usize) -> Packet {
        let mut p = Packet::new(id, round, (0..route_len).collect());
        p.hops_done = hops;
        p
    }

    #[test]
    fn lis_and_sis_by_injection_round() {
        let q = vec![packet(7, 5, 1, 0), packet(9, 3, 1, 0)];
        assert_eq!(policy_select(&q, Policy::Lis), Some(1));
        assert_eq!(policy_select(&q, Policy::Sis), Some(0));
    }

    #[test]
    fn nfs_and_ftg_by_hops() {
        let q = vec![packet(1, 0, 3, 2), packet(2, 0, 3, 0)];
        assert_eq!(policy_select(&q, Policy::Nfs), Some(1));
        let q = vec![packet(1, 0, 2, 1), packet(2, 0, 5, 1)];
        assert_eq!(policy_select(&q, Policy::Ftg), Some(1));
    }

    #[test]
    fn ties_break_by_packet_id() {
        let q = vec![packet(4, 2, 1, 0), packet(3, 2, 1, 0), packet(8, 2, 1, 0)];
        for pol in Policy::ALL {
            assert_eq!(policy_select(&q, pol), Some(1), "{pol}");
        }
        assert_eq!(policy_select(&[], Policy::Lis), None);
    }

    #[test]
    fn parses_names() {
        assert_eq!("FTG".parse::<Policy>().unwrap(), Policy::Ftg);
        assert!("fifo".parse::<Policy>().is_err());
    }
}
