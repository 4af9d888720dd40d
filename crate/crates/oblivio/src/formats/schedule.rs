use oblivio_core::schedule::{Frequency, Provenance, TransmissionSchedule};

use super::{format_links, lookup, LineReader};
use crate::error::Result;

pub fn provenance_name(p: Provenance) -> &'static str {
    match p {
        Provenance::Selector => "selector",
        Provenance::Coloring => "coloring",
        Provenance::MaximalIndependent => "maximal-independent",
        Provenance::Custom => "custom",
    }
}

/// Parses `schedule period=<t> links=<m>` followed by exactly `t` round
/// lines of active link indices; a blank line is a silent round. Optional
/// header fields `provenance=`, `rho=` and `window=` restore the schedule's
/// claims.
pub fn parse_schedule(source: &str, text: &str) -> Result<TransmissionSchedule> {
    let mut r = LineReader::new(source, text);
    let line = r.next_content().ok_or_else(|| r.error("empty schedule file"))?;
    let fields = r.header(line, "schedule")?;
    let period: usize = r.number(
        lookup(&fields, "period").ok_or_else(|| r.error("header lacks `period=`"))?,
        "period",
    )?;
    let links: usize = r.number(
        lookup(&fields, "links").ok_or_else(|| r.error("header lacks `links=`"))?,
        "links",
    )?;
    let provenance = match lookup(&fields, "provenance").unwrap_or("custom") {
        "selector" => Provenance::Selector,
        "coloring" => Provenance::Coloring,
        "maximal-independent" => Provenance::MaximalIndependent,
        "custom" => Provenance::Custom,
        other => return Err(r.error(format!("unknown provenance `{other}`"))),
    };
    let frequency = match (lookup(&fields, "rho"), lookup(&fields, "window")) {
        (Some(rho), Some(window)) => Some(Frequency {
            rho: r.rational(rho, "rho")?,
            window: r.number(window, "window")?,
        }),
        (None, None) => None,
        _ => return Err(r.error("`rho=` and `window=` must appear together")),
    };
    let mut active = Vec::with_capacity(period);
    while active.len() < period {
        let line = r
            .next_raw()
            .ok_or_else(|| r.error(format!("header promises {period} rounds")))?;
        if line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|t| r.number(t, "a link index"))
            .collect::<Result<Vec<usize>>>()?;
        active.push(row);
    }
    if let Some(extra) = r.next_content() {
        return Err(r.error(format!("unexpected line after the last round: `{extra}`")));
    }
    let s = TransmissionSchedule::new(links, active, provenance).map_err(|e| r.error(e.to_string()))?;
    Ok(match frequency {
        Some(f) => s.with_claimed_frequency(f),
        None => s,
    })
}

pub fn write_schedule(s: &TransmissionSchedule) -> String {
    let mut out = format!(
        "schedule period={} links={} provenance={}",
        s.period(),
        s.link_count(),
        provenance_name(s.provenance())
    );
    if let Some(f) = s.claimed_frequency() {
        out.push_str(&format!(" rho={}/{} window={}", f.rho.numer(), f.rho.denom(), f.window));
    }
    out.push('\n');
    for row in s.rounds() {
        out.push_str(&format_links(row));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use oblivio_core::graph::{build_conflict_graph, greedy_coloring, NetworkGraph};
    use oblivio_core::schedule::schedule_from_coloring;

    #[test]
    fn round_trip_with_claims() {
        let g = NetworkGraph::random(8, 3, 0.5, 2);
        let s = schedule_from_coloring(&greedy_coloring(&build_conflict_graph(&g)));
        let text = write_schedule(&s);
        let back = parse_schedule("s", &text).unwrap();
        assert_eq!(back.rounds(), s.rounds());
        assert_eq!(back.claimed_frequency(), s.claimed_frequency());
        assert_eq!(back.provenance(), Provenance::Coloring);
    }

    #[test]
    fn blank_lines_are_silent_rounds() {
        let s = parse_schedule("s", "schedule period=3 links=2\n0\n\n1\n").unwrap();
        assert_eq!(s.rounds(), &[vec![0], vec![], vec![1]]);
        assert!(parse_schedule("s", "schedule period=2 links=2\n0\n").is_err());
        assert!(parse_schedule("s", "schedule period=1 links=2\n0\n1\n").is_err());
        assert!(parse_schedule("s", "schedule period=1 links=2\n5\n").is_err());
    }
}
