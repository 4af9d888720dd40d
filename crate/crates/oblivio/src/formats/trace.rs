use oblivio_core::traffic::{InjectionTrace, Packet};

use super::{format_links, LineReader};
use crate::error::Result;

/// Parses `inject <round> <packet_id> <link_0> <link_1> ...` lines. The
/// horizon comes from a `# trace horizon=<h>` comment when present and
/// defaults to the last injection round.
pub fn parse_trace(source: &str, text: &str) -> Result<InjectionTrace> {
    let mut r = LineReader::new(source, text);
    let mut horizon = None;
    let mut packets = Vec::new();
    while let Some(line) = r.next_raw() {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(h) = comment.trim().strip_prefix("trace horizon=") {
                horizon = Some(r.number::<u64>(h.trim(), "a horizon")?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens[0] != "inject" || tokens.len() < 4 {
            return Err(r.error(format!("expected `inject <round> <id> <links...>`, found `{line}`")));
        }
        let round: u64 = r.number(tokens[1], "a round")?;
        let id: u64 = r.number(tokens[2], "a packet id")?;
        let route = tokens[3..]
            .iter()
            .map(|t| r.number(t, "a link index"))
            .collect::<Result<Vec<usize>>>()?;
        packets.push(Packet::new(id, round, route));
    }
    let horizon = horizon.unwrap_or_else(|| packets.last().map_or(0, |p| p.injection_round));
    InjectionTrace::new(packets, horizon).map_err(|e| r.error(e.to_string()))
}

pub fn write_trace(tr: &InjectionTrace) -> String {
    let mut out = format!("# trace horizon={}\n", tr.horizon());
    for p in tr.packets() {
        out.push_str(&format!(
            "inject {} {} {}\n",
            p.injection_round,
            p.id,
            format_links(&p.route)
        ));
    }
    out
}
