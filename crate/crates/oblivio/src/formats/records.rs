use oblivio_core::graph::{Coloring, ConflictGraph, NetworkGraph};

use crate::report::Record;

/// One record per link with its endpoints and the links that block it.
pub fn conflict_records(g: &NetworkGraph, h: &ConflictGraph) -> Vec<Record> {
    (0..h.vertex_count())
        .map(|l| {
            let link = g.link(l);
            Record::new("conflict")
                .field("link", l)
                .field("tail", link.tail)
                .field("head", link.head)
                .field("in_degree", h.in_degree(l))
                .field("degree", h.neighbors(l).len())
                .list("blocked_by", h.blocked_by(l))
        })
        .collect()
}

pub fn coloring_records(g: &NetworkGraph, col: &Coloring) -> Vec<Record> {
    (0..col.link_count())
        .map(|l| {
            let link = g.link(l);
            Record::new("color")
                .field("link", l)
                .field("tail", link.tail)
                .field("head", link.head)
                .field("color", col.color_of(l))
        })
        .collect()
}
