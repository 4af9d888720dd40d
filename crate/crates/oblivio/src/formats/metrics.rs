use oblivio_core::sim::RunMetrics;

use crate::error::{CliError, Result};

/// One CSV row per round: `round,total_backlog,delivered_cum,max_queue`.
pub fn write_metrics_csv(m: &RunMetrics) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| CliError::param(format!("cannot encode metrics: {e}"));
    w.write_record(["round", "total_backlog", "delivered_cum", "max_queue"])
        .map_err(to_err)?;
    for (round, ((backlog, delivered), max_queue)) in m
        .per_round_backlog
        .iter()
        .zip(&m.delivered_cumulative)
        .zip(&m.per_round_max_queue)
        .enumerate()
    {
        w.serialize((round, backlog, delivered, max_queue)).map_err(to_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::param(format!("cannot encode metrics: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn join(links: &[usize]) -> String {
    links.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// One line per round: `round=<r> scheduled=<ids> successful=<ids>
/// collided=<ids>`, ids comma-separated.
pub fn write_run_log(m: &RunMetrics) -> String {
    let mut out = String::new();
    for rec in &m.log {
        out.push_str(&format!(
            "round={} scheduled={} successful={} collided={}\n",
            rec.round,
            join(&rec.scheduled),
            join(&rec.successful),
            join(&rec.collided)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use oblivio_core::graph::NetworkGraph;
    use oblivio_core::schedule::{Provenance, TransmissionSchedule};
    use oblivio_core::sim::{run, Policy};
    use oblivio_core::traffic::{InjectionTrace, Packet};

    #[test]
    fn csv_and_log_shapes() {
        let g = NetworkGraph::path(3);
        let s = TransmissionSchedule::new(4, vec![vec![0, 3], vec![2]], Provenance::Custom).unwrap();
        let tr = InjectionTrace::new(vec![Packet::new(0, 0, vec![0, 2]), Packet::new(1, 0, vec![3])], 3).unwrap();
        let m = run(&g, &s, Policy::Lis, &tr, 3).unwrap();
        let csv = write_metrics_csv(&m).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "round,total_backlog,delivered_cum,max_queue");
        assert_eq!(lines.len(), 4);
        // round 0: links 0 and 3 both transmit towards node 1 and collide
        assert_eq!(lines[1], "0,2,0,1");
        let log = write_run_log(&m);
        assert_eq!(
            log.lines().next().unwrap(),
            "round=0 scheduled=0,3 successful= collided=0,3"
        );
    }
}
