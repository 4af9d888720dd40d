//! The end-to-end pipeline, with every intermediate artifact written to disk.
//!
//! Layout of the output directory:
//!
//! ```text
//! conflict_graph.csv   one row per link
//! coloring.csv         coloring method only
//! selector.txt         selector methods only
//! schedule.txt
//! trace.txt            per run
//! metrics.csv          per run
//! run.log              per run
//! summary.json         per run
//! ```
//!
//! With `--sweep`, the per-run files go to `rho-<p>_<q>-<policy>/`.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use oblivio_core::bounds::{coloring_threshold, uss_threshold, LatencyBound, StabilityBound, UssForm};
use oblivio_core::graph::{build_conflict_graph, ConflictGraph, NetworkGraph, DEFAULT_VERTEX_LIMIT};
use oblivio_core::schedule::{
    check_local_bounds, schedule_from_coloring, schedule_from_selector, schedule_from_selector_local, verify_frequent,
    LocalBounds, TransmissionSchedule,
};
use oblivio_core::selector::{random_uss, SelectorMatrix, DEFAULT_MAX_RETRIES};
use oblivio_core::sim::{run, Policy};
use oblivio_core::traffic::{gen_leaky_bucket_with, validate_trace, AdversaryConfig, InjectionTrace};
use oblivio_core::Rational;

use crate::cli::{ColorMethod, ExperimentArgs, ExperimentMethod};
use crate::commands::{cell_dir, color_graph, default_selector, load_graph, load_trace, local_bounds, warning_text};
use crate::error::{CliError, Result};
use crate::formats::{
    coloring_records, conflict_records, provenance_name, write_file, write_metrics_csv, write_run_log, write_schedule,
    write_selector, write_trace,
};
use crate::report::{render, OutputFormat, Record};

/// Everything shared by the runs of one invocation.
struct Prepared {
    graph: NetworkGraph,
    schedule: TransmissionSchedule,
    /// Primary threshold for the method, then any secondary ones.
    thresholds: Vec<StabilityBound>,
    colors: Option<(usize, bool)>,
    frequency_verified: bool,
    warnings: Vec<String>,
}

fn method_name(m: ExperimentMethod) -> &'static str {
    match m {
        ExperimentMethod::UssPoly => "uss-poly",
        ExperimentMethod::UssRandom => "uss-random",
        ExperimentMethod::Coloring => "coloring",
    }
}

fn write_records(path: &Path, records: &[Record]) -> Result<()> {
    write_file(path, &render(records, OutputFormat::Csv)?)
}

fn selector_schedule(
    sel: &SelectorMatrix,
    g: &NetworkGraph,
    local: Option<LocalBounds>,
) -> Result<(TransmissionSchedule, Vec<String>)> {
    Ok(match local {
        Some(bounds) => {
            let warnings = check_local_bounds(bounds, g).iter().map(warning_text).collect();
            (schedule_from_selector_local(sel, bounds, g.link_count())?, warnings)
        }
        None => (schedule_from_selector(sel, g)?, Vec::new()),
    })
}

fn prepare(args: &ExperimentArgs) -> Result<Prepared> {
    let graph = load_graph(&args.graph)?;
    if graph.link_count() == 0 {
        return Err(CliError::param("the network has no links"));
    }
    let h: ConflictGraph = build_conflict_graph(&graph);
    let out = &args.out_dir;
    write_records(&out.join("conflict_graph.csv"), &conflict_records(&graph, &h))?;

    let local = local_bounds(args.max_links, args.max_degree);
    let bounds = local.unwrap_or(LocalBounds {
        max_links: graph.link_count(),
        max_conflict_in_degree: h.max_in_degree(),
    });
    let delta = bounds.max_conflict_in_degree;
    let (schedule, thresholds, colors, warnings) = match args.method {
        ExperimentMethod::Coloring => {
            let exact = graph.link_count() <= DEFAULT_VERTEX_LIMIT;
            let method = if exact { ColorMethod::Exact } else { ColorMethod::Greedy };
            let col = color_graph(&h, method, DEFAULT_VERTEX_LIMIT)?;
            write_records(&out.join("coloring.csv"), &coloring_records(&graph, &col))?;
            let mut bound = coloring_threshold(col.color_count())?;
            bound.tight &= exact;
            (
                schedule_from_coloring(&col),
                vec![bound],
                Some((col.color_count(), exact)),
                Vec::new(),
            )
        }
        ExperimentMethod::UssPoly => {
            let sel = default_selector(bounds)?;
            write_file(&out.join("selector.txt"), &write_selector(&sel)?)?;
            let (s, warnings) = selector_schedule(&sel, &graph, local)?;
            let eps = sel.claimed_eps().expect("constructed selectors carry claims");
            let thresholds = vec![
                uss_threshold(
                    UssForm::Polynomial {
                        m: bounds.max_links as u64,
                    },
                    delta,
                )?,
                uss_threshold(UssForm::Direct { eps }, delta)?,
            ];
            (s, thresholds, None, warnings)
        }
        ExperimentMethod::UssRandom => {
            let built = random_uss(
                bounds.max_links,
                delta + 1,
                1.0 / std::f64::consts::E,
                args.seed,
                DEFAULT_MAX_RETRIES,
            )?;
            write_file(&out.join("selector.txt"), &write_selector(&built.matrix)?)?;
            let (s, warnings) = selector_schedule(&built.matrix, &graph, local)?;
            let eps = built.matrix.claimed_eps().expect("constructed selectors carry claims");
            let thresholds = vec![
                uss_threshold(UssForm::Random, delta)?,
                uss_threshold(UssForm::Direct { eps }, delta)?,
            ];
            (s, thresholds, None, warnings)
        }
    };
    write_file(&out.join("schedule.txt"), &write_schedule(&schedule))?;
    let frequency_verified = verify_frequent(&schedule, &graph, 2)?.satisfied;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    Ok(Prepared {
        graph,
        schedule,
        thresholds,
        colors,
        frequency_verified,
        warnings,
    })
}

fn traffic(args: &ExperimentArgs, g: &NetworkGraph, adv: &AdversaryConfig) -> Result<InjectionTrace> {
    let tr = match &args.trace {
        Some(path) => {
            let tr = load_trace(path)?;
            tr.validate_routes(g)?;
            tr
        }
        None => {
            let routes = g.simple_routes(args.max_route_len);
            gen_leaky_bucket_with(g, &routes, adv, args.rounds, args.seed, args.intensity)?
        }
    };
    if let Some(violation) = validate_trace(&tr, adv).violation {
        return Err(CliError::Admissibility {
            rho: adv.rho().to_string(),
            b: adv.b(),
            violation,
        });
    }
    Ok(tr)
}

fn run_cell(args: &ExperimentArgs, prep: &Prepared, rho: Rational, policy: Policy, dir: &Path) -> Result<Record> {
    let adv = AdversaryConfig::new(rho, args.b)?;
    let tr = traffic(args, &prep.graph, &adv)?;
    let metrics = run(&prep.graph, &prep.schedule, policy, &tr, args.rounds)?;
    write_file(&dir.join("trace.txt"), &write_trace(&tr))?;
    write_file(&dir.join("metrics.csv"), &write_metrics_csv(&metrics)?)?;
    write_file(&dir.join("run.log"), &write_run_log(&metrics))?;

    let stability = metrics.stability();
    let primary = &prep.thresholds[0];
    let mut r = Record::new("experiment")
        .field("method", method_name(args.method))
        .field("policy", policy.to_string())
        .rational("rho", rho)
        .field("b", args.b)
        .field("rounds", args.rounds)
        .field("seed", args.seed)
        .field("links", prep.graph.link_count())
        .field("schedule", provenance_name(prep.schedule.provenance()))
        .field("period", prep.schedule.period());
    if let Some((colors, exact)) = prep.colors {
        r = r.field("colors", colors).field("coloring_exact", exact);
    }
    let freq = prep.schedule.claimed_frequency();
    if let Some(f) = freq {
        r = r.rational("schedule_rho", f.rho).field("schedule_window", f.window);
    }
    r = r.field("frequency_verified", prep.frequency_verified);
    r = r
        .field("threshold_source", primary.source.to_string())
        .rate("threshold", primary.rho)
        .field("threshold_tight", primary.tight);
    for extra in &prep.thresholds[1..] {
        r = r.rate(
            &format!("threshold_{}", extra.source.to_string().replace('-', "_")),
            extra.rho,
        );
    }
    r = r
        .field("below_threshold", primary.admits(rho))
        .field("injected", metrics.injected)
        .field("delivered", metrics.delivered.len())
        .field("undelivered", metrics.undelivered_count)
        .field("max_backlog", metrics.max_backlog)
        .field("max_latency", metrics.max_latency)
        .field("backlog_slope", stability.slope)
        .field("verdict", if stability.stable { "stable" } else { "unstable" });
    let latency = freq.filter(|f| rho < f.rho).and_then(|f| {
        let route_len = tr.max_route_len().max(1) as u32;
        LatencyBound::new(rho, f.rho, f.window as u64, args.b, route_len).ok()
    });
    r = match latency {
        Some(lb) => {
            let within = Rational::from_integer(metrics.max_latency as i128) <= lb.rounds();
            r.rational("latency_bound", lb.rounds())
                .field("latency_bound_approx", oblivio_core::num::to_f64(lb.rounds()))
                .field("latency_within_bound", within)
        }
        None => r
            .field("latency_bound", None::<String>)
            .field("latency_within_bound", None::<bool>),
    };
    if !prep.warnings.is_empty() {
        r = r.field("warnings", prep.warnings.clone());
    }
    let json = serde_json::to_string_pretty(&r.to_json()).expect("records serialize");
    write_file(&dir.join("summary.json"), &(json + "\n"))?;
    Ok(r)
}

/// Runs the experiment described by `args` and returns one summary record
/// per run, in grid order (rates outer, policies inner).
pub fn run_experiment(args: &ExperimentArgs) -> Result<Vec<Record>> {
    if args.rho.is_empty() {
        return Err(CliError::param("give at least one --rho"));
    }
    if !args.sweep && (args.rho.len() > 1 || args.policy.len() > 1) {
        return Err(CliError::param("several rates or policies need --sweep"));
    }
    if !(0.0..=1.0).contains(&args.intensity) {
        return Err(CliError::param(format!(
            "intensity={} must lie in [0, 1]",
            args.intensity
        )));
    }
    let prep = prepare(args)?;
    let cells: Vec<(Rational, Policy, PathBuf)> = args
        .rho
        .iter()
        .flat_map(|&rho| args.policy.iter().map(move |&p| (rho, p)))
        .map(|(rho, p)| {
            let dir = if args.sweep {
                cell_dir(&args.out_dir, rho, p)
            } else {
                args.out_dir.clone()
            };
            (rho, p, dir)
        })
        .collect();
    let threads = args
        .threads
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, cells.len());
    let results: Vec<Mutex<Option<Result<Record>>>> = cells.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((rho, policy, dir)) = cells.get(i) else { break };
                let outcome = run_cell(args, &prep, *rho, *policy, dir);
                *results[i].lock().expect("no worker panics while holding the lock") = Some(outcome);
            });
        }
    });
    results
        .into_iter()
        .map(|slot| slot.into_inner().expect("workers finished").expect("every cell ran"))
        .collect()
}
