//! Subcommand implementations.

use std::path::{Path, PathBuf};

use oblivio_core::bounds::{coloring_threshold, uss_threshold, LatencyBound, StabilityBound, UssForm};
use oblivio_core::graph::{
    build_conflict_graph, degree_bound_check, exact_chromatic, greedy_coloring, Coloring, ConflictGraph, NetworkGraph,
};
use oblivio_core::schedule::{
    check_local_bounds, extend_to_maximal_independent, schedule_from_coloring, schedule_from_selector,
    schedule_from_selector_local, verify_frequent, BoundWarning, LocalBounds, TransmissionSchedule,
};
use oblivio_core::selector::{
    is_selector, poly_uss, random_uss, uss_min_count, uss_sample_check, SampleVerdict, SelectorMatrix,
};
use oblivio_core::sim::run;
use oblivio_core::traffic::{
    gen_clique_scenario, gen_leaky_bucket_with, gen_tree_family, validate_trace, AdversaryConfig, InjectionTrace,
};
use oblivio_core::Rational;

use crate::cli::{
    BoundsCommand, BuildSelectorArgs, ColorArgs, ColorMethod, Command, ScenarioCommand, ScheduleArgs, ScheduleSource,
    SelectorMethod, SimulateArgs, UssFormArg, ValidateTraceArgs, VerifySelectorArgs,
};
use crate::error::{CliError, Result, EXIT_ADMISSIBILITY, EXIT_FAILURE, EXIT_OK};
use crate::experiment;
use crate::formats::{
    coloring_records, conflict_records, parse_graph, parse_schedule, parse_selector, parse_trace, provenance_name,
    read_file, write_file, write_graph, write_metrics_csv, write_run_log, write_schedule, write_selector, write_trace,
};
use crate::report::{render, OutputFormat, Record};

/// What a command prints and the status it exits with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub exit: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, exit: EXIT_OK }
    }

    fn records(records: &[Record], format: OutputFormat, exit: u8) -> Result<Self> {
        Ok(Output {
            stdout: render(records, format)?,
            exit,
        })
    }
}

pub fn execute(command: Command) -> Result<Output> {
    match command {
        Command::ConflictGraph { graph, output } => conflict_graph(&graph, output.format),
        Command::Color(args) => color(args),
        Command::BuildSelector(args) => build_selector(args),
        Command::VerifySelector(args) => verify_selector(args),
        Command::Schedule(args) => schedule(args),
        Command::Scenario { kind } => scenario(kind),
        Command::ValidateTrace(args) => validate(args),
        Command::Simulate(args) => simulate(args),
        Command::Bounds { kind } => bounds(kind),
        Command::Experiment(args) => {
            let format = args.output.format;
            let records = experiment::run_experiment(&args)?;
            Output::records(&records, format, EXIT_OK)
        }
    }
}

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

pub fn load_graph(path: &Path) -> Result<NetworkGraph> {
    parse_graph(&source_name(path), &read_file(path)?)
}

pub fn load_trace(path: &Path) -> Result<InjectionTrace> {
    parse_trace(&source_name(path), &read_file(path)?)
}

fn load_selector(path: &Path) -> Result<SelectorMatrix> {
    parse_selector(&source_name(path), &read_file(path)?)
}

/// Writes `contents` to `out`, or returns it for standard output.
fn deliver(out: Option<&Path>, contents: String, report: impl FnOnce() -> Result<String>) -> Result<String> {
    match out {
        Some(path) => {
            write_file(path, &contents)?;
            report()
        }
        None => Ok(contents),
    }
}

pub fn color_graph(h: &ConflictGraph, method: ColorMethod, vertex_limit: usize) -> Result<Coloring> {
    Ok(match method {
        ColorMethod::Greedy => greedy_coloring(h),
        ColorMethod::Exact => exact_chromatic(h, vertex_limit)?,
    })
}

pub fn threshold_record(bound: &StabilityBound) -> Record {
    let mut r = Record::new("threshold")
        .field("source", bound.source.to_string())
        .rate("rho", bound.rho)
        .field("tight", bound.tight);
    if let Some(delta) = bound.delta {
        r = r.field("delta", delta);
    }
    if let Some(eps) = bound.eps {
        r = r.rational("eps", eps);
    }
    if let Some(m) = bound.m {
        r = r.field("m", m);
    }
    if let Some(chi) = bound.chi {
        r = r.field("chi", chi);
    }
    r
}

pub fn warning_text(w: &BoundWarning) -> String {
    match w {
        BoundWarning::TooManyLinks { bound, actual } => {
            format!("network has {actual} links, above the assumed bound {bound}")
        }
        BoundWarning::ConflictDegreeExceeded { bound, actual } => {
            format!("conflict in-degree {actual} exceeds the assumed bound {bound}")
        }
    }
}

fn conflict_graph(path: &Path, format: OutputFormat) -> Result<Output> {
    let g = load_graph(path)?;
    let h = build_conflict_graph(&g);
    let check = degree_bound_check(&g);
    let mut records = conflict_records(&g, &h);
    records.push(
        Record::new("conflict-summary")
            .field("links", g.link_count())
            .field("edges", h.edge_count())
            .field("max_in_degree", h.max_in_degree())
            .field("max_degree", h.max_degree())
            .field("network_max_degree", check.delta_g)
            .field("in_degree_bound", check.bound)
            .field("bound_holds", check.holds),
    );
    Output::records(&records, format, EXIT_OK)
}

fn color(args: ColorArgs) -> Result<Output> {
    let g = load_graph(&args.graph)?;
    let h = build_conflict_graph(&g);
    let col = color_graph(&h, args.method, args.vertex_limit)?;
    let mut records = coloring_records(&g, &col);
    records.push(
        Record::new("coloring")
            .field(
                "method",
                if args.method == ColorMethod::Exact {
                    "exact"
                } else {
                    "greedy"
                },
            )
            .field("colors", col.color_count())
            .field("proper", col.is_proper(&h)),
    );
    Output::records(&records, args.output.format, EXIT_OK)
}

fn selector_record(m: &SelectorMatrix) -> Record {
    let mut r = Record::new("selector").field("n", m.n()).field("t", m.t());
    if let Some(k) = m.claimed_k() {
        r = r.field("k", k);
    }
    if let Some(eps) = m.claimed_eps() {
        r = r.rational("eps", eps);
    }
    r
}

fn build_selector(args: BuildSelectorArgs) -> Result<Output> {
    let (matrix, record) = match args.method {
        SelectorMethod::Poly => {
            let m = poly_uss(args.n, args.k, args.c)?;
            let r = selector_record(&m).field("method", "poly").field("c", args.c);
            (m, r)
        }
        SelectorMethod::Random => {
            let built = random_uss(args.n, args.k, args.eps, args.seed, args.max_retries)?;
            let r = selector_record(&built.matrix)
                .field("method", "random")
                .field("seed", args.seed)
                .field("attempts", built.attempts)
                .field("exhaustive", built.exhaustive);
            (built.matrix, r)
        }
    };
    let text = write_selector(&matrix)?;
    let format = args.output.format;
    let stdout = deliver(args.out.as_deref(), text, || {
        render(
            &[record.field("path", source_name(args.out.as_deref().unwrap()))],
            format,
        )
    })?;
    Ok(Output::ok(stdout))
}

fn verify_selector(args: VerifySelectorArgs) -> Result<Output> {
    let m = load_selector(&args.selector)?;
    if args.k == 0 || args.k > m.n() {
        return Err(CliError::param(format!("k={} must lie in 1..={}", args.k, m.n())));
    }
    let mut record = Record::new("verification")
        .field("n", m.n())
        .field("t", m.t())
        .field("k", args.k);
    let holds = if let Some(target) = args.m {
        if args.sample.is_some() {
            return Err(CliError::param("--sample applies to the eps check, not to --m"));
        }
        let verdict = is_selector(&m, args.k, target)?;
        record = record.field("property", "selector").field("m", target);
        if let Some(w) = &verdict.witness {
            record = record.list("witness", w);
        }
        verdict.holds
    } else {
        let eps = args
            .eps
            .or(m.claimed_eps())
            .ok_or_else(|| CliError::param("give --eps or --m; the selector file claims no eps"))?;
        record = record.field("property", "uss").rational("eps", eps);
        match args.sample {
            Some(trials) => {
                let verdict = uss_sample_check(&m, args.k, eps, trials, args.seed);
                record = record.field("mode", "sampled").field("trials", trials);
                if let SampleVerdict::Refuted {
                    subset,
                    element,
                    count,
                    required,
                } = &verdict
                {
                    record = record
                        .list("witness", subset)
                        .field("element", *element)
                        .field("count", *count)
                        .field("required", *required);
                }
                !verdict.is_refuted()
            }
            None => {
                let report = uss_min_count(&m, args.k)?;
                record = record
                    .field("mode", "exhaustive")
                    .field("min_count", report.min_count)
                    .rational("measured_eps", report.eps);
                if let Some((subset, element)) = &report.witness {
                    record = record.list("witness", subset).field("element", *element);
                }
                report.eps >= eps
            }
        }
    };
    record = record.field("holds", holds);
    Output::records(
        &[record],
        args.output.format,
        if holds { EXIT_OK } else { EXIT_FAILURE },
    )
}

/// Default selector for a network: polynomial, sized by `bounds`.
pub fn default_selector(bounds: LocalBounds) -> Result<SelectorMatrix> {
    Ok(poly_uss(bounds.max_links, bounds.max_conflict_in_degree + 1, 2)?)
}

pub fn local_bounds(max_links: Option<usize>, max_degree: Option<usize>) -> Option<LocalBounds> {
    Some(LocalBounds::from_network_degree(max_links?, max_degree?))
}

fn actual_bounds(g: &NetworkGraph) -> LocalBounds {
    LocalBounds {
        max_links: g.link_count(),
        max_conflict_in_degree: build_conflict_graph(g).max_in_degree(),
    }
}

fn schedule(args: ScheduleArgs) -> Result<Output> {
    let g = load_graph(&args.graph)?;
    let local = local_bounds(args.max_links, args.max_degree);
    let mut warnings = Vec::new();
    let s: TransmissionSchedule = match args.from {
        ScheduleSource::Selector => {
            let sel = match &args.selector {
                Some(path) => load_selector(path)?,
                None => default_selector(local.unwrap_or_else(|| actual_bounds(&g)))?,
            };
            match local {
                Some(bounds) => {
                    warnings = check_local_bounds(bounds, &g);
                    schedule_from_selector_local(&sel, bounds, g.link_count())?
                }
                None => schedule_from_selector(&sel, &g)?,
            }
        }
        ScheduleSource::Coloring => {
            let h = build_conflict_graph(&g);
            let col = color_graph(&h, args.method, oblivio_core::graph::DEFAULT_VERTEX_LIMIT)?;
            if args.maximal {
                extend_to_maximal_independent(&col, &h)
            } else {
                schedule_from_coloring(&col)
            }
        }
    };
    let mut record = Record::new("schedule")
        .field("provenance", provenance_name(s.provenance()))
        .field("period", s.period())
        .field("links", s.link_count());
    if let Some(freq) = s.claimed_frequency() {
        record = record.rational("rho", freq.rho).field("window", freq.window);
    }
    let mut exit = EXIT_OK;
    if args.verify_windows > 0 {
        let report = verify_frequent(&s, &g, args.verify_windows)?;
        record = record
            .field("verified_rounds", report.rounds_simulated)
            .field("satisfied", report.satisfied);
        if let Some((link, successes)) = report.worst {
            record = record.field("worst_link", link).field("worst_successes", successes);
        }
        if !report.satisfied {
            exit = EXIT_FAILURE;
        }
    }
    let warning_list: Vec<String> = warnings.iter().map(warning_text).collect();
    for w in &warning_list {
        eprintln!("warning: {w}");
    }
    if !warning_list.is_empty() {
        record = record.field("warnings", warning_list);
    }
    let format = args.output.format;
    let stdout = deliver(args.out.as_deref(), write_schedule(&s), || {
        render(
            &[record.field("path", source_name(args.out.as_deref().unwrap()))],
            format,
        )
    })?;
    Ok(Output { stdout, exit })
}

fn scenario(kind: ScenarioCommand) -> Result<Output> {
    match kind {
        ScenarioCommand::Clique {
            n,
            eps,
            horizon,
            out_dir,
            output,
        } => {
            let s = gen_clique_scenario(n, eps, horizon)?;
            let graph_path = out_dir.join("clique.txt");
            let trace_path = out_dir.join("clique_trace.txt");
            write_file(&graph_path, &write_graph(&s.graph)?)?;
            write_file(&trace_path, &write_trace(&s.trace))?;
            let k = horizon / s.chi;
            let record = Record::new("scenario")
                .field("name", "clique")
                .field("nodes", n)
                .field("links", s.graph.link_count())
                .field("chi", s.chi)
                .field("extra_period", s.extra_period)
                .rational("rho", Rational::new(1, s.chi as i128) + eps)
                .field("b", 2)
                .field("packets", s.trace.len())
                .field("predicted_backlog_round", k * s.chi)
                .field("predicted_backlog", s.predicted_backlog(k))
                .field("graph", source_name(&graph_path))
                .field("trace", source_name(&trace_path));
            Output::records(&[record], output.format, EXIT_OK)
        }
        ScenarioCommand::TreeFamily {
            delta,
            rho,
            horizon,
            out_dir,
            output,
        } => {
            let fam = gen_tree_family(delta, rho, horizon)?;
            let trace_path = out_dir.join("tree_trace.txt");
            write_file(&trace_path, &write_trace(&fam.trace))?;
            let mut records = Vec::new();
            for (idx, tree) in fam.trees.iter().enumerate() {
                let path = out_dir.join(format!("tree_{idx:02}.txt"));
                write_file(&path, &write_graph(tree)?)?;
                let mut r = Record::new("tree").field("index", idx);
                r = match (fam.swaps[idx], fam.root_link(idx)) {
                    (Some((i, j)), Some(link)) => r.field("swap_i", i).field("swap_j", j).field("root_link", link),
                    _ => r
                        .field("swap_i", None::<u32>)
                        .field("swap_j", None::<u32>)
                        .field("root_link", None::<usize>),
                };
                records.push(r.field("graph", source_name(&path)));
            }
            records.push(
                Record::new("scenario")
                    .field("name", "tree-family")
                    .field("delta", delta)
                    .field("trees", fam.trees.len())
                    .list("shared_links", &fam.shared_links)
                    .field("packets", fam.trace.len())
                    .field("trace", source_name(&trace_path)),
            );
            Output::records(&records, output.format, EXIT_OK)
        }
        ScenarioCommand::LeakyBucket {
            graph,
            rho,
            b,
            horizon,
            seed,
            max_route_len,
            intensity,
            out,
        } => {
            let g = load_graph(&graph)?;
            let adv = AdversaryConfig::new(rho, b)?;
            let routes = g.simple_routes(max_route_len);
            let tr = gen_leaky_bucket_with(&g, &routes, &adv, horizon, seed, intensity)?;
            let stdout = deliver(out.as_deref(), write_trace(&tr), || Ok(String::new()))?;
            Ok(Output::ok(stdout))
        }
        ScenarioCommand::RandomNetwork {
            nodes,
            max_degree,
            density,
            seed,
            out,
        } => {
            if !(0.0..=1.0).contains(&density) {
                return Err(CliError::param(format!("density={density} must lie in [0, 1]")));
            }
            let g = NetworkGraph::random(nodes, max_degree, density, seed);
            let stdout = deliver(out.as_deref(), write_graph(&g)?, || Ok(String::new()))?;
            Ok(Output::ok(stdout))
        }
    }
}

fn validate(args: ValidateTraceArgs) -> Result<Output> {
    let tr = load_trace(&args.trace)?;
    let adv = AdversaryConfig::new(args.rho, args.b)?;
    if let Some(path) = &args.graph {
        tr.validate_routes(&load_graph(path)?)?;
    }
    let verdict = validate_trace(&tr, &adv);
    let mut record = Record::new("admissibility")
        .rational("rho", args.rho)
        .field("b", args.b)
        .field("packets", tr.len())
        .field("horizon", tr.horizon())
        .field("admissible", verdict.admissible);
    if let Some(v) = verdict.violation {
        let err = CliError::Admissibility {
            rho: args.rho.to_string(),
            b: args.b,
            violation: v,
        };
        eprintln!("{err}");
        record = record
            .field("link", v.link)
            .field("window_start", v.window_start)
            .field("window_len", v.window_len)
            .field("load", v.load);
    }
    let exit = if verdict.admissible {
        EXIT_OK
    } else {
        EXIT_ADMISSIBILITY
    };
    Output::records(&[record], args.output.format, exit)
}

fn simulate(args: SimulateArgs) -> Result<Output> {
    let g = load_graph(&args.graph)?;
    let s = parse_schedule(&source_name(&args.schedule), &read_file(&args.schedule)?)?;
    let tr = load_trace(&args.trace)?;
    let metrics = run(&g, &s, args.policy, &tr, args.rounds)?;
    if let Some(path) = &args.metrics_out {
        write_file(path, &write_metrics_csv(&metrics)?)?;
    }
    if let Some(path) = &args.log_out {
        write_file(path, &write_run_log(&metrics))?;
    }
    let stability = metrics.stability();
    let record = Record::new("run")
        .field("policy", args.policy.to_string())
        .field("rounds", metrics.rounds)
        .field("injected", metrics.injected)
        .field("delivered", metrics.delivered.len())
        .field("undelivered", metrics.undelivered_count)
        .field("max_backlog", metrics.max_backlog)
        .field("max_latency", metrics.max_latency)
        .field("backlog_slope", stability.slope)
        .field("verdict", if stability.stable { "stable" } else { "unstable" });
    Output::records(&[record], args.output.format, EXIT_OK)
}

fn bounds(kind: BoundsCommand) -> Result<Output> {
    match kind {
        BoundsCommand::Uss {
            delta,
            form,
            eps,
            m,
            output,
        } => {
            let form = match form {
                UssFormArg::Direct => UssForm::Direct {
                    eps: eps.ok_or_else(|| CliError::param("--eps is required"))?,
                },
                UssFormArg::Poly => UssForm::Polynomial {
                    m: m.ok_or_else(|| CliError::param("--m is required"))?,
                },
                UssFormArg::Random => UssForm::Random,
            };
            let bound = uss_threshold(form, delta)?;
            Output::records(&[threshold_record(&bound)], output.format, EXIT_OK)
        }
        BoundsCommand::Coloring { chi, output } => {
            let bound = coloring_threshold(chi)?;
            Output::records(&[threshold_record(&bound)], output.format, EXIT_OK)
        }
        BoundsCommand::Latency {
            rho,
            rho_prime,
            window,
            b,
            max_route_len,
            output,
        } => {
            let lb = LatencyBound::new(rho, rho_prime, window, b, max_route_len)?;
            Output::records(&[latency_record(&lb)?], output.format, EXIT_OK)
        }
    }
}

pub fn latency_record(lb: &LatencyBound) -> Result<Record> {
    Ok(Record::new("latency")
        .rational("rho", lb.rho)
        .rational("rho_prime", lb.rho_prime)
        .field("window", lb.window)
        .field("b", lb.b)
        .field("max_route_len", lb.max_route_len)
        .rational("c_prime", lb.c_prime)
        .rational("c_prime_without_offset", lb.c_prime_without_offset()?)
        .rational("window_bound", lb.window_bound)
        .rational("rounds", lb.rounds())
        .field("rounds_approx", oblivio_core::num::to_f64(lb.rounds())))
}

/// Output directory of one sweep cell.
pub fn cell_dir(root: &Path, rho: Rational, policy: oblivio_core::sim::Policy) -> PathBuf {
    root.join(format!("rho-{}_{}-{policy}", rho.numer(), rho.denom()))
}
