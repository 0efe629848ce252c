//! The `arbor-ftp` command line.
//!
//! Exit codes: 0 success, 1 a check found a counterexample or failed
//! certification, 2 usage or I/O error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::charging::{check_charge_bound, check_disjoint_uniqueness, check_size_bound, color_edges, compute_charges, per_color_excess, DisjointCheck};
use crate::eft::{build_eft_subgraph_with, build_perturbed, load_subgraph, BuildOptions, EftSubgraph};
use crate::fault::{certify, query_fault, sweep_all_faults, FaultError, SweepOptions};
use crate::ftp::{build_ftp, lower_bound_multigraph, minimum_ftp, parse_element_set, verify_ftp, FtpVerdict, MIN_SEARCH_MAX_ELEMENTS};
use crate::gen::gen_random_graph;
use crate::graph::{EdgeId, Graph};
use crate::matroid::{parse_matroid, rank, write_matroid};

#[derive(Debug, Parser)]
#[command(name = "arbor-ftp", version, about = "Fault-tolerant arborescence subgraphs and matroid basis preservers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the fault-tolerant subgraph H of a graph.
    Build(BuildArgs),
    /// Answer one edge-fault query on H.
    Query(QueryArgs),
    /// Certify every fault (or every tree fault) against the full graph.
    Sweep(SweepArgs),
    /// Run the charging analysis on a fresh build.
    Analyze(AnalyzeArgs),
    /// Generate a random rooted graph.
    Gen(GenArgs),
    /// Matroid basis preservers.
    #[command(subcommand)]
    Matroid(MatroidCommand),
}

#[derive(Debug, Args)]
pub struct BuildFlags {
    /// Build on seeded perturbed costs.
    #[arg(long)]
    pub perturb: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reseed attempts when perturbed costs still tie.
    #[arg(long, default_value_t = 8)]
    pub max_redraws: u32,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Subgraph file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write `edge_id first_path_index` rows here.
    #[arg(long)]
    pub provenance: Option<PathBuf>,
    #[command(flatten)]
    pub flags: BuildFlags,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub subgraph: PathBuf,
    #[arg(long)]
    pub fault: EdgeId,
    /// Also solve G - f and check the approximation guarantee.
    #[arg(long)]
    pub certify: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Subgraph file; built in memory when absent.
    #[arg(long)]
    pub subgraph: Option<PathBuf>,
    /// Only fault the base-tree edges.
    #[arg(long)]
    pub tree_only: bool,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub flags: BuildFlags,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Per-pair charge table.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub flags: BuildFlags,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    #[arg(long, default_value_t = 100)]
    pub cost_max: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum MatroidCommand {
    /// Union of k + 1 successive greedy bases.
    Build {
        #[arg(long)]
        matroid: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a set against every fault set of size at most k.
    Verify {
        #[arg(long)]
        matroid: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Replicated spanning tree that needs k (n - 1) elements.
    LowerBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the matroid file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Fail {
    /// A check failed; exit 1.
    Check(String),
    /// Bad input or I/O; exit 2.
    Usage(String),
}

type Outcome = Result<(), Fail>;

fn usage(e: impl std::fmt::Display) -> Fail {
    Fail::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Fail> {
    Graph::parse(&read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Fail::Check(msg)) => {
            let _ = writeln!(err, "check failed: {msg}");
            1
        }
        Err(Fail::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Outcome {
    let mut text = String::new();
    let result = match cmd {
        Command::Build(a) => cmd_build(a, &mut text),
        Command::Query(a) => cmd_query(a, &mut text),
        Command::Sweep(a) => cmd_sweep(a, &mut text),
        Command::Analyze(a) => cmd_analyze(a, &mut text),
        Command::Gen(a) => cmd_gen(a, &mut text),
        Command::Matroid(m) => cmd_matroid(m, &mut text),
    };
    out.write_all(text.as_bytes()).map_err(usage)?;
    result
}

struct Built {
    h: EftSubgraph,
    header: Vec<String>,
}

fn build(g: &Graph, flags: &BuildFlags) -> Result<Built, Fail> {
    let opts = BuildOptions { workers: flags.workers.max(1) };
    if flags.perturb {
        let b = build_perturbed(g, flags.seed, flags.max_redraws, opts).map_err(usage)?;
        let used = flags.seed.wrapping_add(u64::from(b.redraws));
        let header = vec![
            format!("arbor-ftp build perturb=true seed={} redraws={} used_seed={used}", flags.seed, b.redraws),
            format!("scale={} unit={} max_delta={}", b.perturbation.scale, b.perturbation.unit, b.perturbation.max_delta),
        ];
        Ok(Built { h: b.subgraph, header })
    } else {
        let h = build_eft_subgraph_with(g, opts).map_err(usage)?;
        Ok(Built { h, header: vec![format!("arbor-ftp build perturb=false seed={}", flags.seed)] })
    }
}

fn describe(h: &EftSubgraph, g: &Graph, s: &mut String) {
    let n = g.vertex_count();
    let _ = writeln!(s, "vertices: {n}  graph edges: {}  subgraph edges: {}", g.edge_count(), h.edge_set.len());
    let _ = writeln!(s, "tree edges: {}  extra edges: {}", h.base_tree.edges().len(), h.extra_edges().len());
    let _ = writeln!(s, "replacement-path union: {}  bound sqrt(6 n^3): {:.1}", h.path_union().len(), (6.0 * (n as f64).powi(3)).sqrt());
    if !h.paths.is_empty() {
        let _ = writeln!(s, "paths with cost ties: {}", h.cost_ties());
    }
}

fn cmd_build(a: BuildArgs, s: &mut String) -> Outcome {
    let g = load_graph(&a.graph)?;
    let b = build(&g, &a.flags)?;
    let text = b.h.serialize(&g, &b.header);
    match &a.out {
        Some(path) => write_file(path, &text)?,
        None => s.push_str(&text),
    }
    if let Some(path) = &a.provenance {
        write_file(path, &b.h.provenance_tsv().expect("fresh builds carry provenance"))?;
    }
    if a.out.is_some() {
        for line in &b.header {
            let _ = writeln!(s, "{line}");
        }
        describe(&b.h, &g, s);
    }
    Ok(())
}

fn load_h(g: &Graph, path: &Path) -> Result<EftSubgraph, Fail> {
    load_subgraph(g, &read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn cmd_query(a: QueryArgs, s: &mut String) -> Outcome {
    let g = load_graph(&a.graph)?;
    let h = load_h(&g, &a.subgraph)?;
    let outcome = if a.certify { certify(&g, &h, a.fault) } else { query_fault(&g, &h, a.fault) };
    let r = match outcome {
        Ok(r) => r,
        Err(FaultError::UnknownEdge(e)) => return Err(Fail::Usage(format!("edge {e} is not an edge of the graph"))),
        Err(e @ FaultError::CertificationFailure { .. }) => return Err(Fail::Check(e.to_string())),
    };
    let _ = writeln!(s, "fault: {}  tree edge: {}", r.fault, !r.reused_base_tree);
    match &r.interim {
        Ok(t) => {
            let _ = writeln!(s, "interim cost: {}", t.total_cost);
            let _ = write!(s, "{}", t.serialize());
        }
        Err(e) => {
            let _ = writeln!(s, "interim: infeasible ({e})");
        }
    }
    if let Some(exact) = &r.exact {
        match exact {
            Ok(t) => {
                let _ = writeln!(s, "exact cost: {}", t.total_cost);
            }
            Err(e) => {
                let _ = writeln!(s, "exact: infeasible ({e})");
            }
        }
        if let Some(q) = r.ratio {
            let _ = writeln!(s, "ratio: {q} ({:.6})", q.to_f64());
        }
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs, s: &mut String) -> Outcome {
    let g = load_graph(&a.graph)?;
    let h = match &a.subgraph {
        Some(path) => load_h(&g, path)?,
        None => {
            let b = build(&g, &a.flags)?;
            for line in &b.header {
                let _ = writeln!(s, "# {line}");
            }
            b.h
        }
    };
    let summary = sweep_all_faults(&g, &h, SweepOptions { all_edges: !a.tree_only, workers: a.flags.workers.max(1) });
    if let Some(path) = &a.report {
        write_file(path, &summary.report_tsv())?;
    }
    let _ = writeln!(s, "faults: {}  tree faults: {}  infeasible: {}", summary.rows.len(), summary.tree_faults(), summary.infeasible_faults().len());
    if let (Some(max), Some(mean)) = (summary.max_ratio, summary.mean_ratio) {
        let _ = writeln!(s, "max ratio: {max} ({:.6})  mean ratio: {mean:.6}", max.to_f64());
    }
    if summary.failures.is_empty() {
        let _ = writeln!(s, "certified: all");
        Ok(())
    } else {
        let msgs: Vec<String> = summary.failures.iter().map(ToString::to_string).collect();
        Err(Fail::Check(msgs.join("; ")))
    }
}

fn cmd_analyze(a: AnalyzeArgs, s: &mut String) -> Outcome {
    let g = load_graph(&a.graph)?;
    let b = build(&g, &a.flags)?;
    for line in &b.header {
        let _ = writeln!(s, "# {line}");
    }
    describe(&b.h, &g, s);
    let h = &b.h;
    let ca = color_edges(h).map_err(usage)?;
    let cl = compute_charges(&g, h, &ca);
    if let Some(path) = &a.report {
        write_file(path, &cl.report_tsv())?;
    }
    let mut problems = Vec::new();
    match check_charge_bound(&cl) {
        Ok(st) => {
            let _ = writeln!(
                s,
                "charged pairs: {}  charges: {}  max colors per pair: {}  max intersecting: {}  max non-intersecting: {}",
                st.charged_pairs, st.total_charges, st.max_colors, st.max_intersecting, st.max_non_intersecting
            );
        }
        Err(v) => problems.push(v.to_string()),
    }
    let n = g.vertex_count();
    let _ = writeln!(s, "total charges: {}  bound 3 n^2: {}", cl.total_charges(), 3 * n * n);
    for (i, pairs, c) in per_color_excess(&cl, &ca) {
        problems.push(format!("color {i} charged {pairs} pairs with {c} edges"));
    }
    if cl.total_charges() > 3 * n * n {
        problems.push(format!("{} charges exceed 3 n^2", cl.total_charges()));
    }
    if let Err(e) = check_size_bound(h) {
        problems.push(e.to_string());
    }
    match check_disjoint_uniqueness(&g, h) {
        Ok(DisjointCheck::Ok { pairs_checked }) => {
            let _ = writeln!(s, "disjoint-subpath uniqueness: ok ({pairs_checked} pairs)");
        }
        Ok(DisjointCheck::Counterexample(c)) => problems.push(format!(
            "pair {:?} has distinct SP-disjoint subpaths {:?} (path {}) and {:?} (path {})",
            c.pair, c.first.1, c.first.0, c.second.1, c.second.0
        )),
        Err(e) => {
            let _ = writeln!(s, "disjoint-subpath uniqueness: skipped ({e})");
        }
    }
    if problems.is_empty() {
        let _ = writeln!(s, "charging bounds: ok");
        Ok(())
    } else {
        Err(Fail::Check(problems.join("; ")))
    }
}

fn cmd_gen(a: GenArgs, s: &mut String) -> Outcome {
    let g = gen_random_graph(a.n, a.density, a.cost_max, a.seed).map_err(usage)?;
    let header = format!("arbor-ftp gen n={} density={} cost_max={} seed={}", a.n, a.density, a.cost_max, a.seed);
    let text = g.write_edge_list(0..g.edge_count(), &[header]);
    match &a.out {
        Some(path) => {
            write_file(path, &text)?;
            let _ = writeln!(s, "wrote {} vertices, {} edges", g.vertex_count(), g.edge_count());
        }
        None => s.push_str(&text),
    }
    Ok(())
}

fn cmd_matroid(cmd: MatroidCommand, s: &mut String) -> Outcome {
    let load = |path: &Path| parse_matroid(&read(path)?).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())));
    match cmd {
        MatroidCommand::Build { matroid, k, out } => {
            let (m, cost) = load(&matroid)?;
            let ftp = build_ftp(&m, &cost, k);
            let r = rank(&m, &m.ground());
            let text = ftp.serialize(&[format!("arbor-ftp matroid build kind={} k={k}", m.kind())]);
            match &out {
                Some(path) => write_file(path, &text)?,
                None => s.push_str(&text),
            }
            let sizes: Vec<String> = ftp.layers.iter().map(|b| b.len().to_string()).collect();
            let _ = writeln!(s, "layers: {}  |S|: {}  rank: {r}  (k+1)*rank: {}  k*rank: {}", sizes.join(" "), ftp.len(), (k + 1) * r, k * r);
            Ok(())
        }
        MatroidCommand::Verify { matroid, set, k, workers } => {
            let (m, cost) = load(&matroid)?;
            let s_set = parse_element_set(&read(&set)?, m.ground_size()).map_err(|e| Fail::Usage(format!("{}: {e}", set.display())))?;
            match verify_ftp(&m, &cost, &s_set, k, workers.max(1)).map_err(usage)? {
                FtpVerdict::Ok { fault_sets } => {
                    let _ = writeln!(s, "ok: {fault_sets} fault sets checked, |S| = {}", s_set.len());
                    Ok(())
                }
                FtpVerdict::Counterexample(c) => Err(Fail::Check(format!(
                    "F = {:?}: E \\ F has basis {:?} (rank {}, cost {}), S \\ F only {:?} (rank {}, cost {})",
                    c.faults,
                    c.expected.elements,
                    c.expected.len(),
                    c.expected.cost,
                    c.found.elements,
                    c.found.len(),
                    c.found.cost
                ))),
            }
        }
        MatroidCommand::LowerBound { n, k, seed, out } => {
            if n < 2 || k == 0 {
                return Err(Fail::Usage("need n >= 2 and k >= 1".into()));
            }
            let lb = lower_bound_multigraph(n, k, seed);
            if let Some(path) = &out {
                write_file(path, &format!("# arbor-ftp matroid lower-bound n={n} k={k} seed={seed}\n{}", write_matroid(&lb.matroid, &lb.cost)))?;
            }
            let ftp = build_ftp(&lb.matroid, &lb.cost, k);
            let _ = writeln!(s, "seed={seed} n={n} k={k} elements={} required={}", lb.matroid.ground_size(), lb.required_size());
            let _ = writeln!(s, "constructed |S|: {}", ftp.len());
            let mut problems = Vec::new();
            match verify_ftp(&lb.matroid, &lb.cost, &ftp.union, k, 1) {
                Ok(FtpVerdict::Ok { .. }) => {
                    let _ = writeln!(s, "constructed set verified");
                }
                Ok(FtpVerdict::Counterexample(c)) => problems.push(format!("constructed set fails for F = {:?}", c.faults)),
                Err(e) => {
                    let _ = writeln!(s, "verification skipped ({e})");
                }
            }
            if lb.matroid.ground_size() <= MIN_SEARCH_MAX_ELEMENTS && k <= crate::ftp::VERIFY_MAX_BUDGET {
                let min = minimum_ftp(&lb.matroid, &lb.cost, k).map_err(usage)?;
                let _ = writeln!(s, "smallest verified set: {} elements {:?}", min.len(), min);
                if min.len() < lb.required_size() {
                    problems.push(format!("found a {}-element set below the bound {}", min.len(), lb.required_size()));
                }
            } else {
                let _ = writeln!(s, "exhaustive search skipped (more than {MIN_SEARCH_MAX_ELEMENTS} elements)");
            }
            if problems.is_empty() {
                Ok(())
            } else {
                Err(Fail::Check(problems.join("; ")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("arbor-ftp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_command_is_usage_error() {
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("sweep"));
    }

    #[test]
    fn missing_graph_file() {
        let (code, _, err) = run_capture(&["build", "--graph", "/nonexistent/g.txt"]);
        assert_eq!(code, 2);
        assert!(err.contains("/nonexistent/g.txt"));
    }

    #[test]
    fn gen_to_stdout_is_deterministic() {
        let a = run_capture(&["gen", "--n", "5", "--density", "0.5", "--seed", "4"]);
        let b = run_capture(&["gen", "--n", "5", "--density", "0.5", "--seed", "4"]);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
        assert!(a.1.starts_with("# arbor-ftp gen n=5 density=0.5 cost_max=100 seed=4\n"));
    }

    #[test]
    fn lower_bound_small() {
        let (code, out, _) = run_capture(&["matroid", "lower-bound", "--n", "3", "--k", "2", "--seed", "1"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("smallest verified set: 4 elements"));
    }
}
