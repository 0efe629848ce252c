//! Single-edge-fault queries answered inside the sparse subgraph, with exact
//! certification against a full recomputation.

use std::cmp::Ordering;
use std::fmt;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::arborescence::{min_cost_arborescence_filtered, Arborescence, Infeasible};
use crate::cost::Cost;
use crate::eft::EftSubgraph;
use crate::graph::{EdgeId, Graph};

/// Exact non-negative rational in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    /// `num / den` reduced. `0 / 0` is taken as 1 (both arborescences empty
    /// or free).
    pub fn new(num: i64, den: i64) -> Ratio {
        if den == 0 {
            assert_eq!(num, 0, "ratio with zero denominator");
            return Ratio::ONE;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let s = if den < 0 { -1 } else { 1 };
        Ratio { num: s * num / g, den: s * den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Ord for Ratio {
    fn cmp(&self, other: &Ratio) -> Ordering {
        (i128::from(self.num) * i128::from(other.den)).cmp(&(i128::from(other.num) * i128::from(self.den)))
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Ratio) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultQueryResult {
    pub fault: EdgeId,
    /// Min-cost arborescence of `H - f`.
    pub interim: Result<Arborescence, Infeasible>,
    /// The base tree answered the query without recomputation.
    pub reused_base_tree: bool,
    /// Min-cost arborescence of `G - f`, when certified.
    pub exact: Option<Result<Arborescence, Infeasible>>,
    pub ratio: Option<Ratio>,
    pub interim_micros: u128,
    pub exact_micros: Option<u128>,
}

impl FaultQueryResult {
    pub fn interim_cost(&self) -> Option<Cost> {
        self.interim.as_ref().ok().map(|a| a.total_cost)
    }

    pub fn exact_cost(&self) -> Option<Cost> {
        self.exact.as_ref()?.as_ref().ok().map(|a| a.total_cost)
    }

    pub fn feasible(&self) -> bool {
        self.interim.is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FaultError {
    #[error("edge {0} is not an edge of the graph")]
    UnknownEdge(EdgeId),
    #[error("certification failed for fault {}: {reason}", result.fault)]
    CertificationFailure { reason: String, result: Box<FaultQueryResult> },
}

/// Min-cost arborescence of `H - f`.
///
/// A fault outside the base tree leaves the base tree optimal; otherwise the
/// arborescence is recomputed over the edges of `H` other than `f`. Costs are
/// always taken from `g`.
pub fn query_fault(g: &Graph, h: &EftSubgraph, f: EdgeId) -> Result<FaultQueryResult, FaultError> {
    if f >= g.edge_count() {
        return Err(FaultError::UnknownEdge(f));
    }
    let start = Instant::now();
    let tree = &h.base_tree;
    let (interim, reused) = if tree.contains(g, f) {
        (min_cost_arborescence_filtered(g, &|e| e != f && h.contains(e)), false)
    } else {
        let total_cost = tree.parent_edge.iter().flatten().map(|&e| g.edge(e).cost).sum();
        (Ok(Arborescence { total_cost, ..tree.clone() }), true)
    };
    Ok(FaultQueryResult {
        fault: f,
        interim,
        reused_base_tree: reused,
        exact: None,
        ratio: None,
        interim_micros: start.elapsed().as_micros(),
        exact_micros: None,
    })
}

/// [`query_fault`] plus a min-cost arborescence of `G - f`, checking
/// `exact <= interim <= 2 * exact` and that both sides agree on feasibility.
pub fn certify(g: &Graph, h: &EftSubgraph, f: EdgeId) -> Result<FaultQueryResult, FaultError> {
    let mut result = query_fault(g, h, f)?;
    let start = Instant::now();
    let exact = min_cost_arborescence_filtered(g, &|e| e != f);
    result.exact_micros = Some(start.elapsed().as_micros());
    result.exact = Some(exact);

    let fail = |reason: String, result: FaultQueryResult| FaultError::CertificationFailure {
        reason,
        result: Box::new(result),
    };
    match (result.interim_cost(), result.exact_cost()) {
        (Some(interim), Some(exact)) => {
            if result.interim.as_ref().unwrap().parent_edge.contains(&Some(f)) {
                return Err(fail("interim arborescence uses the failed edge".into(), result));
            }
            if interim < exact || i128::from(interim.0) > 2 * i128::from(exact.0) {
                return Err(fail(format!("interim cost {interim} outside [{exact}, 2 * {exact}]"), result));
            }
            result.ratio = Some(Ratio::new(interim.0, exact.0));
            Ok(result)
        }
        (None, None) => Ok(result),
        (Some(_), None) => Err(fail("H - f feasible but G - f is not".into(), result)),
        (None, Some(_)) => Err(fail("G - f feasible but H - f is not".into(), result)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Certify every edge of `G`, not only the tree edges.
    pub all_edges: bool,
    pub workers: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { all_edges: true, workers: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    /// Certified queries in fault-id order.
    pub rows: Vec<FaultQueryResult>,
    pub failures: Vec<FaultError>,
    pub max_ratio: Option<Ratio>,
    pub mean_ratio: Option<f64>,
}

impl SweepSummary {
    pub fn tree_faults(&self) -> usize {
        self.rows.iter().filter(|r| !r.reused_base_tree).count()
    }

    pub fn infeasible_faults(&self) -> Vec<EdgeId> {
        self.rows.iter().filter(|r| !r.feasible()).map(|r| r.fault).collect()
    }

    /// Columns: fault_id, interim_cost, exact_cost, ratio_num, ratio_den,
    /// t_H_micros, t_G_micros, feasible. Missing values are `-`.
    pub fn report_tsv(&self) -> String {
        let mut out = String::from("fault_id\tinterim_cost\texact_cost\tratio_num\tratio_den\tt_H_micros\tt_G_micros\tfeasible\n");
        let dash = || "-".to_string();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.fault,
                r.interim_cost().map_or_else(dash, |c| c.to_string()),
                r.exact_cost().map_or_else(dash, |c| c.to_string()),
                r.ratio.map_or_else(dash, |q| q.num.to_string()),
                r.ratio.map_or_else(dash, |q| q.den.to_string()),
                r.interim_micros,
                r.exact_micros.map_or_else(dash, |t| t.to_string()),
                r.feasible(),
            );
        }
        out
    }
}

/// Certifies every tree edge (and every other edge when `all_edges`).
pub fn sweep_all_faults(g: &Graph, h: &EftSubgraph, opts: SweepOptions) -> SweepSummary {
    let faults: Vec<EdgeId> = if opts.all_edges {
        (0..g.edge_count()).collect()
    } else {
        h.base_tree.edges()
    };
    let run = |&f: &EdgeId| certify(g, h, f);
    let outcomes: Vec<Result<FaultQueryResult, FaultError>> = if opts.workers <= 1 {
        faults.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.workers).build().expect("thread pool");
        pool.install(|| faults.par_iter().map(run).collect())
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(FaultError::CertificationFailure { reason, result }) => {
                rows.push((*result).clone());
                failures.push(FaultError::CertificationFailure { reason, result });
            }
            Err(e) => failures.push(e),
        }
    }
    let ratios: Vec<Ratio> = rows.iter().filter_map(|r| r.ratio).collect();
    let max_ratio = ratios.iter().copied().max();
    let mean_ratio = (!ratios.is_empty()).then(|| ratios.iter().map(|q| q.to_f64()).sum::<f64>() / ratios.len() as f64);
    SweepSummary { rows, failures, max_ratio, mean_ratio }
}
