//! Instrumentation of the charging argument that bounds the size of the
//! replacement-path union.
//!
//! Every edge on some replacement path gets the index of the first path that
//! contains it as its color. Color `i` is charged to an ordered pair `(x, y)`
//! when path `i` runs from `x` to `y`, leaves `x` on an edge of color `i` and
//! enters `y` on an edge of color `i`. A pair should receive at most three
//! colors: at most one whose subpath is edge-disjoint from the canonical
//! shortest path `SP(x, y)` and at most two whose subpath shares an edge with
//! it. The per-color pair counts then give `|union|^2 <= 6 n^3`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::eft::{EftSubgraph, PathStatus};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::paths::{shortest_paths_to, PathsToTarget};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorAssignment {
    pub color: BTreeMap<EdgeId, usize>,
    /// `per_color_count[i]` = number of edges colored `i`; index 0 is unused.
    pub per_color_count: Vec<usize>,
}

impl ColorAssignment {
    pub fn color_of(&self, e: EdgeId) -> Option<usize> {
        self.color.get(&e).copied()
    }

    pub fn colored_edges(&self) -> usize {
        self.color.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ChargingError {
    #[error("subgraph carries no path provenance (was it loaded from a file?)")]
    MissingProvenance,
    #[error("check limited to {max} vertices, got {n}")]
    InstanceTooLarge { n: usize, max: usize },
}

pub fn color_edges(h: &EftSubgraph) -> Result<ColorAssignment, ChargingError> {
    let prov = h.provenance.as_ref().ok_or(ChargingError::MissingProvenance)?;
    let colors = h.paths.iter().map(|p| p.index).max().unwrap_or(0);
    let mut per_color_count = vec![0; colors + 1];
    for &i in prov.values() {
        per_color_count[i] += 1;
    }
    Ok(ColorAssignment { color: prov.clone(), per_color_count })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairClass {
    /// The subpath shares an edge with `SP(x, y)`.
    Intersecting,
    /// The subpath is edge-disjoint from `SP(x, y)`.
    NonIntersecting,
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairClass::Intersecting => "intersecting",
            PairClass::NonIntersecting => "non-intersecting",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Charge {
    pub color: usize,
    pub class: PairClass,
    /// The `x -> y` subpath of the charging path.
    pub subpath: Vec<EdgeId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChargeLedger {
    pub vertex_count: usize,
    /// Charges per ordered pair, sorted by color.
    pub charges: BTreeMap<(VertexId, VertexId), Vec<Charge>>,
    /// Number of pairs charged by each color; index 0 is unused.
    pub pairs_per_color: Vec<usize>,
    /// `SP(x, y)` for every charged pair.
    pub canonical: BTreeMap<(VertexId, VertexId), Vec<EdgeId>>,
}

impl ChargeLedger {
    pub fn total_charges(&self) -> usize {
        self.charges.values().map(Vec::len).sum()
    }

    pub fn max_colors_per_pair(&self) -> usize {
        self.charges.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Columns: x, y, colors (comma list), classes (comma list, same order).
    pub fn report_tsv(&self) -> String {
        let mut out = String::from("x\ty\tcolors\tclasses\n");
        for ((x, y), charges) in &self.charges {
            let colors: Vec<String> = charges.iter().map(|c| c.color.to_string()).collect();
            let classes: Vec<String> = charges.iter().map(|c| c.class.to_string()).collect();
            let _ = writeln!(out, "{x}\t{y}\t{}\t{}", colors.join(","), classes.join(","));
        }
        out
    }
}

fn edge_disjoint(a: &[EdgeId], b: &[EdgeId]) -> bool {
    a.iter().all(|e| !b.contains(e))
}

/// Canonical shortest paths in `g`, one backward tree per target.
struct CanonicalPaths<'g> {
    g: &'g Graph,
    trees: HashMap<VertexId, PathsToTarget>,
}

impl<'g> CanonicalPaths<'g> {
    fn for_targets(g: &'g Graph, targets: BTreeSet<VertexId>) -> Self {
        let trees = targets
            .into_par_iter()
            .map(|y| (y, shortest_paths_to(g, y, &[])))
            .collect();
        CanonicalPaths { g, trees }
    }

    fn path(&self, x: VertexId, y: VertexId) -> Vec<EdgeId> {
        self.trees[&y].edges_from(self.g, x).expect("y is reachable from x along a replacement path")
    }
}

/// Position pairs `(p, q)`, `p < q`, on path `i` at which color `i` is charged.
fn charged_positions(edges: &[EdgeId], color: usize, ca: &ColorAssignment) -> Vec<(usize, usize)> {
    let fresh: Vec<bool> = edges.iter().map(|&e| ca.color_of(e) == Some(color)).collect();
    let mut out = Vec::new();
    for p in 0..edges.len() {
        if !fresh[p] {
            continue;
        }
        // Vertex q is entered by edge q - 1.
        for q in p + 1..=edges.len() {
            if fresh[q - 1] {
                out.push((p, q));
            }
        }
    }
    out
}

/// Scans every replacement path for charged pairs and classifies each charge
/// against `SP(x, y)` in `g`, the graph the subgraph was built on.
pub fn compute_charges(g: &Graph, h: &EftSubgraph, ca: &ColorAssignment) -> ChargeLedger {
    let found: Vec<_> = h.paths.iter().filter(|p| p.status == PathStatus::Found).collect();
    let per_path: Vec<(usize, Vec<(usize, usize)>)> = found
        .par_iter()
        .map(|p| (p.index, charged_positions(p.edges(), p.index, ca)))
        .collect();
    let targets: BTreeSet<VertexId> = found
        .iter()
        .zip(&per_path)
        .flat_map(|(p, (_, pos))| pos.iter().map(|&(_, q)| p.vertices[q]))
        .collect();
    let sp = CanonicalPaths::for_targets(g, targets);

    let colors = ca.per_color_count.len().max(1);
    let mut ledger = ChargeLedger { vertex_count: g.vertex_count(), pairs_per_color: vec![0; colors], ..Default::default() };
    for (p, (color, positions)) in found.iter().zip(per_path) {
        for (a, b) in positions {
            let (x, y) = (p.vertices[a], p.vertices[b]);
            let subpath = p.edges()[a..b].to_vec();
            let canonical = ledger.canonical.entry((x, y)).or_insert_with(|| sp.path(x, y));
            let class = if edge_disjoint(&subpath, canonical) {
                PairClass::NonIntersecting
            } else {
                PairClass::Intersecting
            };
            ledger.charges.entry((x, y)).or_default().push(Charge { color, class, subpath });
            ledger.pairs_per_color[color] += 1;
        }
    }
    ledger
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChargeStats {
    pub charged_pairs: usize,
    pub total_charges: usize,
    pub max_colors: usize,
    pub max_intersecting: usize,
    pub max_non_intersecting: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeViolation {
    pub pair: (VertexId, VertexId),
    pub charges: Vec<Charge>,
    pub canonical: Vec<EdgeId>,
    pub intersecting: usize,
    pub non_intersecting: usize,
}

impl fmt::Display for ChargeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pair ({}, {}) charged by {} colors ({} intersecting, {} non-intersecting); SP = {:?}",
            self.pair.0,
            self.pair.1,
            self.charges.len(),
            self.intersecting,
            self.non_intersecting,
            self.canonical
        )?;
        for c in &self.charges {
            write!(f, "; color {} {} via {:?}", c.color, c.class, c.subpath)?;
        }
        Ok(())
    }
}

/// Ok when every pair carries at most three colors, at most one of them
/// non-intersecting and at most two intersecting.
pub fn check_charge_bound(cl: &ChargeLedger) -> Result<ChargeStats, Box<ChargeViolation>> {
    let mut stats = ChargeStats { charged_pairs: cl.charges.len(), total_charges: cl.total_charges(), ..Default::default() };
    for (&pair, charges) in &cl.charges {
        let inter = charges.iter().filter(|c| c.class == PairClass::Intersecting).count();
        let non = charges.len() - inter;
        stats.max_colors = stats.max_colors.max(charges.len());
        stats.max_intersecting = stats.max_intersecting.max(inter);
        stats.max_non_intersecting = stats.max_non_intersecting.max(non);
        if charges.len() > 3 || inter > 2 || non > 1 {
            return Err(Box::new(ChargeViolation {
                pair,
                charges: charges.clone(),
                canonical: cl.canonical.get(&pair).cloned().unwrap_or_default(),
                intersecting: inter,
                non_intersecting: non,
            }));
        }
    }
    Ok(stats)
}

/// Colors whose charged-pair count exceeds `c_i (c_i + 1) / 2`, as
/// `(color, pairs, c_i)`.
pub fn per_color_excess(cl: &ChargeLedger, ca: &ColorAssignment) -> Vec<(usize, usize, usize)> {
    cl.pairs_per_color
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(i, &pairs)| {
            let c = ca.per_color_count.get(i).copied().unwrap_or(0);
            (pairs > c * (c + 1) / 2).then_some((i, pairs, c))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeExcess {
    pub union_size: usize,
    pub n: usize,
}

impl fmt::Display for SizeExcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} path edges exceed sqrt(6) * {}^1.5", self.union_size, self.n)
    }
}

/// `|union of paths|^2 <= 6 n^3`, in exact integer arithmetic.
pub fn check_size_bound(h: &EftSubgraph) -> Result<usize, SizeExcess> {
    let union_size = h.path_union().len();
    let n = h.vertex_count as u128;
    if (union_size as u128).pow(2) <= 6 * n.pow(3) {
        Ok(union_size)
    } else {
        Err(SizeExcess { union_size, n: h.vertex_count })
    }
}

/// `(path index, edges)`.
type IndexedSubpath = (usize, Vec<EdgeId>);

pub const DISJOINT_CHECK_MAX_VERTICES: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointCounterexample {
    pub pair: (VertexId, VertexId),
    pub canonical: Vec<EdgeId>,
    /// Two different edge-disjoint subpaths as `(path index, edges)`.
    pub first: (usize, Vec<EdgeId>),
    pub second: (usize, Vec<EdgeId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DisjointCheck {
    Ok { pairs_checked: usize },
    Counterexample(Box<DisjointCounterexample>),
}

/// For every pair `(x, y)`, all replacement-path subpaths from `x` to `y`
/// that avoid every edge of `SP(x, y)` must coincide.
pub fn check_disjoint_uniqueness(g: &Graph, h: &EftSubgraph) -> Result<DisjointCheck, ChargingError> {
    let n = g.vertex_count();
    if n > DISJOINT_CHECK_MAX_VERTICES {
        return Err(ChargingError::InstanceTooLarge { n, max: DISJOINT_CHECK_MAX_VERTICES });
    }
    let mut subpaths: BTreeMap<(VertexId, VertexId), Vec<IndexedSubpath>> = BTreeMap::new();
    for p in h.paths.iter().filter(|p| p.status == PathStatus::Found) {
        let edges = p.edges();
        for a in 0..edges.len() {
            for b in a + 1..=edges.len() {
                subpaths
                    .entry((p.vertices[a], p.vertices[b]))
                    .or_default()
                    .push((p.index, edges[a..b].to_vec()));
            }
        }
    }
    subpaths.retain(|_, v| v.len() > 1);
    let targets: BTreeSet<VertexId> = subpaths.keys().map(|&(_, y)| y).collect();
    let sp = CanonicalPaths::for_targets(g, targets);
    for (&(x, y), candidates) in &subpaths {
        let canonical = sp.path(x, y);
        let mut disjoint = candidates.iter().filter(|(_, s)| edge_disjoint(s, &canonical));
        if let Some(first) = disjoint.next() {
            if let Some(second) = disjoint.find(|(_, s)| *s != first.1) {
                return Ok(DisjointCheck::Counterexample(Box::new(DisjointCounterexample {
                    pair: (x, y),
                    canonical,
                    first: first.clone(),
                    second: second.clone(),
                })));
            }
        }
    }
    Ok(DisjointCheck::Ok { pairs_checked: subpaths.len() })
}
