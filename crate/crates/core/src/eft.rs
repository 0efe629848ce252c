//! Sparse single-edge-fault-tolerant subgraph: the min-cost arborescence plus
//! one replacement path per tree edge.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::arborescence::{min_cost_arborescence, Arborescence, Infeasible};
use crate::cost::Cost;
use crate::graph::{data_lines, EdgeId, Graph, GraphError, VertexId};
use crate::paths::{shortest_path_masked, PathKey};
use crate::perturb::{perturb_costs, PerturbedGraph};

/// The two sides of the base tree once the edge into `vertex` is deleted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePartition {
    pub vertex: VertexId,
    in_subtree: Vec<bool>,
}

impl TreePartition {
    /// `vertex` and its descendants.
    pub fn subtree(&self) -> Vec<VertexId> {
        (0..self.in_subtree.len()).filter(|&v| self.in_subtree[v]).collect()
    }

    /// The component containing the root.
    pub fn rest(&self) -> Vec<VertexId> {
        (0..self.in_subtree.len()).filter(|&v| !self.in_subtree[v]).collect()
    }

    pub fn in_subtree(&self, v: VertexId) -> bool {
        self.in_subtree[v]
    }
}

fn children(g: &Graph, t: &Arborescence) -> Vec<Vec<VertexId>> {
    let mut kids = vec![Vec::new(); g.vertex_count()];
    for v in g.vertices() {
        if let Some(p) = t.parent(g, v) {
            kids[p].push(v);
        }
    }
    kids
}

fn partition_with(kids: &[Vec<VertexId>], v: VertexId) -> TreePartition {
    let mut in_subtree = vec![false; kids.len()];
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        in_subtree[x] = true;
        stack.extend(&kids[x]);
    }
    TreePartition { vertex: v, in_subtree }
}

/// Splits the vertices of `t` into the subtree below `v` and the rest.
///
/// # Panics
/// If `v` is the root.
pub fn partition(g: &Graph, t: &Arborescence, v: VertexId) -> TreePartition {
    assert_ne!(v, g.root(), "the root has no tree edge to delete");
    partition_with(&children(g, t), v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStatus {
    Found,
    Unreachable,
}

/// Shortest path from the root side of the tree to `vertex` avoiding the tree
/// edge into `vertex`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementPath {
    /// 1-based position in processing order.
    pub index: usize,
    pub vertex: VertexId,
    pub fault_edge: EdgeId,
    pub status: PathStatus,
    pub entry_vertex: Option<VertexId>,
    pub vertices: Vec<VertexId>,
    pub key: Option<PathKey>,
    pub cost_tie: bool,
}

impl ReplacementPath {
    /// A found path given by its edges, e.g. for hand-built fixtures. The
    /// path must be non-empty and contiguous.
    pub fn from_edges(g: &Graph, index: usize, fault_edge: EdgeId, edges: Vec<EdgeId>) -> ReplacementPath {
        assert!(!edges.is_empty(), "replacement path needs at least one edge");
        let mut vertices = vec![g.edge(edges[0]).tail];
        for &e in &edges {
            assert_eq!(g.edge(e).tail, *vertices.last().unwrap(), "edges must form a path");
            vertices.push(g.edge(e).head);
        }
        ReplacementPath {
            index,
            vertex: *vertices.last().unwrap(),
            fault_edge,
            status: PathStatus::Found,
            entry_vertex: Some(vertices[0]),
            vertices,
            key: Some(PathKey::of(g, edges)),
            cost_tie: false,
        }
    }

    pub fn edges(&self) -> &[EdgeId] {
        self.key.as_ref().map_or(&[], |k| &k.edges)
    }

    pub fn cost(&self) -> Option<Cost> {
        self.key.as_ref().map(|k| k.cost)
    }
}

fn replacement_path_with(g: &Graph, t: &Arborescence, kids: &[Vec<VertexId>], index: usize, v: VertexId) -> ReplacementPath {
    let part = partition_with(kids, v);
    let fault_edge = t.parent_edge[v].expect("non-root vertex has a tree edge");
    match shortest_path_masked(g, &|x| !part.in_subtree[x], v, &|e| e == fault_edge) {
        Ok(p) => ReplacementPath {
            index,
            vertex: v,
            fault_edge,
            status: PathStatus::Found,
            entry_vertex: Some(p.start()),
            vertices: p.vertices,
            key: Some(p.key),
            cost_tie: p.cost_tie,
        },
        Err(_) => ReplacementPath {
            index,
            vertex: v,
            fault_edge,
            status: PathStatus::Unreachable,
            entry_vertex: None,
            vertices: Vec::new(),
            key: None,
            cost_tie: false,
        },
    }
}

/// Replacement path for the tree edge entering `v` (`v` is not the root).
pub fn replacement_path(g: &Graph, t: &Arborescence, v: VertexId) -> ReplacementPath {
    assert_ne!(v, g.root(), "the root has no tree edge");
    let index = if v < g.root() { v + 1 } else { v };
    replacement_path_with(g, t, &children(g, t), index, v)
}

/// The fault-tolerant subgraph `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EftSubgraph {
    pub vertex_count: usize,
    pub base_tree: Arborescence,
    /// One entry per non-root vertex in ascending id order; empty when the
    /// subgraph was loaded from a file.
    pub paths: Vec<ReplacementPath>,
    /// Sorted, de-duplicated edge ids of `H`.
    pub edge_set: Vec<EdgeId>,
    /// Edge id to the 1-based index of the first path containing it.
    pub provenance: Option<BTreeMap<EdgeId, usize>>,
}

impl EftSubgraph {
    /// Assembles `H` from a base tree and replacement paths given in index
    /// order, recording which path first contributed each edge.
    pub fn from_paths(g: &Graph, base_tree: Arborescence, paths: Vec<ReplacementPath>) -> EftSubgraph {
        let mut provenance = BTreeMap::new();
        for p in &paths {
            for &e in p.edges() {
                provenance.entry(e).or_insert(p.index);
            }
        }
        let mut edge_set = base_tree.edges();
        edge_set.extend(provenance.keys().copied());
        edge_set.sort_unstable();
        edge_set.dedup();
        EftSubgraph { vertex_count: g.vertex_count(), base_tree, paths, edge_set, provenance: Some(provenance) }
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edge_set.binary_search(&e).is_ok()
    }

    /// Sorted edge ids of the union of all replacement paths.
    pub fn path_union(&self) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self.paths.iter().flat_map(|p| p.edges().iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Edges of `H` outside the base tree.
    pub fn extra_edges(&self) -> Vec<EdgeId> {
        let tree = self.base_tree.edges();
        self.edge_set.iter().copied().filter(|e| tree.binary_search(e).is_err()).collect()
    }

    pub fn path_for_vertex(&self, v: VertexId) -> Option<&ReplacementPath> {
        self.paths.iter().find(|p| p.vertex == v)
    }

    pub fn cost_ties(&self) -> usize {
        self.paths.iter().filter(|p| p.cost_tie).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub workers: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { workers: 1 }
    }
}

pub fn build_eft_subgraph(g: &Graph) -> Result<EftSubgraph, Infeasible> {
    build_eft_subgraph_with(g, BuildOptions::default())
}

/// Computes the base tree once, then one replacement path per non-root vertex
/// (in parallel when `workers > 1`). Assembly runs in vertex order.
pub fn build_eft_subgraph_with(g: &Graph, opts: BuildOptions) -> Result<EftSubgraph, Infeasible> {
    let tree = min_cost_arborescence(g)?;
    let kids = children(g, &tree);
    let labels: Vec<VertexId> = g.vertices().filter(|&v| v != g.root()).collect();
    let compute = |(i, &v): (usize, &VertexId)| replacement_path_with(g, &tree, &kids, i + 1, v);
    let paths: Vec<ReplacementPath> = if opts.workers <= 1 {
        labels.iter().enumerate().map(compute).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .expect("thread pool");
        pool.install(|| labels.par_iter().enumerate().map(compute).collect())
    };

    Ok(EftSubgraph::from_paths(g, tree, paths))
}

/// Subgraph built on perturbed costs, together with the perturbation used.
#[derive(Debug, Clone)]
pub struct PerturbedBuild {
    pub subgraph: EftSubgraph,
    pub perturbation: PerturbedGraph,
    /// Seeds tried before the accepted one.
    pub redraws: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Infeasible(#[from] Infeasible),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Builds on a seeded perturbation of `g`. A build whose replacement paths
/// still saw equal-cost competitors is redrawn with the next seed, at most
/// `max_redraws` times; the last attempt is kept either way.
pub fn build_perturbed(g: &Graph, seed: u64, max_redraws: u32, opts: BuildOptions) -> Result<PerturbedBuild, BuildError> {
    let mut attempt = 0;
    loop {
        let perturbation = perturb_costs(g, seed.wrapping_add(u64::from(attempt)))?;
        let subgraph = build_eft_subgraph_with(&perturbation.graph, opts)?;
        if subgraph.cost_ties() == 0 || attempt >= max_redraws {
            return Ok(PerturbedBuild { subgraph, perturbation, redraws: attempt });
        }
        attempt += 1;
    }
}

impl EftSubgraph {
    /// Edge-list serialization of `H` against the graph it was built from.
    /// The base tree is recorded in a `# tree` comment so a reloaded subgraph
    /// answers queries exactly like the in-memory one.
    pub fn serialize(&self, g: &Graph, header: &[String]) -> String {
        let mut comments = header.to_vec();
        let mut tree = String::from("tree");
        for e in self.base_tree.edges() {
            let _ = write!(tree, " {e}");
        }
        comments.push(tree);
        g.write_edge_list(self.edge_set.iter().copied(), &comments)
    }

    /// `edge_id first_path_index` rows; base-tree edges on no path get 0.
    pub fn provenance_tsv(&self) -> Option<String> {
        let prov = self.provenance.as_ref()?;
        let mut out = String::from("edge_id\tfirst_path_index\n");
        for &e in &self.edge_set {
            let _ = writeln!(out, "{e}\t{}", prov.get(&e).copied().unwrap_or(0));
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubgraphError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("line {line}: missing `# id=<k>` column")]
    MissingId { line: usize },
    #[error("line {line}: edge {id} does not match the graph")]
    Mismatch { line: usize, id: EdgeId },
    #[error("subgraph tree is not an arborescence of the graph: {0}")]
    BadTree(String),
}

/// Reads a subgraph written by [`EftSubgraph::serialize`] against `g`.
///
/// Without a `# tree` line the base tree is recomputed as a min-cost
/// arborescence of `H`.
pub fn load_subgraph(g: &Graph, text: &str) -> Result<EftSubgraph, SubgraphError> {
    // Structural checks (header, edge count, cost syntax) first.
    let sub = Graph::parse(text)?;
    if sub.vertex_count() != g.vertex_count() || sub.root() != g.root() {
        return Err(SubgraphError::BadTree("vertex count or root differs from the graph".into()));
    }
    let mut tree_ids: Option<Vec<EdgeId>> = None;
    let mut edge_set = Vec::new();
    let mut header_seen = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, c.trim()),
            None => (raw, ""),
        };
        if body.trim().is_empty() {
            if let Some(rest) = comment.strip_prefix("tree") {
                let ids: Result<Vec<EdgeId>, _> = rest.split_whitespace().map(str::parse).collect();
                tree_ids = Some(ids.map_err(|_| SubgraphError::BadTree(format!("line {line}: bad tree list")))?);
            }
            continue;
        }
        if !header_seen {
            header_seen = true;
            continue;
        }
        let id: EdgeId = comment
            .strip_prefix("id=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or(SubgraphError::MissingId { line })?;
        let fields: Vec<&str> = body.split_whitespace().collect();
        let expected = g.edges().get(id).ok_or(SubgraphError::Mismatch { line, id })?;
        let matches = fields[0].parse() == Ok(expected.tail)
            && fields[1].parse() == Ok(expected.head)
            && fields[2].parse() == Ok(expected.cost);
        if !matches {
            return Err(SubgraphError::Mismatch { line, id });
        }
        edge_set.push(id);
    }
    debug_assert_eq!(data_lines(text).count(), edge_set.len() + 1);
    edge_set.sort_unstable();
    edge_set.dedup();

    let base_tree = match tree_ids {
        Some(ids) => {
            let mut parent_edge = vec![None; g.vertex_count()];
            for &e in &ids {
                if e >= g.edge_count() || edge_set.binary_search(&e).is_err() {
                    return Err(SubgraphError::BadTree(format!("edge {e} is not in the subgraph")));
                }
                parent_edge[g.edge(e).head] = Some(e);
            }
            let total_cost = ids.iter().map(|&e| g.edge(e).cost).sum();
            let t = Arborescence { root: g.root(), parent_edge, total_cost };
            crate::arborescence::validate_arborescence(g, &t).map_err(|v| SubgraphError::BadTree(v.to_string()))?;
            t
        }
        None => crate::arborescence::min_cost_arborescence_filtered(g, &|e| edge_set.binary_search(&e).is_ok())
            .map_err(|e| SubgraphError::BadTree(e.to_string()))?,
    };
    Ok(EftSubgraph { vertex_count: g.vertex_count(), base_tree, paths: Vec::new(), edge_set, provenance: None })
}
