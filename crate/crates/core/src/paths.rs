//! Deterministic shortest paths under the `PathKey` total order.
//!
//! Every search runs backward from the target over the reverse view, so one
//! run answers "nearest source to target" queries (replacement paths) and
//! "shortest path from every vertex to target" queries (charging analysis).

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::cost::Cost;
use crate::graph::{EdgeId, Graph, VertexId};

/// Sort key of a path: total cost, then edge count, then the edge-id
/// sequence compared lexicographically.
///
/// Prepending or appending the same edges to two paths preserves their
/// order, so every subpath of a minimal path is itself minimal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathKey {
    pub cost: Cost,
    pub hops: usize,
    pub edges: Vec<EdgeId>,
}

impl PathKey {
    pub fn of(g: &Graph, edges: Vec<EdgeId>) -> PathKey {
        PathKey { cost: edges.iter().map(|&e| g.edge(e).cost).sum(), hops: edges.len(), edges }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub key: PathKey,
    /// `hops + 1` vertices from the start vertex to the target.
    pub vertices: Vec<VertexId>,
    /// Another path with the same total cost competed for the result or for
    /// one of its suffixes; the winner was picked by the `PathKey` tie-break.
    pub cost_tie: bool,
}

impl Path {
    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.key.edges
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no path reaches vertex {target}")]
pub struct Unreachable {
    pub target: VertexId,
}

/// Per-vertex result of a backward search: the first edge of the minimal path
/// from that vertex to the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Label {
    cost: Cost,
    hops: usize,
    first_edge: EdgeId,
}

impl Label {
    fn rank(&self) -> (Cost, usize, EdgeId) {
        (self.cost, self.hops, self.first_edge)
    }
}

const NO_EDGE: EdgeId = EdgeId::MAX;

/// Backward shortest-path tree towards one target.
#[derive(Debug, Clone)]
pub struct PathsToTarget {
    target: VertexId,
    labels: Vec<Option<Label>>,
    tied: Vec<bool>,
}

impl PathsToTarget {
    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn cost_from(&self, v: VertexId) -> Option<Cost> {
        self.labels[v].map(|l| l.cost)
    }

    /// The minimal path from `v` to the target as edge ids.
    pub fn edges_from(&self, g: &Graph, mut v: VertexId) -> Option<Vec<EdgeId>> {
        let mut out = Vec::with_capacity(self.labels[v]?.hops);
        while v != self.target {
            let e = self.labels[v]?.first_edge;
            out.push(e);
            v = g.edge(e).head;
        }
        Some(out)
    }

    pub fn path_from(&self, g: &Graph, v: VertexId) -> Option<Path> {
        let edges = self.edges_from(g, v)?;
        let mut vertices = Vec::with_capacity(edges.len() + 1);
        vertices.push(v);
        vertices.extend(edges.iter().map(|&e| g.edge(e).head));
        Some(Path { key: PathKey::of(g, edges), vertices, cost_tie: self.tied[v] })
    }
}

/// Dijkstra from `target` over the reverse graph, skipping banned edges.
///
/// Vertices settle in `(cost, hops, first edge id)` order. When `is_source`
/// is given the search stops once the minimal source and every source of
/// equal cost have settled; the minimal source is returned.
fn backward_search(
    g: &Graph,
    target: VertexId,
    banned: &dyn Fn(EdgeId) -> bool,
    is_source: Option<&dyn Fn(VertexId) -> bool>,
) -> (PathsToTarget, Option<VertexId>) {
    let n = g.vertex_count();
    let rev = g.reverse();
    let mut labels: Vec<Option<Label>> = vec![None; n];
    let mut tied = vec![false; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    labels[target] = Some(Label { cost: Cost::ZERO, hops: 0, first_edge: NO_EDGE });
    heap.push(Reverse((Cost::ZERO, 0usize, NO_EDGE, target)));
    let mut found: Option<VertexId> = None;

    while let Some(Reverse((cost, hops, first_edge, w))) = heap.pop() {
        if settled[w] || labels[w].map(|l| l.rank()) != Some((cost, hops, first_edge)) {
            continue;
        }
        if let Some(src) = found {
            if cost > labels[src].unwrap().cost {
                break;
            }
        }
        settled[w] = true;
        if w != target {
            tied[w] |= tied[g.edge(first_edge).head];
        }
        if let Some(is_source) = is_source {
            if is_source(w) {
                match found {
                    None => found = Some(w),
                    // Equal-cost source settling after the winner.
                    Some(src) => tied[src] = true,
                }
                continue;
            }
            if found.is_some() {
                continue;
            }
        }
        for &e in rev.out_edges(w) {
            if banned(e) {
                continue;
            }
            let u = g.edge(e).tail;
            if settled[u] {
                continue;
            }
            let cand = Label { cost: cost + g.edge(e).cost, hops: hops + 1, first_edge: e };
            match labels[u] {
                Some(old) => {
                    match cand.cost.cmp(&old.cost) {
                        Ordering::Less => tied[u] = false,
                        Ordering::Equal => tied[u] = true,
                        Ordering::Greater => {}
                    }
                    if cand.rank() < old.rank() {
                        labels[u] = Some(cand);
                        heap.push(Reverse((cand.cost, cand.hops, cand.first_edge, u)));
                    }
                }
                None => {
                    labels[u] = Some(cand);
                    heap.push(Reverse((cand.cost, cand.hops, cand.first_edge, u)));
                }
            }
        }
    }
    // Only settled labels are final.
    for v in 0..n {
        if !settled[v] {
            labels[v] = None;
        }
    }
    (PathsToTarget { target, labels, tied }, found)
}

/// The `PathKey`-minimal path from any vertex in `sources` to `target` that
/// avoids every edge in `banned`.
pub fn shortest_path(
    g: &Graph,
    sources: &[VertexId],
    target: VertexId,
    banned: &[EdgeId],
) -> Result<Path, Unreachable> {
    let mut src_mask = vec![false; g.vertex_count()];
    for &s in sources {
        src_mask[s] = true;
    }
    let mut ban_mask = vec![false; g.edge_count()];
    for &e in banned {
        ban_mask[e] = true;
    }
    shortest_path_masked(g, &|v| src_mask[v], target, &|e| ban_mask[e])
}

pub(crate) fn shortest_path_masked(
    g: &Graph,
    is_source: &dyn Fn(VertexId) -> bool,
    target: VertexId,
    banned: &dyn Fn(EdgeId) -> bool,
) -> Result<Path, Unreachable> {
    let (tree, found) = backward_search(g, target, banned, Some(is_source));
    let start = found.ok_or(Unreachable { target })?;
    Ok(tree.path_from(g, start).expect("settled source has a path"))
}

/// Minimal paths from every vertex to `target`, avoiding `banned`.
pub fn shortest_paths_to(g: &Graph, target: VertexId, banned: &[EdgeId]) -> PathsToTarget {
    let mut ban_mask = vec![false; g.edge_count()];
    for &e in banned {
        ban_mask[e] = true;
    }
    backward_search(g, target, &|e| ban_mask[e], None).0
}
