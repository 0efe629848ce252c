//! Rooted directed multigraphs, the edge-list text format and the reverse view.

use std::fmt::Write as _;

use crate::cost::{Cost, CostParseError};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Largest edge cost accepted by [`Graph::new`], in scaled units.
///
/// Keeps the cost of any simple path or arborescence (at most `n - 1` edges)
/// inside `i64` for graphs up to 8192 vertices.
pub const MAX_EDGE_COST: Cost = Cost(1 << 50);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
    pub cost: Cost,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: negative cost {cost}")]
    NegativeCost { line: usize, cost: Cost },
    #[error("line {line}: edge into the root vertex {root}")]
    EdgeIntoRoot { line: usize, root: VertexId },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: VertexId },
    #[error("scaled costs overflow 64-bit integers")]
    Overflow,
}

fn malformed(line: usize, reason: impl Into<String>) -> GraphError {
    GraphError::MalformedLine { line, reason: reason.into() }
}

/// Directed weighted multigraph with a designated root that has no in-edges.
///
/// Immutable after construction. Edge ids are dense and follow insertion
/// order; per-vertex out- and in-edge lists are sorted by edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    root: VertexId,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl Graph {
    /// Builds a graph from `(tail, head, cost)` triples.
    ///
    /// Errors report the line the edge would occupy in the edge-list format
    /// (edge `i` sits on line `i + 2`).
    pub fn new(
        n: usize,
        root: VertexId,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Cost)>,
    ) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(malformed(1, "graph needs at least one vertex"));
        }
        if root >= n {
            return Err(malformed(1, format!("root {root} out of range for n = {n}")));
        }
        let mut g = Graph {
            n,
            root,
            edges: Vec::new(),
            out_edges: vec![Vec::new(); n],
            in_edges: vec![Vec::new(); n],
        };
        for (idx, (tail, head, cost)) in edges.into_iter().enumerate() {
            let line = idx + 2;
            if tail >= n || head >= n {
                return Err(malformed(line, format!("vertex out of range for n = {n}")));
            }
            if tail == head {
                return Err(GraphError::SelfLoop { line, vertex: tail });
            }
            if head == root {
                return Err(GraphError::EdgeIntoRoot { line, root });
            }
            if cost.is_negative() {
                return Err(GraphError::NegativeCost { line, cost });
            }
            if cost > MAX_EDGE_COST {
                return Err(malformed(line, format!("cost {cost} exceeds {MAX_EDGE_COST}")));
            }
            let id = g.edges.len();
            g.edges.push(Edge { id, tail, head, cost });
            g.out_edges[tail].push(id);
            g.in_edges[head].push(id);
        }
        Ok(g)
    }

    /// Parses the edge-list format: a `n m root` header followed by `m` lines
    /// of `tail head cost`. `#` starts a comment; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut records = data_lines(text);
        let (header_line, header) = records
            .next()
            .ok_or_else(|| malformed(1, "missing `n m root` header"))?;
        let [n, m, root] = parse_fields::<3>(header_line, &header, "`n m root`")?;
        let mut triples = Vec::with_capacity(m);
        let mut lines = Vec::with_capacity(m);
        for (line, fields) in records.by_ref().take(m) {
            if fields.len() != 3 {
                return Err(malformed(line, "expected `tail head cost`"));
            }
            let tail = parse_usize(line, fields[0])?;
            let head = parse_usize(line, fields[1])?;
            let cost: Cost = fields[2].parse().map_err(|e: CostParseError| malformed(line, e.to_string()))?;
            triples.push((tail, head, cost));
            lines.push(line);
        }
        if triples.len() != m {
            return Err(malformed(
                header_line,
                format!("header declares {m} edges but {} were found", triples.len()),
            ));
        }
        if let Some((line, _)) = records.next() {
            return Err(malformed(line, format!("more than the declared {m} edges")));
        }
        // Re-map the synthetic line numbers of Graph::new onto real ones.
        Graph::new(n, root, triples).map_err(|e| relocate(e, header_line, &lines))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v]
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n
    }

    pub fn reverse(&self) -> ReverseView<'_> {
        ReverseView { graph: self }
    }

    /// Same vertices and root, with every edge cost replaced.
    pub(crate) fn with_costs(&self, costs: impl Fn(&Edge) -> Cost) -> Graph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.cost = costs(e);
        }
        g
    }

    /// Serializes the given edges in the edge-list format, keeping original
    /// edge ids in a trailing `# id=<k>` comment. `comments` are emitted as
    /// leading `#` lines.
    pub fn write_edge_list(&self, edges: impl IntoIterator<Item = EdgeId>, comments: &[String]) -> String {
        let ids: Vec<EdgeId> = edges.into_iter().collect();
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{} {} {}", self.n, ids.len(), self.root);
        for id in ids {
            let e = &self.edges[id];
            let _ = writeln!(out, "{} {} {} # id={}", e.tail, e.head, e.cost, e.id);
        }
        out
    }

    /// The whole graph in the edge-list format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.edges.len(), self.root);
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.tail, e.head, e.cost);
        }
        out
    }
}

fn relocate(err: GraphError, header_line: usize, lines: &[usize]) -> GraphError {
    let real = |line: usize| if line >= 2 { lines[line - 2] } else { header_line };
    match err {
        GraphError::MalformedLine { line, reason } => GraphError::MalformedLine { line: real(line), reason },
        GraphError::NegativeCost { line, cost } => GraphError::NegativeCost { line: real(line), cost },
        GraphError::EdgeIntoRoot { line, root } => GraphError::EdgeIntoRoot { line: real(line), root },
        GraphError::SelfLoop { line, vertex } => GraphError::SelfLoop { line: real(line), vertex },
        GraphError::Overflow => GraphError::Overflow,
    }
}

/// Non-empty lines with comments stripped, as `(1-based line number, fields)`.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

pub(crate) fn parse_usize(line: usize, field: &str) -> Result<usize, GraphError> {
    field
        .parse()
        .map_err(|_| malformed(line, format!("expected a non-negative integer, found `{field}`")))
}

fn parse_fields<const N: usize>(line: usize, fields: &[&str], what: &str) -> Result<[usize; N], GraphError> {
    if fields.len() != N {
        return Err(malformed(line, format!("expected {what}")));
    }
    let mut out = [0usize; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = parse_usize(line, f)?;
    }
    Ok(out)
}

/// Read-only view of a graph with every edge reversed.
///
/// Edge ids and costs are unchanged. The root invariant does not apply here.
#[derive(Debug, Clone, Copy)]
pub struct ReverseView<'a> {
    graph: &'a Graph,
}

impl<'a> ReverseView<'a> {
    pub fn vertex_count(&self) -> usize {
        self.graph.n
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        let e = self.graph.edges[id];
        Edge { tail: e.head, head: e.tail, ..e }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + 'a {
        let g = self.graph;
        g.edges.iter().map(|e| Edge { tail: e.head, head: e.tail, ..*e })
    }

    pub fn out_edges(&self, v: VertexId) -> &'a [EdgeId] {
        &self.graph.in_edges[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &'a [EdgeId] {
        &self.graph.out_edges[v]
    }

    /// Undoes the reversal.
    pub fn reverse(self) -> &'a Graph {
        self.graph
    }
}
