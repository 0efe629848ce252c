//! Min-cost arborescences: Edmonds' contraction algorithm, an exhaustive
//! oracle for small graphs and an invariant checker.

use std::fmt;
use std::fmt::Write as _;

use crate::cost::Cost;
use crate::graph::{Edge, EdgeId, Graph, VertexId};

/// Spanning in-tree rooted at the graph root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arborescence {
    pub root: VertexId,
    /// `parent_edge[v]` is the edge entering `v`; `None` only at the root.
    pub parent_edge: Vec<Option<EdgeId>>,
    pub total_cost: Cost,
}

impl Arborescence {
    /// Tree edges sorted by id.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self.parent_edge.iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }

    pub fn contains(&self, g: &Graph, e: EdgeId) -> bool {
        self.parent_edge[g.edge(e).head] == Some(e)
    }

    pub fn parent(&self, g: &Graph, v: VertexId) -> Option<VertexId> {
        self.parent_edge[v].map(|e| g.edge(e).tail)
    }

    /// `v parent_edge_id` lines followed by a `cost=` trailer.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (v, e) in self.parent_edge.iter().enumerate() {
            if let Some(e) = e {
                let _ = writeln!(out, "{v} {e}");
            }
        }
        let _ = writeln!(out, "cost={}", self.total_cost);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no arborescence: vertex {unreachable} is unreachable from the root")]
pub struct Infeasible {
    pub unreachable: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum BruteForceError {
    #[error("exhaustive search is limited to {max} vertices, got {n}")]
    InstanceTooLarge { n: usize, max: usize },
    #[error(transparent)]
    Infeasible(#[from] Infeasible),
}

pub const BRUTE_FORCE_MAX_VERTICES: usize = 10;

pub fn min_cost_arborescence(g: &Graph) -> Result<Arborescence, Infeasible> {
    min_cost_arborescence_filtered(g, &|_| true)
}

/// Min-cost arborescence of the spanning subgraph made of the edges for which
/// `keep` holds.
pub fn min_cost_arborescence_filtered(g: &Graph, keep: &dyn Fn(EdgeId) -> bool) -> Result<Arborescence, Infeasible> {
    let n = g.vertex_count();
    let root = g.root();
    let mut heaps = LeftistHeaps::with_capacity(g.edge_count());
    let mut heap: Vec<Option<usize>> = vec![None; n];
    for e in g.edges().iter().filter(|e| keep(e.id)) {
        let node = heaps.singleton(e);
        heap[e.head] = heaps.merge(heap[e.head], Some(node));
    }

    let mut uf = RollbackUnionFind::new(n);
    const UNSEEN: usize = usize::MAX;
    let mut seen = vec![UNSEEN; n];
    seen[root] = root;
    let mut entering: Vec<Option<HeapEdge>> = vec![None; n];
    let mut cycles: Vec<(VertexId, usize, Vec<HeapEdge>)> = Vec::new();
    let mut chosen: Vec<HeapEdge> = Vec::with_capacity(n);
    let mut path: Vec<VertexId> = Vec::with_capacity(n);

    for start in 0..n {
        let mut u = start;
        chosen.clear();
        path.clear();
        while seen[u] == UNSEEN {
            // Cheapest edge entering component u from outside it.
            let e = loop {
                let top = heap[u].ok_or(Infeasible { unreachable: u })?;
                let e = heaps.top(top);
                heap[u] = heaps.pop(top);
                if uf.find(e.tail) != u {
                    break e;
                }
            };
            if let Some(h) = heap[u] {
                heaps.add(h, -e.weight);
            }
            chosen.push(e);
            path.push(u);
            seen[u] = start;
            u = uf.find(e.tail);
            if seen[u] == start {
                // Contract the cycle closed by e.
                let end = chosen.len();
                let time = uf.time();
                let mut merged = None;
                loop {
                    let w = path.pop().expect("cycle vertex on path");
                    merged = heaps.merge(merged, heap[w]);
                    if !uf.join(u, w) {
                        break;
                    }
                }
                let begin = path.len();
                u = uf.find(u);
                heap[u] = merged;
                seen[u] = UNSEEN;
                cycles.push((u, time, chosen[begin..end].to_vec()));
                chosen.truncate(begin);
            }
        }
        for e in &chosen {
            entering[uf.find(e.head)] = Some(*e);
        }
    }

    // Expand contracted cycles, newest first.
    for (u, time, cycle) in cycles.iter().rev() {
        uf.rollback(*time);
        let into_cycle = entering[*u].expect("contracted node has an entering edge");
        for e in cycle {
            entering[uf.find(e.head)] = Some(*e);
        }
        entering[uf.find(into_cycle.head)] = Some(into_cycle);
    }

    let mut parent_edge = vec![None; n];
    for v in 0..n {
        if v != root {
            parent_edge[v] = Some(entering[v].expect("every non-root vertex has an entering edge").id);
        }
    }
    let total_cost = parent_edge.iter().flatten().map(|&e| g.edge(e).cost).sum();
    Ok(Arborescence { root, parent_edge, total_cost })
}

#[derive(Debug, Clone, Copy)]
struct HeapEdge {
    id: EdgeId,
    tail: VertexId,
    head: VertexId,
    weight: i64,
}

struct HeapNode {
    edge: HeapEdge,
    pending: i64,
    rank: u32,
    left: Option<usize>,
    right: Option<usize>,
}

/// Arena of leftist min-heaps keyed by (weight, edge id) with lazy additive
/// updates.
struct LeftistHeaps {
    nodes: Vec<HeapNode>,
}

impl LeftistHeaps {
    fn with_capacity(cap: usize) -> Self {
        LeftistHeaps { nodes: Vec::with_capacity(cap) }
    }

    fn singleton(&mut self, e: &Edge) -> usize {
        self.nodes.push(HeapNode {
            edge: HeapEdge { id: e.id, tail: e.tail, head: e.head, weight: e.cost.0 },
            pending: 0,
            rank: 1,
            left: None,
            right: None,
        });
        self.nodes.len() - 1
    }

    fn push_down(&mut self, x: usize) {
        let d = self.nodes[x].pending;
        if d != 0 {
            self.nodes[x].edge.weight += d;
            for c in [self.nodes[x].left, self.nodes[x].right].into_iter().flatten() {
                self.nodes[c].pending += d;
            }
            self.nodes[x].pending = 0;
        }
    }

    fn key(&self, x: usize) -> (i64, EdgeId) {
        (self.nodes[x].edge.weight, self.nodes[x].edge.id)
    }

    fn rank(&self, x: Option<usize>) -> u32 {
        x.map_or(0, |x| self.nodes[x].rank)
    }

    fn merge(&mut self, a: Option<usize>, b: Option<usize>) -> Option<usize> {
        let (mut a, mut b) = match (a, b) {
            (None, x) | (x, None) => return x,
            (Some(a), Some(b)) => (a, b),
        };
        self.push_down(a);
        self.push_down(b);
        if self.key(a) > self.key(b) {
            std::mem::swap(&mut a, &mut b);
        }
        let right = self.merge(self.nodes[a].right, Some(b));
        self.nodes[a].right = right;
        if self.rank(self.nodes[a].left) < self.rank(right) {
            let node = &mut self.nodes[a];
            std::mem::swap(&mut node.left, &mut node.right);
        }
        self.nodes[a].rank = self.rank(self.nodes[a].right) + 1;
        Some(a)
    }

    fn top(&mut self, x: usize) -> HeapEdge {
        self.push_down(x);
        self.nodes[x].edge
    }

    fn pop(&mut self, x: usize) -> Option<usize> {
        self.push_down(x);
        let (l, r) = (self.nodes[x].left, self.nodes[x].right);
        self.merge(l, r)
    }

    fn add(&mut self, x: usize, delta: i64) {
        self.nodes[x].pending += delta;
    }
}

/// Union by size without path compression, so merges can be undone.
struct RollbackUnionFind {
    // Negative size at roots, parent index elsewhere.
    link: Vec<isize>,
    history: Vec<(usize, isize)>,
}

impl RollbackUnionFind {
    fn new(n: usize) -> Self {
        RollbackUnionFind { link: vec![-1; n], history: Vec::new() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.link[x] >= 0 {
            x = self.link[x] as usize;
        }
        x
    }

    fn time(&self) -> usize {
        self.history.len()
    }

    fn rollback(&mut self, t: usize) {
        while self.history.len() > t {
            let (i, v) = self.history.pop().unwrap();
            self.link[i] = v;
        }
    }

    fn join(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.link[a] > self.link[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.history.push((a, self.link[a]));
        self.history.push((b, self.link[b]));
        self.link[a] += self.link[b];
        self.link[b] = a as isize;
        true
    }
}

/// Exhaustive search over in-edge choices (branch and bound on cost).
pub fn brute_force_arborescence(g: &Graph) -> Result<Arborescence, BruteForceError> {
    brute_force_arborescence_filtered(g, &|_| true)
}

pub fn brute_force_arborescence_filtered(
    g: &Graph,
    keep: &dyn Fn(EdgeId) -> bool,
) -> Result<Arborescence, BruteForceError> {
    let n = g.vertex_count();
    if n > BRUTE_FORCE_MAX_VERTICES {
        return Err(BruteForceError::InstanceTooLarge { n, max: BRUTE_FORCE_MAX_VERTICES });
    }
    let root = g.root();
    let order: Vec<VertexId> = g.vertices().filter(|&v| v != root).collect();
    let mut candidates: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for &v in &order {
        let mut c: Vec<EdgeId> = g.in_edges(v).iter().copied().filter(|&e| keep(e)).collect();
        c.sort_by_key(|&e| (g.edge(e).cost, e));
        if c.is_empty() {
            return Err(Infeasible { unreachable: v }.into());
        }
        candidates[v] = c;
    }
    // remaining_min[i] = sum of cheapest in-edges of order[i..].
    let mut remaining_min = vec![Cost::ZERO; order.len() + 1];
    for i in (0..order.len()).rev() {
        remaining_min[i] = remaining_min[i + 1] + g.edge(candidates[order[i]][0]).cost;
    }

    struct Search<'a> {
        g: &'a Graph,
        order: &'a [VertexId],
        candidates: &'a [Vec<EdgeId>],
        remaining_min: &'a [Cost],
        parent: Vec<Option<EdgeId>>,
        best: Option<(Cost, Vec<Option<EdgeId>>)>,
    }

    impl Search<'_> {
        fn creates_cycle(&self, v: VertexId, e: EdgeId) -> bool {
            let mut x = self.g.edge(e).tail;
            loop {
                if x == v {
                    return true;
                }
                match self.parent[x] {
                    Some(pe) => x = self.g.edge(pe).tail,
                    None => return false,
                }
            }
        }

        fn run(&mut self, depth: usize, cost: Cost) {
            if let Some((best, _)) = &self.best {
                if cost + self.remaining_min[depth] >= *best {
                    return;
                }
            }
            if depth == self.order.len() {
                self.best = Some((cost, self.parent.clone()));
                return;
            }
            let v = self.order[depth];
            for i in 0..self.candidates[v].len() {
                let e = self.candidates[v][i];
                if self.creates_cycle(v, e) {
                    continue;
                }
                self.parent[v] = Some(e);
                self.run(depth + 1, cost + self.g.edge(e).cost);
                self.parent[v] = None;
            }
        }
    }

    let mut search = Search {
        g,
        order: &order,
        candidates: &candidates,
        remaining_min: &remaining_min,
        parent: vec![None; n],
        best: None,
    };
    search.run(0, Cost::ZERO);
    match search.best {
        Some((total_cost, parent_edge)) => Ok(Arborescence { root, parent_edge, total_cost }),
        None => {
            let unreachable = first_unreachable(g, keep).unwrap_or(order[0]);
            Err(Infeasible { unreachable }.into())
        }
    }
}

fn first_unreachable(g: &Graph, keep: &dyn Fn(EdgeId) -> bool) -> Option<VertexId> {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![g.root()];
    seen[g.root()] = true;
    while let Some(v) = stack.pop() {
        for &e in g.out_edges(v) {
            let h = g.edge(e).head;
            if keep(e) && !seen[h] {
                seen[h] = true;
                stack.push(h);
            }
        }
    }
    seen.iter().position(|&s| !s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    WrongSize { expected: usize, found: usize },
    RootHasParent,
    UnknownEdge { vertex: VertexId, edge: EdgeId },
    WrongHead { vertex: VertexId, edge: EdgeId },
    UncoveredVertex { vertex: VertexId },
    Cycle { vertex: VertexId },
    CostMismatch { recorded: Cost, actual: Cost },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongSize { expected, found } => {
                write!(f, "wrong size: parent map covers {found} vertices, graph has {expected}")
            }
            Violation::RootHasParent => write!(f, "root has an incoming edge"),
            Violation::UnknownEdge { vertex, edge } => write!(f, "unknown edge {edge} at vertex {vertex}"),
            Violation::WrongHead { vertex, edge } => write!(f, "edge {edge} does not enter vertex {vertex}"),
            Violation::UncoveredVertex { vertex } => write!(f, "uncovered vertex {vertex}"),
            Violation::Cycle { vertex } => write!(f, "cycle through vertex {vertex}"),
            Violation::CostMismatch { recorded, actual } => {
                write!(f, "cost mismatch: recorded {recorded}, edges sum to {actual}")
            }
        }
    }
}

/// Checks every arborescence invariant against `g`; reports the first
/// violation found.
pub fn validate_arborescence(g: &Graph, a: &Arborescence) -> Result<(), Violation> {
    let n = g.vertex_count();
    if a.parent_edge.len() != n {
        return Err(Violation::WrongSize { expected: n, found: a.parent_edge.len() });
    }
    if a.parent_edge[g.root()].is_some() {
        return Err(Violation::RootHasParent);
    }
    for v in g.vertices().filter(|&v| v != g.root()) {
        match a.parent_edge[v] {
            None => return Err(Violation::UncoveredVertex { vertex: v }),
            Some(e) if e >= g.edge_count() => return Err(Violation::UnknownEdge { vertex: v, edge: e }),
            Some(e) if g.edge(e).head != v => return Err(Violation::WrongHead { vertex: v, edge: e }),
            Some(_) => {}
        }
    }
    // 0 = unvisited, 1 = on current walk, 2 = reaches the root.
    let mut state = vec![0u8; n];
    state[g.root()] = 2;
    for start in g.vertices() {
        let mut walk = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            v = g.edge(a.parent_edge[v].unwrap()).tail;
        }
        if state[v] == 1 {
            return Err(Violation::Cycle { vertex: v });
        }
        for w in walk {
            state[w] = 2;
        }
    }
    let actual: Cost = a.parent_edge.iter().flatten().map(|&e| g.edge(e).cost).sum();
    if actual != a.total_cost {
        return Err(Violation::CostMismatch { recorded: a.total_cost, actual });
    }
    Ok(())
}
