//! Seeded cost perturbation that makes shortest paths cost-unique with high
//! probability while preserving every strict cost comparison of the input.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::Cost;
use crate::graph::{Graph, GraphError};

/// A graph whose costs were rewritten as `(cost / unit) * scale + delta`.
///
/// `unit` is the gcd of the original costs, so `cost' / scale * unit`
/// recovers the original cost exactly. Each `delta` lies in
/// `[1, scale / (m * n)]`, so the deltas along any path or arborescence sum
/// to less than `scale`: strictly cheaper structures stay strictly cheaper.
#[derive(Debug, Clone)]
pub struct PerturbedGraph {
    pub graph: Graph,
    pub seed: u64,
    pub scale: i64,
    pub unit: i64,
    pub max_delta: i64,
}

impl PerturbedGraph {
    pub fn original_cost(&self, perturbed: Cost) -> Cost {
        Cost(perturbed.0 / self.scale * self.unit)
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn cost_unit(g: &Graph) -> i64 {
    let unit = g.edges().iter().fold(0, |acc, e| gcd(acc, e.cost.0));
    unit.max(1)
}

/// Perturbs with the largest power-of-two scale that keeps every path sum in
/// range.
pub fn perturb_costs(g: &Graph, seed: u64) -> Result<PerturbedGraph, GraphError> {
    let unit = cost_unit(g);
    let max_reduced = g.edges().iter().map(|e| e.cost.0 / unit).max().unwrap_or(0);
    let n = g.vertex_count().max(2) as i64;
    // n * (max_reduced + 1) * scale must stay below i64::MAX.
    let budget = i64::MAX / n / (max_reduced + 1);
    if budget < 1 {
        return Err(GraphError::Overflow);
    }
    let scale = 1i64 << (63 - budget.leading_zeros());
    perturb_costs_with_scale(g, seed, scale)
}

/// Perturbs with an explicit `scale` (the multiplier applied to reduced costs).
pub fn perturb_costs_with_scale(g: &Graph, seed: u64, scale: i64) -> Result<PerturbedGraph, GraphError> {
    let unit = cost_unit(g);
    let n = g.vertex_count() as i64;
    let m = g.edge_count() as i64;
    let max_delta = if m == 0 { 1 } else { scale / (m * n.max(1)) };
    if scale < 1 || max_delta < 1 {
        return Err(GraphError::Overflow);
    }
    let mut new_costs = Vec::with_capacity(g.edge_count());
    let mut max_cost = 0i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = HashSet::new();
    let distinct = max_delta >= m;
    for e in g.edges() {
        let mut delta = rng.random_range(1..=max_delta);
        while distinct && !used.insert(delta) {
            delta = rng.random_range(1..=max_delta);
        }
        let c = (e.cost.0 / unit)
            .checked_mul(scale)
            .and_then(|c| c.checked_add(delta))
            .ok_or(GraphError::Overflow)?;
        max_cost = max_cost.max(c);
        new_costs.push(Cost(c));
    }
    // Any path or arborescence has at most n - 1 edges.
    if max_cost.checked_mul((n - 1).max(1)).is_none() {
        return Err(GraphError::Overflow);
    }
    let graph = g.with_costs(|e| new_costs[e.id]);
    Ok(PerturbedGraph { graph, seed, scale, unit, max_delta })
}
