//! Seeded random instances rooted at vertex 0.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::Cost;
use crate::graph::{Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("need at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("density must lie in (0, 1], got {0}")]
    BadDensity(f64),
    #[error("cost_max must be at least 1, got {0}")]
    BadCostMax(i64),
}

/// Random digraph on `n` vertices with root 0 and no edges into the root.
///
/// A random spanning arborescence goes in first (edge ids `0..n-1`), so the
/// root reaches every vertex. Every other ordered pair `(u, v)` with `v != 0`
/// then gets an edge with probability `density`, in lexicographic order.
/// Costs are uniform integers in `[1, cost_max]`.
pub fn gen_random_graph(n: usize, density: f64, cost_max: i64, seed: u64) -> Result<Graph, GenError> {
    if n < 2 {
        return Err(GenError::TooFewVertices(n));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenError::BadDensity(density));
    }
    if cost_max < 1 {
        return Err(GenError::BadCostMax(cost_max));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<VertexId> = (1..n).collect();
    order.shuffle(&mut rng);
    order.insert(0, 0);
    let mut backbone = vec![usize::MAX; n];
    let mut edges = Vec::with_capacity(n - 1);
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        backbone[order[i]] = parent;
        edges.push((parent, order[i], Cost::units(rng.random_range(1..=cost_max))));
    }
    for u in 0..n {
        for (v, &parent) in backbone.iter().enumerate().skip(1) {
            if u == v || parent == u {
                continue;
            }
            if rng.random_bool(density) {
                edges.push((u, v, Cost::units(rng.random_range(1..=cost_max))));
            }
        }
    }
    Ok(Graph::new(n, 0, edges).expect("generated edges are valid"))
}
