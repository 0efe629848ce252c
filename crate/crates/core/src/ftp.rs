//! k-fault-tolerant basis preservers: the union of `k + 1` successive greedy
//! bases, an exhaustive verifier, the sequential failure cascade, and the
//! replicated-tree instances that force `k (n - 1)` elements.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cost::Cost;
use crate::matroid::{find_swap_element, greedy_min_cost_basis, rank, Basis, ElementId, MatroidError, MatroidOracle, Swap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FtpSet {
    pub k: usize,
    /// `B_1 .. B_{k+1}`, pairwise disjoint; later layers may be smaller or empty.
    pub layers: Vec<Basis>,
    /// Sorted union of the layers.
    pub union: Vec<ElementId>,
}

impl FtpSet {
    pub fn len(&self) -> usize {
        self.union.len()
    }

    pub fn is_empty(&self) -> bool {
        self.union.is_empty()
    }

    /// One layer per line, ids separated by spaces, after `#` comments.
    pub fn serialize(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            let _ = writeln!(out, "# {c}");
        }
        for b in &self.layers {
            let ids: Vec<String> = b.elements.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(out, "{}", ids.join(" "));
        }
        out
    }
}

pub fn build_ftp(m: &MatroidOracle, cost: &[Cost], k: usize) -> FtpSet {
    let mut remaining = m.ground();
    let mut layers = Vec::with_capacity(k + 1);
    for _ in 0..=k {
        let b = greedy_min_cost_basis(m, &remaining, cost);
        remaining.retain(|e| !b.contains(*e));
        layers.push(b);
    }
    let mut union: Vec<ElementId> = layers.iter().flat_map(|b| b.elements.iter().copied()).collect();
    union.sort_unstable();
    FtpSet { k, layers, union }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct SetParseError {
    pub line: usize,
    pub reason: String,
}

/// Reads the element set of an ftp file (every id on every line).
pub fn parse_element_set(text: &str, ground_size: usize) -> Result<Vec<ElementId>, SetParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        for field in raw.split('#').next().unwrap_or("").split_whitespace() {
            let e: ElementId = field
                .parse()
                .map_err(|_| SetParseError { line: i + 1, reason: format!("expected an element id, found `{field}`") })?;
            if e >= ground_size {
                return Err(SetParseError { line: i + 1, reason: format!("element {e} out of range for ground size {ground_size}") });
            }
            out.push(e);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub const VERIFY_MAX_ELEMENTS: usize = 18;
pub const VERIFY_MAX_BUDGET: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FtpCounterexample {
    pub faults: Vec<ElementId>,
    /// Min-cost basis of `M|(E \ F)`.
    pub expected: Basis,
    /// Min-cost basis of `M|(S \ F)`.
    pub found: Basis,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FtpVerdict {
    Ok { fault_sets: usize },
    Counterexample(FtpCounterexample),
}

/// Every `F` with `|F| <= k` over `0..m`, by size and then lexicographically.
pub fn fault_sets(m: usize, k: usize) -> Vec<Vec<ElementId>> {
    fn extend(m: usize, size: usize, start: usize, cur: &mut Vec<ElementId>, out: &mut Vec<Vec<ElementId>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for e in start..m {
            cur.push(e);
            extend(m, size, e + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in 0..=k.min(m) {
        extend(m, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

fn check_fault_set(m: &MatroidOracle, cost: &[Cost], ground: &[ElementId], s: &[ElementId], f: &[ElementId]) -> Option<FtpCounterexample> {
    let survive = |set: &[ElementId]| -> Vec<ElementId> { set.iter().copied().filter(|e| !f.contains(e)).collect() };
    let expected = greedy_min_cost_basis(m, &survive(ground), cost);
    let found = greedy_min_cost_basis(m, &survive(s), cost);
    (expected.len() != found.len() || expected.cost != found.cost).then(|| FtpCounterexample { faults: f.to_vec(), expected, found })
}

/// Checks that `S \ F` holds a min-cost basis of `M|(E \ F)` for every
/// `|F| <= k`, comparing rank and cost. With `workers > 1` the fault sets
/// are split across a thread pool; the reported counterexample is still the
/// first in enumeration order.
pub fn verify_ftp(m: &MatroidOracle, cost: &[Cost], s: &[ElementId], k: usize, workers: usize) -> Result<FtpVerdict, MatroidError> {
    let size = m.ground_size();
    if size > VERIFY_MAX_ELEMENTS {
        return Err(MatroidError::InstanceTooLarge { size, max: VERIFY_MAX_ELEMENTS });
    }
    if k > VERIFY_MAX_BUDGET {
        return Err(MatroidError::BudgetTooLarge { k, max: VERIFY_MAX_BUDGET });
    }
    let ground = m.ground();
    let sets = fault_sets(size, k);
    let first = if workers <= 1 {
        sets.iter().find_map(|f| check_fault_set(m, cost, &ground, s, f))
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool");
        pool.install(|| sets.par_iter().filter_map(|f| check_fault_set(m, cost, &ground, s, f)).find_first(|_| true))
    };
    Ok(match first {
        Some(c) => FtpVerdict::Counterexample(c),
        None => FtpVerdict::Ok { fault_sets: sets.len() },
    })
}

/// Applies `faults` one at a time to the layers of `ftp` and returns the
/// resulting first layer, a min-cost basis of `M|(E \ faults)`.
///
/// A failed element in layer `i` is replaced by a swap element pulled from
/// layer `i + 1`, whose departure is in turn handled as a failure in layer
/// `i + 1`. The deepest layer has no partner to pull from, so once a cascade
/// reaches it and the rank there does not drop, that layer stops being a
/// valid basis and the usable depth shrinks by one.
pub fn simulate_failure_cascade(m: &MatroidOracle, ftp: &FtpSet, faults: &[ElementId], cost: &[Cost]) -> Result<Basis, MatroidError> {
    if faults.len() > ftp.k {
        return Err(MatroidError::TooManyFaults { faults: faults.len(), k: ftp.k });
    }
    let mut layers = ftp.layers.clone();
    let mut depth = layers.len();
    let mut alive = vec![true; m.ground_size()];
    for &f in faults {
        if f >= alive.len() || !alive[f] {
            continue;
        }
        alive[f] = false;
        let Some(mut level) = layers[..depth].iter().position(|b| b.contains(f)) else {
            continue;
        };
        let mut x = f;
        loop {
            // E_level as it was before `x` left it.
            let ground: Vec<ElementId> = (0..alive.len())
                .filter(|&e| e == x || (alive[e] && !layers[..level].iter().any(|b| b.contains(e))))
                .collect();
            let swap = if level + 1 < depth {
                find_swap_element(m, &ground, &layers[level], x, &layers[level + 1], cost)?
            } else if rank(m, &ground.iter().copied().filter(|&e| e != x).collect::<Vec<_>>()) < layers[level].len() {
                Swap::NoSwapNeeded
            } else {
                layers[level] = without(&layers[level], x, cost);
                depth = level;
                break;
            };
            match swap {
                Swap::NoSwapNeeded => {
                    layers[level] = without(&layers[level], x, cost);
                    break;
                }
                Swap::Element(b) => {
                    let mut next = without(&layers[level], x, cost).elements;
                    next.push(b);
                    layers[level] = Basis::from_elements(next, cost);
                    x = b;
                    level += 1;
                }
            }
        }
    }
    Ok(layers.swap_remove(0))
}

fn without(b: &Basis, x: ElementId, cost: &[Cost]) -> Basis {
    Basis::from_elements(b.elements.iter().copied().filter(|&e| e != x).collect(), cost)
}

/// Graphic matroid of a spanning tree with every edge replicated `k` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundInstance {
    pub n: usize,
    pub k: usize,
    /// Tree edges `(parent, child)`; element `j * k + c` is copy `c` of edge `j`.
    pub tree: Vec<(usize, usize)>,
    pub matroid: MatroidOracle,
    pub cost: Vec<Cost>,
}

impl LowerBoundInstance {
    /// Elements every k-FTP must contain.
    pub fn required_size(&self) -> usize {
        self.k * (self.n - 1)
    }
}

/// Random spanning tree on `n` vertices with distinct costs `1..n-1`, each
/// edge copied `k` times at equal cost.
///
/// # Panics
/// If `n < 2` or `k == 0`.
pub fn lower_bound_multigraph(n: usize, k: usize, seed: u64) -> LowerBoundInstance {
    assert!(n >= 2, "need at least two vertices");
    assert!(k >= 1, "need at least one copy per edge");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order[1..].shuffle(&mut rng);
    let tree: Vec<(usize, usize)> = (1..n).map(|i| (order[rng.random_range(0..i)], order[i])).collect();
    let mut edge_cost: Vec<i64> = (1..n as i64).collect();
    edge_cost.shuffle(&mut rng);
    let ends = tree.iter().flat_map(|&e| std::iter::repeat_n(e, k)).collect();
    let cost = edge_cost.iter().flat_map(|&c| std::iter::repeat_n(Cost::units(c), k)).collect();
    LowerBoundInstance { n, k, tree, matroid: MatroidOracle::graphic(n, ends), cost }
}

pub const MIN_SEARCH_MAX_ELEMENTS: usize = 12;

/// Smallest `S` (first in size-then-lexicographic order) that passes
/// [`verify_ftp`].
pub fn minimum_ftp(m: &MatroidOracle, cost: &[Cost], k: usize) -> Result<Vec<ElementId>, MatroidError> {
    let size = m.ground_size();
    if size > MIN_SEARCH_MAX_ELEMENTS {
        return Err(MatroidError::InstanceTooLarge { size, max: MIN_SEARCH_MAX_ELEMENTS });
    }
    for s in fault_sets(size, size) {
        if let FtpVerdict::Ok { .. } = verify_ftp(m, cost, &s, k, 1)? {
            return Ok(s);
        }
    }
    unreachable!("the full ground set is always a k-FTP")
}
