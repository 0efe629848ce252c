//! Matroids given by independence oracles, greedy min-cost bases and the
//! swap step used when a basis element fails.

use std::fmt;

use crate::cost::Cost;
use crate::graph::data_lines;

pub type ElementId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatroidKind {
    Graphic,
    Uniform,
    Partition,
    Explicit,
}

impl fmt::Display for MatroidKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatroidKind::Graphic => "graphic",
            MatroidKind::Uniform => "uniform",
            MatroidKind::Partition => "partition",
            MatroidKind::Explicit => "explicit",
        })
    }
}

/// Largest ground set an explicit independence table may cover.
pub const EXPLICIT_MAX_ELEMENTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatroidOracle {
    /// Edge `i` joins `ends[i].0` and `ends[i].1`; a set is independent iff
    /// it is a forest. Self-loops are dependent on their own.
    Graphic { vertex_count: usize, ends: Vec<(usize, usize)> },
    /// Every set of at most `rank` elements is independent.
    Uniform { rank: usize, ground_size: usize },
    /// At most `capacity[b]` elements from block `b`.
    Partition { block_of: Vec<usize>, capacity: Vec<usize> },
    /// `independent[mask]` for every subset bitmask.
    Explicit { ground_size: usize, independent: Vec<bool> },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatroidError {
    #[error("no element restores the basis after element {fault} failed, although the rank did not drop")]
    InternalContradiction { fault: ElementId },
    #[error("element {element} is not in the basis")]
    NotInBasis { element: ElementId },
    #[error("instance of size {size} exceeds the limit {max}")]
    InstanceTooLarge { size: usize, max: usize },
    #[error("fault budget {k} exceeds the limit {max}")]
    BudgetTooLarge { k: usize, max: usize },
    #[error("{faults} faults exceed the budget k = {k}")]
    TooManyFaults { faults: usize, k: usize },
}

impl MatroidOracle {
    pub fn graphic(vertex_count: usize, ends: Vec<(usize, usize)>) -> MatroidOracle {
        assert!(ends.iter().all(|&(u, v)| u < vertex_count && v < vertex_count), "edge endpoint out of range");
        MatroidOracle::Graphic { vertex_count, ends }
    }

    pub fn uniform(rank: usize, ground_size: usize) -> MatroidOracle {
        MatroidOracle::Uniform { rank, ground_size }
    }

    pub fn partition(block_of: Vec<usize>, capacity: Vec<usize>) -> MatroidOracle {
        assert!(block_of.iter().all(|&b| b < capacity.len()), "block index out of range");
        MatroidOracle::Partition { block_of, capacity }
    }

    /// The downward closure of `sets`.
    pub fn explicit(ground_size: usize, sets: &[Vec<ElementId>]) -> MatroidOracle {
        assert!(ground_size <= EXPLICIT_MAX_ELEMENTS, "explicit matroids are limited to {EXPLICIT_MAX_ELEMENTS} elements");
        let mut independent = vec![false; 1 << ground_size];
        independent[0] = true;
        for s in sets {
            let mask = s.iter().fold(0usize, |acc, &e| {
                assert!(e < ground_size, "element {e} out of range");
                acc | 1 << e
            });
            independent[mask] = true;
        }
        // Supersets come after their subsets in decreasing mask order, so one
        // descending pass propagates independence down to every subset.
        for mask in (1..independent.len()).rev() {
            if independent[mask] {
                let mut rest = mask;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    independent[mask ^ bit] = true;
                    rest ^= bit;
                }
            }
        }
        MatroidOracle::Explicit { ground_size, independent }
    }

    /// Table built from an arbitrary predicate; the result is not closed or
    /// audited (see [`audit_axioms`]).
    pub fn explicit_from_fn(ground_size: usize, pred: impl Fn(&[ElementId]) -> bool) -> MatroidOracle {
        assert!(ground_size <= EXPLICIT_MAX_ELEMENTS, "explicit matroids are limited to {EXPLICIT_MAX_ELEMENTS} elements");
        let independent = (0..1usize << ground_size).map(|mask| pred(&mask_elements(mask))).collect();
        MatroidOracle::Explicit { ground_size, independent }
    }

    pub fn kind(&self) -> MatroidKind {
        match self {
            MatroidOracle::Graphic { .. } => MatroidKind::Graphic,
            MatroidOracle::Uniform { .. } => MatroidKind::Uniform,
            MatroidOracle::Partition { .. } => MatroidKind::Partition,
            MatroidOracle::Explicit { .. } => MatroidKind::Explicit,
        }
    }

    pub fn ground_size(&self) -> usize {
        match self {
            MatroidOracle::Graphic { ends, .. } => ends.len(),
            MatroidOracle::Uniform { ground_size, .. } | MatroidOracle::Explicit { ground_size, .. } => *ground_size,
            MatroidOracle::Partition { block_of, .. } => block_of.len(),
        }
    }

    pub fn ground(&self) -> Vec<ElementId> {
        (0..self.ground_size()).collect()
    }

    /// Fresh incremental independence checker holding the empty set.
    pub fn scratch(&self) -> Scratch<'_> {
        let state = match self {
            MatroidOracle::Graphic { vertex_count, .. } => State::Forest((0..*vertex_count).collect()),
            MatroidOracle::Uniform { .. } => State::Count(0),
            MatroidOracle::Partition { capacity, .. } => State::Blocks(vec![0; capacity.len()]),
            MatroidOracle::Explicit { .. } => State::Mask(0),
        };
        Scratch { m: self, state }
    }

    pub fn is_independent(&self, set: &[ElementId]) -> bool {
        let mut s = self.scratch();
        set.iter().all(|&e| s.try_add(e))
    }
}

fn mask_elements(mask: usize) -> Vec<ElementId> {
    (0..usize::BITS as usize).filter(|&i| mask >> i & 1 == 1).collect()
}

#[derive(Debug, Clone)]
enum State {
    Forest(Vec<usize>),
    Count(usize),
    Blocks(Vec<usize>),
    Mask(usize),
}

/// An independent set grown one element at a time.
#[derive(Debug, Clone)]
pub struct Scratch<'m> {
    m: &'m MatroidOracle,
    state: State,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Scratch<'_> {
    /// Adds `e` if the set stays independent; reports whether it did.
    pub fn try_add(&mut self, e: ElementId) -> bool {
        match (&mut self.state, self.m) {
            (State::Forest(parent), MatroidOracle::Graphic { ends, .. }) => {
                let (a, b) = (find(parent, ends[e].0), find(parent, ends[e].1));
                if a == b {
                    return false;
                }
                parent[a] = b;
                true
            }
            (State::Count(c), MatroidOracle::Uniform { rank, .. }) => {
                if *c >= *rank {
                    return false;
                }
                *c += 1;
                true
            }
            (State::Blocks(used), MatroidOracle::Partition { block_of, capacity }) => {
                let b = block_of[e];
                if used[b] >= capacity[b] {
                    return false;
                }
                used[b] += 1;
                true
            }
            (State::Mask(mask), MatroidOracle::Explicit { independent, .. }) => {
                let next = *mask | 1 << e;
                if next == *mask || !independent[next] {
                    return false;
                }
                *mask = next;
                true
            }
            _ => unreachable!("scratch state always matches its matroid"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    /// Sorted ascending.
    pub elements: Vec<ElementId>,
    pub cost: Cost,
}

impl Basis {
    pub fn empty() -> Basis {
        Basis { elements: Vec::new(), cost: Cost::ZERO }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    pub(crate) fn from_elements(mut elements: Vec<ElementId>, cost: &[Cost]) -> Basis {
        elements.sort_unstable();
        let total = elements.iter().map(|&e| cost[e]).sum();
        Basis { elements, cost: total }
    }
}

/// `ground` sorted by (cost, id).
fn by_cost(ground: &[ElementId], cost: &[Cost]) -> Vec<ElementId> {
    let mut order = ground.to_vec();
    order.sort_unstable_by_key(|&e| (cost[e], e));
    order.dedup();
    order
}

/// Min-cost basis of `m` restricted to `ground`, ties going to lower ids.
pub fn greedy_min_cost_basis(m: &MatroidOracle, ground: &[ElementId], cost: &[Cost]) -> Basis {
    let mut s = m.scratch();
    let picked = by_cost(ground, cost).into_iter().filter(|&e| s.try_add(e)).collect();
    Basis::from_elements(picked, cost)
}

pub fn rank(m: &MatroidOracle, set: &[ElementId]) -> usize {
    let mut s = m.scratch();
    let mut seen = set.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.into_iter().filter(|&e| s.try_add(e)).count()
}

pub fn in_span(m: &MatroidOracle, set: &[ElementId], x: ElementId) -> bool {
    if set.contains(&x) {
        return true;
    }
    let mut with_x = set.to_vec();
    with_x.push(x);
    rank(m, &with_x) == rank(m, set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Swap {
    Element(ElementId),
    /// Removing the fault lowers the rank; `B1 - f` stays a min-cost basis.
    NoSwapNeeded,
}

/// Replacement for `fault` in `b1`, a min-cost basis of `M|ground`, drawn
/// from `b2`, a min-cost basis of `M|(ground \ b1)`: the cheapest `b` in `b2`
/// (ties to lower ids) with `b1 - fault + b` independent.
pub fn find_swap_element(
    m: &MatroidOracle,
    ground: &[ElementId],
    b1: &Basis,
    fault: ElementId,
    b2: &Basis,
    cost: &[Cost],
) -> Result<Swap, MatroidError> {
    if !b1.contains(fault) {
        return Err(MatroidError::NotInBasis { element: fault });
    }
    let rest: Vec<ElementId> = b1.elements.iter().copied().filter(|&e| e != fault).collect();
    let mut base = m.scratch();
    for &e in &rest {
        assert!(base.try_add(e), "b1 must be independent");
    }
    for b in by_cost(&b2.elements, cost) {
        if base.clone().try_add(b) {
            return Ok(Swap::Element(b));
        }
    }
    let without: Vec<ElementId> = ground.iter().copied().filter(|&e| e != fault).collect();
    if rank(m, &without) < b1.len() {
        Ok(Swap::NoSwapNeeded)
    } else {
        Err(MatroidError::InternalContradiction { fault })
    }
}

/// Maximum ground subset size for exhaustive basis search.
pub const BRUTE_FORCE_MAX_ELEMENTS: usize = 20;

/// Min-cost basis of `M|ground` by enumerating every subset; ties go to the
/// lexicographically smallest element list.
pub fn brute_force_min_basis(m: &MatroidOracle, ground: &[ElementId], cost: &[Cost]) -> Result<Basis, MatroidError> {
    let mut ground = ground.to_vec();
    ground.sort_unstable();
    ground.dedup();
    if ground.len() > BRUTE_FORCE_MAX_ELEMENTS {
        return Err(MatroidError::InstanceTooLarge { size: ground.len(), max: BRUTE_FORCE_MAX_ELEMENTS });
    }
    let mut best: Option<Basis> = None;
    for mask in 0usize..1 << ground.len() {
        let set: Vec<ElementId> = mask_elements(mask).into_iter().map(|i| ground[i]).collect();
        if !m.is_independent(&set) {
            continue;
        }
        let cand = Basis::from_elements(set, cost);
        let better = match &best {
            None => true,
            Some(b) => (std::cmp::Reverse(cand.len()), cand.cost, &cand.elements) < (std::cmp::Reverse(b.len()), b.cost, &b.elements),
        };
        if better {
            best = Some(cand);
        }
    }
    Ok(best.expect("the empty set is independent"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    EmptySetDependent,
    NotDownwardClosed { set: Vec<ElementId>, dependent_subset: Vec<ElementId> },
    NoExchange { smaller: Vec<ElementId>, larger: Vec<ElementId> },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::EmptySetDependent => f.write_str("the empty set is dependent"),
            AxiomViolation::NotDownwardClosed { set, dependent_subset } => {
                write!(f, "{set:?} is independent but its subset {dependent_subset:?} is not")
            }
            AxiomViolation::NoExchange { smaller, larger } => {
                write!(f, "no element of {larger:?} extends {smaller:?}")
            }
        }
    }
}

pub const AUDIT_MAX_ELEMENTS: usize = 12;

/// Checks the independence axioms over every subset of the ground set.
pub fn audit_axioms(m: &MatroidOracle) -> Result<Result<(), AxiomViolation>, MatroidError> {
    let n = m.ground_size();
    if n > AUDIT_MAX_ELEMENTS {
        return Err(MatroidError::InstanceTooLarge { size: n, max: AUDIT_MAX_ELEMENTS });
    }
    let ind: Vec<bool> = (0usize..1 << n).map(|mask| m.is_independent(&mask_elements(mask))).collect();
    if !ind[0] {
        return Ok(Err(AxiomViolation::EmptySetDependent));
    }
    for mask in 1..ind.len() {
        if !ind[mask] {
            continue;
        }
        for e in mask_elements(mask) {
            if !ind[mask ^ 1 << e] {
                return Ok(Err(AxiomViolation::NotDownwardClosed {
                    set: mask_elements(mask),
                    dependent_subset: mask_elements(mask ^ 1 << e),
                }));
            }
        }
    }
    // With downward closure, augmenting by one from every set one larger
    // implies the general exchange property.
    let independent: Vec<usize> = (0..ind.len()).filter(|&m| ind[m]).collect();
    for &small in &independent {
        for &large in &independent {
            if large.count_ones() != small.count_ones() + 1 {
                continue;
            }
            let extends = mask_elements(large & !small).into_iter().any(|e| ind[small | 1 << e]);
            if !extends {
                return Ok(Err(AxiomViolation::NoExchange {
                    smaller: mask_elements(small),
                    larger: mask_elements(large),
                }));
            }
        }
    }
    Ok(Ok(()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct MatroidParseError {
    pub line: usize,
    pub reason: String,
}

fn bad(line: usize, reason: impl Into<String>) -> MatroidParseError {
    MatroidParseError { line, reason: reason.into() }
}

fn num(line: usize, field: &str) -> Result<usize, MatroidParseError> {
    field.parse().map_err(|_| bad(line, format!("expected a non-negative integer, found `{field}`")))
}

fn element(line: usize, field: &str, m: usize) -> Result<ElementId, MatroidParseError> {
    let e = num(line, field)?;
    if e >= m {
        return Err(bad(line, format!("element {e} out of range for ground size {m}")));
    }
    Ok(e)
}

fn cost(line: usize, field: &str) -> Result<Cost, MatroidParseError> {
    field.parse().map_err(|e| bad(line, format!("bad cost `{field}`: {e}")))
}

/// Parses a matroid file and its element costs.
///
/// ```text
/// graphic                 uniform K M         partition M           explicit M
/// N M ROOT                                     block CAP E E ...     E E ...
/// TAIL HEAD COST                                                     E E ...
/// ```
///
/// Any kind may end with a `costs` line followed by `M` values; graphic
/// matroids otherwise take their costs from the edge lines, and the other
/// kinds default to zero costs.
pub fn parse_matroid(text: &str) -> Result<(MatroidOracle, Vec<Cost>), MatroidParseError> {
    let lines: Vec<(usize, Vec<&str>)> = data_lines(text).collect();
    let Some((first_line, header)) = lines.first() else {
        return Err(bad(1, "empty matroid file"));
    };
    let split = lines.iter().position(|(_, f)| f[0] == "costs").unwrap_or(lines.len());
    let (body, tail) = lines.split_at(split);

    let (matroid, mut costs) = match header[0] {
        "graphic" => {
            let Some((l, dims)) = body.get(1) else {
                return Err(bad(*first_line, "graphic matroid needs an `N M ROOT` line"));
            };
            if dims.len() != 3 {
                return Err(bad(*l, "expected `N M ROOT`"));
            }
            let (n, m) = (num(*l, dims[0])?, num(*l, dims[1])?);
            let edges = &body[2..];
            if edges.len() != m {
                return Err(bad(*l, format!("header announces {m} edges, found {}", edges.len())));
            }
            let mut ends = Vec::with_capacity(m);
            let mut costs = Vec::with_capacity(m);
            for (l, f) in edges {
                if f.len() != 3 {
                    return Err(bad(*l, "expected `TAIL HEAD COST`"));
                }
                let (u, v) = (num(*l, f[0])?, num(*l, f[1])?);
                if u >= n || v >= n {
                    return Err(bad(*l, format!("vertex out of range for {n} vertices")));
                }
                ends.push((u, v));
                costs.push(cost(*l, f[2])?);
            }
            (MatroidOracle::graphic(n, ends), costs)
        }
        "uniform" => {
            if header.len() != 3 {
                return Err(bad(*first_line, "expected `uniform K M`"));
            }
            if let Some((l, _)) = body.get(1) {
                return Err(bad(*l, "unexpected line after uniform header"));
            }
            let (k, m) = (num(*first_line, header[1])?, num(*first_line, header[2])?);
            (MatroidOracle::uniform(k, m), vec![Cost::ZERO; m])
        }
        "partition" => {
            if header.len() != 2 {
                return Err(bad(*first_line, "expected `partition M`"));
            }
            let m = num(*first_line, header[1])?;
            let mut block_of = vec![usize::MAX; m];
            let mut capacity = Vec::new();
            for (l, f) in &body[1..] {
                if f[0] != "block" || f.len() < 2 {
                    return Err(bad(*l, "expected `block CAP E E ...`"));
                }
                let b = capacity.len();
                capacity.push(num(*l, f[1])?);
                for field in &f[2..] {
                    let e = element(*l, field, m)?;
                    if block_of[e] != usize::MAX {
                        return Err(bad(*l, format!("element {e} is in two blocks")));
                    }
                    block_of[e] = b;
                }
            }
            // Unlisted elements form a zero-capacity block, i.e. loops.
            if block_of.contains(&usize::MAX) {
                let loops = capacity.len();
                capacity.push(0);
                block_of.iter_mut().filter(|b| **b == usize::MAX).for_each(|b| *b = loops);
            }
            (MatroidOracle::partition(block_of, capacity), vec![Cost::ZERO; m])
        }
        "explicit" => {
            if header.len() != 2 {
                return Err(bad(*first_line, "expected `explicit M`"));
            }
            let m = num(*first_line, header[1])?;
            if m > EXPLICIT_MAX_ELEMENTS {
                return Err(bad(*first_line, format!("explicit matroids are limited to {EXPLICIT_MAX_ELEMENTS} elements")));
            }
            let sets = body[1..]
                .iter()
                .map(|(l, f)| f.iter().map(|x| element(*l, x, m)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            (MatroidOracle::explicit(m, &sets), vec![Cost::ZERO; m])
        }
        other => return Err(bad(*first_line, format!("unknown matroid kind `{other}`"))),
    };

    if let Some((l, f)) = tail.first() {
        let values: Vec<(usize, &str)> = std::iter::once((*l, &f[1..]))
            .chain(tail[1..].iter().map(|(l, f)| (*l, &f[..])))
            .flat_map(|(l, fs)| fs.iter().map(move |x| (l, *x)))
            .collect();
        if values.len() != matroid.ground_size() {
            return Err(bad(*l, format!("expected {} costs, found {}", matroid.ground_size(), values.len())));
        }
        costs = values.into_iter().map(|(l, x)| cost(l, x)).collect::<Result<_, _>>()?;
    }
    Ok((matroid, costs))
}

/// Writes a matroid file that [`parse_matroid`] reads back to the same
/// oracle and costs. Explicit matroids are written as their maximal
/// independent sets.
pub fn write_matroid(m: &MatroidOracle, costs: &[Cost]) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let join = |xs: &[ElementId]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    match m {
        MatroidOracle::Graphic { vertex_count, ends } => {
            let _ = writeln!(out, "graphic\n{vertex_count} {} 0", ends.len());
            for (&(u, v), c) in ends.iter().zip(costs) {
                let _ = writeln!(out, "{u} {v} {c}");
            }
            return out;
        }
        MatroidOracle::Uniform { rank, ground_size } => {
            let _ = writeln!(out, "uniform {rank} {ground_size}");
        }
        MatroidOracle::Partition { block_of, capacity } => {
            let _ = writeln!(out, "partition {}", block_of.len());
            for (b, cap) in capacity.iter().enumerate() {
                let members: Vec<ElementId> = (0..block_of.len()).filter(|&e| block_of[e] == b).collect();
                let _ = writeln!(out, "block {cap} {}", join(&members));
            }
        }
        MatroidOracle::Explicit { ground_size, independent } => {
            let _ = writeln!(out, "explicit {ground_size}");
            for mask in 1..independent.len() {
                let maximal = independent[mask] && (0..*ground_size).all(|e| mask >> e & 1 == 1 || !independent[mask | 1 << e]);
                if maximal {
                    let _ = writeln!(out, "{}", join(&mask_elements(mask)));
                }
            }
        }
    }
    let values: Vec<String> = costs.iter().map(Cost::to_string).collect();
    let _ = writeln!(out, "costs {}", values.join(" "));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn units(xs: &[i64]) -> Vec<Cost> {
        xs.iter().map(|&x| Cost::units(x)).collect()
    }

    fn triangle() -> MatroidOracle {
        MatroidOracle::graphic(3, vec![(0, 1), (1, 2), (0, 2)])
    }

    fn fano() -> MatroidOracle {
        let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
        MatroidOracle::explicit_from_fn(7, |s| s.len() <= 2 || (s.len() == 3 && !lines.iter().any(|l| l == s)))
    }

    #[test]
    fn greedy_examples() {
        let b = greedy_min_cost_basis(&triangle(), &[0, 1, 2], &units(&[1, 2, 3]));
        assert_eq!(b, Basis { elements: vec![0, 1], cost: Cost::units(3) });
        let b = greedy_min_cost_basis(&MatroidOracle::uniform(2, 4), &[0, 1, 2, 3], &units(&[1, 2, 3, 4]));
        assert_eq!(b, Basis { elements: vec![0, 1], cost: Cost::units(3) });
        assert_eq!(greedy_min_cost_basis(&triangle(), &[], &units(&[1, 2, 3])), Basis::empty());
    }

    #[test]
    fn greedy_handles_negative_costs() {
        let b = greedy_min_cost_basis(&MatroidOracle::uniform(2, 3), &[0, 1, 2], &units(&[5, -1, -7]));
        assert_eq!(b, Basis { elements: vec![1, 2], cost: Cost::units(-8) });
    }

    #[test]
    fn rank_and_span() {
        assert_eq!(rank(&triangle(), &[0, 1, 2]), 2);
        assert_eq!(rank(&MatroidOracle::uniform(2, 4), &[0, 1, 2, 3]), 2);
        assert_eq!(rank(&triangle(), &[]), 0);
        assert!(in_span(&triangle(), &[0, 1], 2));
        assert!(!in_span(&triangle(), &[], 2));
        assert!(in_span(&triangle(), &[0], 0));
    }

    #[test]
    fn self_loop_is_dependent() {
        let m = MatroidOracle::graphic(2, vec![(0, 0), (0, 1)]);
        assert!(!m.is_independent(&[0]));
        assert_eq!(rank(&m, &[0, 1]), 1);
    }

    #[test]
    fn swap_examples() {
        let c = units(&[1, 2, 3]);
        let b1 = Basis { elements: vec![0, 1], cost: Cost::units(3) };
        let b2 = Basis { elements: vec![2], cost: Cost::units(3) };
        assert_eq!(find_swap_element(&triangle(), &[0, 1, 2], &b1, 0, &b2, &c), Ok(Swap::Element(2)));

        let u = MatroidOracle::uniform(1, 3);
        let b1 = Basis { elements: vec![0], cost: Cost::units(1) };
        let b2 = Basis { elements: vec![1], cost: Cost::units(2) };
        assert_eq!(find_swap_element(&u, &[0, 1, 2], &b1, 0, &b2, &c), Ok(Swap::Element(1)));

        // Path 0 - 1 - 2 plus a cycle edge: edge 0 is a bridge.
        let m = MatroidOracle::graphic(4, vec![(0, 1), (1, 2), (2, 3), (1, 3)]);
        let c = units(&[1, 1, 1, 2]);
        let b1 = greedy_min_cost_basis(&m, &[0, 1, 2, 3], &c);
        let b2 = greedy_min_cost_basis(&m, &[3], &c);
        assert_eq!(find_swap_element(&m, &[0, 1, 2, 3], &b1, 0, &b2, &c), Ok(Swap::NoSwapNeeded));
        assert_eq!(
            find_swap_element(&m, &[0, 1, 2, 3], &b1, 3, &b2, &c),
            Err(MatroidError::NotInBasis { element: 3 })
        );
    }

    #[test]
    fn missing_partner_is_a_contradiction() {
        let c = units(&[1, 2, 3]);
        let b1 = Basis { elements: vec![0, 1], cost: Cost::units(3) };
        assert_eq!(
            find_swap_element(&triangle(), &[0, 1, 2], &b1, 0, &Basis::empty(), &c),
            Err(MatroidError::InternalContradiction { fault: 0 })
        );
    }

    #[test]
    fn fano_passes_audit_and_greedy() {
        let m = fano();
        assert_eq!(audit_axioms(&m), Ok(Ok(())));
        assert_eq!(rank(&m, &m.ground()), 3);
        let c = units(&[1, 1, 1, 2, 3, 4, 5]);
        // {0,1,2} is a line, so the third element must come from outside it.
        let b = greedy_min_cost_basis(&m, &m.ground(), &c);
        assert_eq!(b.elements, vec![0, 1, 3]);
        assert_eq!(Ok(b), brute_force_min_basis(&m, &m.ground(), &c));
    }

    #[test]
    fn audit_catches_bad_families() {
        let not_closed = MatroidOracle::explicit_from_fn(2, |s| s.len() != 1 || s[0] == 0);
        assert!(matches!(audit_axioms(&not_closed), Ok(Err(AxiomViolation::NotDownwardClosed { .. }))));
        // {0} and {1,2} maximal: 0 cannot be extended from {1,2}.
        let no_exchange = MatroidOracle::explicit(3, &[vec![0], vec![1, 2]]);
        assert!(matches!(audit_axioms(&no_exchange), Ok(Err(AxiomViolation::NoExchange { .. }))));
        assert_eq!(
            audit_axioms(&MatroidOracle::uniform(2, 13)),
            Err(MatroidError::InstanceTooLarge { size: 13, max: 12 })
        );
    }

    #[test]
    fn explicit_is_downward_closed() {
        let m = MatroidOracle::explicit(3, &[vec![0, 1]]);
        assert!(m.is_independent(&[0]) && m.is_independent(&[1]) && m.is_independent(&[]));
        assert!(!m.is_independent(&[2]));
        assert!(!m.is_independent(&[0, 0]));
    }

    #[test]
    fn parse_each_kind() {
        let (m, c) = parse_matroid("graphic\n3 3 0\n0 1 1\n1 2 2\n0 2 3\n").unwrap();
        assert_eq!((m, c), (triangle(), units(&[1, 2, 3])));
        let (m, c) = parse_matroid("uniform 2 4\ncosts 1 2\n3 4\n").unwrap();
        assert_eq!((m, c), (MatroidOracle::uniform(2, 4), units(&[1, 2, 3, 4])));
        let (m, _) = parse_matroid("partition 4\nblock 1 0 1\nblock 2 2\n").unwrap();
        assert_eq!(m, MatroidOracle::partition(vec![0, 0, 1, 2], vec![1, 2, 0]));
        let (m, c) = parse_matroid("# two elements\nexplicit 2\n0\n1\ncosts -1.5 2\n").unwrap();
        assert!(!m.is_independent(&[0, 1]) && m.is_independent(&[1]));
        assert_eq!(c, vec![Cost(-1_500_000), Cost::units(2)]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert_eq!(parse_matroid("uniform 2 4\ncosts 1 2\n").unwrap_err().line, 2);
        assert_eq!(parse_matroid("explicit 2\n0 5\n").unwrap_err().line, 2);
        assert_eq!(parse_matroid("cube 3\n").unwrap_err().line, 1);
        assert_eq!(parse_matroid("graphic\n3 2 0\n0 1 1\n").unwrap_err().line, 2);
        assert_eq!(parse_matroid("partition 3\nblock 1 0\nblock 1 0\n").unwrap_err().line, 3);
        assert!(parse_matroid("").is_err());
    }

    #[test]
    fn write_round_trips() {
        let c = units(&[3, -1, 4, 1, 5, 9, 2]);
        for m in [fano(), MatroidOracle::uniform(3, 7), MatroidOracle::partition(vec![0, 1, 1, 2, 2, 2, 0], vec![1, 2, 1])] {
            let text = write_matroid(&m, &c);
            assert_eq!(parse_matroid(&text).unwrap(), (m, c.clone()));
        }
        let c = units(&[1, 2, 3]);
        assert_eq!(parse_matroid(&write_matroid(&triangle(), &c)).unwrap(), (triangle(), c));
    }

    fn arb_graphic() -> impl Strategy<Value = (MatroidOracle, Vec<Cost>)> {
        (2usize..6).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n, -5i64..6), 0..10)
                .prop_map(move |es| {
                    let ends = es.iter().map(|&(u, v, _)| (u, v)).collect();
                    let costs = es.iter().map(|&(_, _, c)| Cost::units(c)).collect();
                    (MatroidOracle::graphic(n, ends), costs)
                })
        })
    }

    proptest! {
        #[test]
        fn greedy_matches_brute_force((m, c) in arb_graphic()) {
            let ground = m.ground();
            let g = greedy_min_cost_basis(&m, &ground, &c);
            let b = brute_force_min_basis(&m, &ground, &c).unwrap();
            prop_assert_eq!(g.cost, b.cost);
            prop_assert_eq!(g.len(), rank(&m, &ground));
        }

        #[test]
        fn swap_restores_optimality((m, c) in arb_graphic()) {
            let ground = m.ground();
            let b1 = greedy_min_cost_basis(&m, &ground, &c);
            let rest: Vec<_> = ground.iter().copied().filter(|e| !b1.contains(*e)).collect();
            let b2 = greedy_min_cost_basis(&m, &rest, &c);
            for &f in &b1.elements {
                let without: Vec<_> = ground.iter().copied().filter(|&e| e != f).collect();
                let best = brute_force_min_basis(&m, &without, &c).unwrap();
                let mut next: Vec<_> = b1.elements.iter().copied().filter(|&e| e != f).collect();
                match find_swap_element(&m, &ground, &b1, f, &b2, &c).unwrap() {
                    Swap::Element(b) => next.push(b),
                    Swap::NoSwapNeeded => {}
                }
                prop_assert!(m.is_independent(&next));
                prop_assert_eq!(next.len(), best.len());
                prop_assert_eq!(next.iter().map(|&e| c[e]).sum::<Cost>(), best.cost);
            }
        }

        #[test]
        fn graphic_matroids_satisfy_axioms((m, _) in arb_graphic()) {
            prop_assume!(m.ground_size() <= 8);
            prop_assert_eq!(audit_axioms(&m), Ok(Ok(())));
        }
    }
}
