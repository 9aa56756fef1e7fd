//! Branch and bound over LAP relaxations with subtour branching.
//!
//! A node is a set of forbidden and required arcs. Its LAP optimum is a lower
//! bound for every completion. When that optimum has no cycle shorter than
//! `min_cycle` it is feasible and becomes an incumbent; otherwise the shortest
//! offending cycle `e_1 .. e_k` is split into `k` children, child `t` forbidding
//! `e_t` and requiring `e_1 .. e_{t-1}`. The children partition the parent's
//! solution space minus the offending cycle, so no feasible solution is lost.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::cycles::find_cycles;
use super::lap::{assign, ArcMask};
use super::{min_cycle_in_range, sum_costs, Assignment, DistanceInstance};
use crate::error::{Error, Result};

pub const DEFAULT_NODE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveParams {
    pub min_cycle: usize,
    /// Maximum number of LAP relaxations evaluated before giving up.
    pub node_limit: u64,
}

impl SolveParams {
    pub fn new(min_cycle: usize) -> Self {
        SolveParams { min_cycle, node_limit: DEFAULT_NODE_LIMIT }
    }

    pub fn with_node_limit(mut self, node_limit: u64) -> Self {
        self.node_limit = node_limit;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub root_feasible: bool,
}

struct Node {
    /// Bound quantized to the instance tolerance, so float noise between
    /// equal-cost permutations cannot reorder the queue.
    key: i64,
    seq: u64,
    mask: ArcMask,
    perm: Vec<usize>,
    bound: f64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Max-heap: smallest bound first; among equal bounds the newest node,
    // which dives instead of sweeping a plateau of tied relaxations.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.cmp(&self.key).then(self.seq.cmp(&other.seq))
    }
}

struct Search<'a> {
    inst: &'a DistanceInstance,
    min_cycle: usize,
    quantum: f64,
    node_limit: u64,
    nodes: u64,
    seq: u64,
    incumbent: Option<(i64, Vec<usize>)>,
}

impl Search<'_> {
    fn key(&self, bound: f64) -> i64 {
        (bound / self.quantum).round() as i64
    }

    /// Solves the relaxation under `mask`, records feasible solutions and
    /// returns a node worth expanding.
    fn evaluate(&mut self, mask: ArcMask) -> Result<Option<Node>> {
        if self.nodes >= self.node_limit {
            return Err(Error::NodeLimit(self.node_limit));
        }
        self.nodes += 1;
        let Some(perm) = assign(self.inst, &mask) else {
            return Ok(None);
        };
        let bound = sum_costs(self.inst, &perm);
        let key = self.key(bound);
        if matches!(&self.incumbent, Some((best, _)) if key >= *best) {
            return Ok(None);
        }
        if super::min_cycle_len(&perm) >= self.min_cycle {
            self.incumbent = Some((key, perm));
            return Ok(None);
        }
        self.seq += 1;
        Ok(Some(Node { key, seq: self.seq, mask, perm, bound }))
    }

    fn branch(&mut self, node: &Node) -> Result<Vec<Node>> {
        // Shortest cycle first, ties by smallest member (find_cycles order).
        let cycle = find_cycles(&node.perm).swap_remove(0);
        debug_assert!(cycle.len() < self.min_cycle);
        let arcs: Vec<(usize, usize)> = cycle.iter().map(|&i| (i, node.perm[i])).collect();

        let mut children = Vec::with_capacity(arcs.len());
        for (t, &(fi, fj)) in arcs.iter().enumerate() {
            let mut mask = node.mask.clone();
            for &(ri, rj) in &arcs[..t] {
                mask.require(ri, rj);
            }
            mask.forbid(fi, fj);
            if let Some(child) = self.evaluate(mask)? {
                children.push(child);
            }
        }
        Ok(children)
    }
}

/// Exact minimum-total assignment whose every cycle has at least
/// `params.min_cycle` members.
pub fn solve_min_cycle_atsp(inst: &DistanceInstance, params: SolveParams) -> Result<Assignment> {
    solve_with_stats(inst, params).map(|(a, _)| a)
}

pub fn solve_with_stats(inst: &DistanceInstance, params: SolveParams) -> Result<(Assignment, SolveStats)> {
    let n = inst.n();
    if !min_cycle_in_range(n, params.min_cycle) {
        return Err(Error::InvalidMinCycle { n, min_cycle: params.min_cycle });
    }

    let mut search = Search {
        inst,
        min_cycle: params.min_cycle,
        quantum: 1e-9 * inst.max_cost().max(1.0),
        node_limit: params.node_limit.max(1),
        nodes: 0,
        seq: 0,
        incumbent: None,
    };

    let mut heap = BinaryHeap::new();
    if let Some(root) = search.evaluate(ArcMask::off_diagonal(n))? {
        heap.push(root);
    } else if search.incumbent.is_none() {
        return Err(Error::Infeasible);
    }
    let root_feasible = heap.is_empty();

    while let Some(node) = heap.pop() {
        if matches!(&search.incumbent, Some((best, _)) if node.key >= *best) {
            break;
        }
        debug_assert!(node.bound.is_finite());
        for child in search.branch(&node)? {
            heap.push(child);
        }
    }

    let (_, perm) = search.incumbent.ok_or(Error::Infeasible)?;
    let stats = SolveStats { nodes: search.nodes, root_feasible };
    Ok((Assignment::from_perm(inst, perm)?, stats))
}
