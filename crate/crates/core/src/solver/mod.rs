//! Assignment with a minimum cycle length.
//!
//! Every student reviews exactly one author and is reviewed by exactly one
//! reviewer, so a solution is a permutation without fixed points. The classic
//! assignment problem (LAP) ignores cycle structure; the asymmetric TSP asks
//! for a single cycle. This module solves the family in between: minimize the
//! total distance subject to every cycle having at least `min_cycle` members.

mod bnb;
mod cycles;
mod instance;
mod lap;
mod oracle;

pub use bnb::{solve_min_cycle_atsp, solve_with_stats, SolveParams, SolveStats, DEFAULT_NODE_LIMIT};
pub use cycles::{find_cycles, min_cycle_len};
pub use instance::{expand_distance, expand_distance_for, DistanceInstance};
pub use lap::solve_lap;
pub use oracle::{brute_force_oracle, ORACLE_MAX_N};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// `perm[i] = j`: reviewer `i` reviews author `j` (zero-based).
    pub perm: Vec<usize>,
    /// Cycle decomposition, shortest first.
    pub cycles: Vec<Vec<usize>>,
    pub total: f64,
}

impl Assignment {
    /// Validates `perm` against `inst` and derives cycles and total.
    pub fn from_perm(inst: &DistanceInstance, perm: Vec<usize>) -> Result<Assignment> {
        let total = total_distance(inst, &perm)?;
        let cycles = find_cycles(&perm);
        Ok(Assignment { perm, cycles, total })
    }

    pub fn min_cycle_len(&self) -> usize {
        self.cycles.first().map_or(0, Vec::len)
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        self.cycles.iter().map(Vec::len).collect()
    }
}

/// Checks that `perm` is a permutation of `0..n` without fixed points.
pub fn check_derangement(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!("length {} for n = {n}", perm.len())));
    }
    let mut seen = vec![false; n];
    for (i, &j) in perm.iter().enumerate() {
        if j >= n {
            return Err(Error::InvalidPermutation(format!("target {j} out of range")));
        }
        if j == i {
            return Err(Error::InvalidPermutation(format!("fixed point at {i}")));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidPermutation(format!("author {j} assigned twice")));
        }
    }
    Ok(())
}

/// Sum of `cost(i, perm[i])`.
pub fn total_distance(inst: &DistanceInstance, perm: &[usize]) -> Result<f64> {
    check_derangement(perm, inst.n())?;
    Ok(sum_costs(inst, perm))
}

/// Summed in ascending order so that two assignments using the same multiset
/// of arc costs get bit-identical totals.
pub(crate) fn sum_costs(inst: &DistanceInstance, perm: &[usize]) -> f64 {
    let mut costs: Vec<f64> = perm.iter().enumerate().map(|(i, &j)| inst.cost_unchecked(i, j)).collect();
    costs.sort_by(f64::total_cmp);
    costs.iter().sum()
}

/// Whether some permutation of `n` elements has all cycles of length ≥ `min_cycle`.
pub fn min_cycle_feasible(n: usize, min_cycle: usize) -> bool {
    n >= 2 && min_cycle >= 2 && min_cycle <= n
}

/// The operating range of the solver: `2..=n/2`, or `n` for a single tour.
pub fn min_cycle_in_range(n: usize, min_cycle: usize) -> bool {
    n >= 2 && min_cycle >= 2 && (min_cycle <= n / 2 || min_cycle == n)
}
