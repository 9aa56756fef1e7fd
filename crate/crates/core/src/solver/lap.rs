//! Linear assignment by shortest augmenting paths (Hungarian method with
//! potentials), restricted to an allowed-arc mask.

use super::{Assignment, DistanceInstance};
use crate::error::{Error, Result};

/// Row-major `n × n` mask of usable arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ArcMask {
    n: usize,
    allowed: Vec<bool>,
}

impl ArcMask {
    /// Every off-diagonal arc.
    pub(crate) fn off_diagonal(n: usize) -> Self {
        let mut allowed = vec![true; n * n];
        for i in 0..n {
            allowed[i * n + i] = false;
        }
        ArcMask { n, allowed }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        self.allowed[i * self.n + j]
    }

    pub(crate) fn forbid(&mut self, i: usize, j: usize) {
        self.allowed[i * self.n + j] = false;
    }

    /// Forces arc `(i, j)` by removing every competitor in row `i` and column `j`.
    pub(crate) fn require(&mut self, i: usize, j: usize) {
        debug_assert!(self.get(i, j));
        for k in 0..self.n {
            if k != j {
                self.allowed[i * self.n + k] = false;
            }
            if k != i {
                self.allowed[k * self.n + j] = false;
            }
        }
    }
}

/// Minimum-cost perfect matching of rows to columns over allowed arcs, or
/// `None` when no perfect matching exists.
pub(crate) fn assign(inst: &DistanceInstance, mask: &ArcMask) -> Option<Vec<usize>> {
    let n = inst.n();
    // One-based arrays with a virtual column 0, as in the classic formulation.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![f64::INFINITY; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|u| *u = false);

        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;

            for j in 1..=n {
                if used[j] {
                    continue;
                }
                if mask.get(i0 - 1, j - 1) {
                    let cur = inst.cost_unchecked(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }

            if !delta.is_finite() {
                return None;
            }

            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }

            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[row_of[j] - 1] = j - 1;
    }
    Some(perm)
}

/// Optimal assignment ignoring cycle lengths. Its total is a lower bound for
/// every minimum-cycle variant of the same instance.
pub fn solve_lap(inst: &DistanceInstance) -> Result<Assignment> {
    let n = inst.n();
    if n < 2 {
        return Err(Error::InvalidMinCycle { n, min_cycle: 2 });
    }
    let perm = assign(inst, &ArcMask::off_diagonal(n)).ok_or(Error::Infeasible)?;
    Assignment::from_perm(inst, perm)
}
