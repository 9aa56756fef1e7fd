use super::{min_cycle_feasible, min_cycle_len, sum_costs, Assignment, DistanceInstance};
use crate::error::{Error, Result};

pub const ORACLE_MAX_N: usize = 9;

/// Exhaustive search over all permutations; first strictly better total in
/// lexicographic order wins. Refuses `n > 9`.
pub fn brute_force_oracle(inst: &DistanceInstance, min_cycle: usize) -> Result<Assignment> {
    let n = inst.n();
    if n > ORACLE_MAX_N {
        return Err(Error::OracleTooLarge(n));
    }
    if !min_cycle_feasible(n, min_cycle) {
        return Err(Error::InvalidMinCycle { n, min_cycle });
    }

    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    enumerate(inst, min_cycle, 0, &mut perm, &mut used, &mut best);

    let (_, perm) = best.ok_or(Error::Infeasible)?;
    Assignment::from_perm(inst, perm)
}

fn enumerate(
    inst: &DistanceInstance,
    min_cycle: usize,
    row: usize,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    best: &mut Option<(f64, Vec<usize>)>,
) {
    let n = perm.len();
    if row == n {
        if min_cycle_len(perm) >= min_cycle {
            let total = sum_costs(inst, perm);
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                *best = Some((total, perm.clone()));
            }
        }
        return;
    }
    for j in 0..n {
        if j == row || used[j] {
            continue;
        }
        used[j] = true;
        perm[row] = j;
        enumerate(inst, min_cycle, row + 1, perm, used, best);
        used[j] = false;
    }
}
