/// Cycle decomposition of a permutation. Each cycle starts at its smallest
/// member; cycles are ordered by length, then by smallest member.
pub fn find_cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(i);
            i = perm[i];
        }
        cycles.push(cycle);
    }
    // Stable sort keeps smallest-member order within equal lengths.
    cycles.sort_by_key(Vec::len);
    cycles
}

/// Length of the shortest cycle, 0 for an empty permutation.
pub fn min_cycle_len(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut best = usize::MAX;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            len += 1;
            i = perm[i];
        }
        best = best.min(len);
    }
    if best == usize::MAX {
        0
    } else {
        best
    }
}
