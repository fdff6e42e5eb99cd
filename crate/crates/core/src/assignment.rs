//! Square assignment solvers used by the diagram distances.

/// Minimum-cost perfect assignment on an `n × n` row-major cost matrix
/// (Hungarian method with potentials, O(n³)). Returns `col_of_row`.
pub(crate) fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    debug_assert_eq!(cost.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    // 1-based arrays, index 0 is the virtual column
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
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
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[row_of[j] - 1] = j - 1;
    }
    col_of_row
}

/// Perfect matching using only entries `<= limit`, if one exists (Kuhn's augmenting paths).
pub(crate) fn perfect_matching_within(cost: &[f64], n: usize, limit: f64) -> Option<Vec<usize>> {
    let mut row_of: Vec<Option<usize>> = vec![None; n];
    for r in 0..n {
        let mut seen = vec![false; n];
        if !augment(cost, n, limit, r, &mut seen, &mut row_of) {
            return None;
        }
    }
    let mut col_of_row = vec![0; n];
    for (c, r) in row_of.iter().enumerate() {
        col_of_row[r.expect("perfect matching covers every column")] = c;
    }
    Some(col_of_row)
}

fn augment(cost: &[f64], n: usize, limit: f64, r: usize, seen: &mut [bool], row_of: &mut [Option<usize>]) -> bool {
    for c in 0..n {
        if seen[c] || cost[r * n + c] > limit {
            continue;
        }
        seen[c] = true;
        if row_of[c].is_none_or(|other| augment(cost, n, limit, other, seen, row_of)) {
            row_of[c] = Some(r);
            return true;
        }
    }
    false
}

/// Assignment minimizing the largest used entry: binary search over the
/// sorted distinct entries with a feasibility check.
pub(crate) fn bottleneck_assignment(cost: &[f64], n: usize) -> (f64, Vec<usize>) {
    if n == 0 {
        return (0.0, Vec::new());
    }
    let mut candidates = cost.to_vec();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    let mut best = perfect_matching_within(cost, n, candidates[hi]).expect("the largest entry admits every pairing");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match perfect_matching_within(cost, n, candidates[mid]) {
            Some(m) => {
                best = m;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    (candidates[lo], best)
}
