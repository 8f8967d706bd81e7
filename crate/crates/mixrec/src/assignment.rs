//! Minimum-cost assignment for component label alignment.
//!
//! Exhaustive enumeration is exact and cheap up to 8 components; the
//! Hungarian algorithm (shortest augmenting path, O(n^3)) covers the rest.

/// Returns `assign` minimizing `sum_i cost[i][assign[i]]` over permutations.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    if cost.len() <= 8 {
        exhaustive(cost).0
    } else {
        hungarian(cost)
    }
}

/// Exact search over all n! permutations; also reports the gap between the
/// best and second-best total cost for ambiguity detection.
pub fn exhaustive(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut second = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let total: f64 = p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        match &mut best {
            Some((bp, bc)) => {
                if total < *bc {
                    second = *bc;
                    *bc = total;
                    bp.copy_from_slice(p);
                } else if total < second {
                    second = total;
                }
            }
            None => best = Some((p.to_vec(), total)),
        }
    });
    let (assign, cost_best) = best.expect("nonempty cost matrix");
    (assign, second - cost_best)
}

fn permute(items: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Shortest-augmenting-path Hungarian algorithm over float costs.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1]; // p[j]: row matched to column j (1-based)
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
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
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    assign
}
