//! Non-dominated sorting and crowding distance (minimization).

/// `a` dominates `b`: no worse in every objective and better in at least one.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Partitions `objectives` into fronts of indices, best front first.
///
/// Classic bookkeeping: for each `p`, the set it dominates and the number of
/// members dominating it; front `k+1` is what remains once front `k` is
/// removed. Indices within a front are ascending.
pub fn non_dominated_sort(objectives: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by_p: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut n_dominating = vec![0usize; n];
    let mut front = Vec::new();
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            if dominates(&objectives[p], &objectives[q]) {
                dominated_by_p[p].push(q);
            } else if dominates(&objectives[q], &objectives[p]) {
                n_dominating[p] += 1;
            }
        }
        if n_dominating[p] == 0 {
            front.push(p);
        }
    }

    let mut fronts = Vec::new();
    while !front.is_empty() {
        let mut next = Vec::new();
        for &p in &front {
            for &q in &dominated_by_p[p] {
                n_dominating[q] -= 1;
                if n_dominating[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut front, next));
    }
    fronts
}

/// Crowding distance of each member of one front.
///
/// Per objective the front is sorted; both boundary members get infinity and
/// interior members add the normalized gap between their neighbours. An
/// objective with zero range adds nothing.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let k = front[0].len();
    let mut order: Vec<usize> = (0..n).collect();
    for i in 0..k {
        order.sort_by(|&a, &b| front[a][i].total_cmp(&front[b][i]).then(a.cmp(&b)));
        let lo = front[order[0]][i];
        let hi = front[order[n - 1]][i];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if !(range > 0.0) || !range.is_finite() {
            continue;
        }
        for j in 1..n - 1 {
            let m = order[j];
            if dist[m].is_finite() {
                dist[m] += (front[order[j + 1]][i] - front[order[j - 1]][i]) / range;
            }
        }
    }
    dist
}
