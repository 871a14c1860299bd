//! Bi-objective Pareto utilities (minimization).

use std::cmp::Ordering;

use crate::{Error, Result};

/// `true` iff `u` is no worse than `v` in both objectives and better in one.
pub fn dominates(u: &[f64; 2], v: &[f64; 2]) -> bool {
    u[0] <= v[0] && u[1] <= v[1] && (u[0] < v[0] || u[1] < v[1])
}

fn lexicographic(a: &[f64; 2], b: &[f64; 2]) -> Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

/// Nondomination ranks: 0 for the nondominated set, `k` for points that are
/// nondominated once ranks `< k` are removed.
///
/// Runs in `O(n log n)`: points are visited in lexicographic order, so only
/// earlier points can dominate a later one, and the fronts built so far can
/// be binary-searched by their lowest second objective.
pub fn nondominated_sort(points: &[[f64; 2]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lexicographic(&points[a], &points[b]));
    // per front: lowest second objective and the smallest first objective attaining it
    let mut fronts: Vec<(f64, f64)> = Vec::new();
    let mut ranks = vec![0; points.len()];
    for &i in &order {
        let [x, y] = points[i];
        let blocked = |f: &(f64, f64)| f.0 < y || (f.0 == y && f.1 < x);
        let rank = fronts.partition_point(blocked);
        if rank == fronts.len() {
            fronts.push((y, x));
        } else if y < fronts[rank].0 {
            fronts[rank] = (y, x);
        }
        ranks[i] = rank;
    }
    ranks
}

/// Crowding distance of each point within one front; boundary points get infinity.
pub fn crowding_distance(points: &[[f64; 2]]) -> Vec<f64> {
    let n = points.len();
    let mut distance = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for m in 0..2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| points[a][m].total_cmp(&points[b][m]).then(a.cmp(&b)));
        let lo = points[order[0]][m];
        let hi = points[order[n - 1]][m];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let gap = points[order[w + 1]][m] - points[order[w - 1]][m];
            distance[order[w]] += gap / span;
        }
    }
    distance
}

/// Area dominated by `front` and bounded by `reference`.
///
/// Every point must be strictly below the reference in both objectives.
pub fn hypervolume(front: &[[f64; 2]], reference: [f64; 2]) -> Result<f64> {
    if let Some(p) = front
        .iter()
        .find(|p| !(p[0] < reference[0] && p[1] < reference[1]))
    {
        return Err(Error::Contract(format!(
            "point {p:?} does not dominate the reference {reference:?}"
        )));
    }
    let mut sorted = front.to_vec();
    sorted.sort_by(lexicographic);
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for [x, y] in sorted {
        if y < ceiling {
            area += (reference[0] - x) * (ceiling - y);
            ceiling = y;
        }
    }
    Ok(area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_cases() {
        assert!(dominates(&[1.0, 1.0], &[2.0, 2.0]));
        assert!(!dominates(&[1.0, 2.0], &[2.0, 1.0]));
        assert!(!dominates(&[2.0, 1.0], &[1.0, 2.0]));
        assert!(!dominates(&[1.0, 1.0], &[1.0, 1.0]));
        assert!(dominates(&[1.0, 1.0], &[1.0, 2.0]));
    }

    #[test]
    fn hand_ranks() {
        assert_eq!(nondominated_sort(&[[1.0, 2.0], [2.0, 1.0]]), vec![0, 0]);
        assert_eq!(
            nondominated_sort(&[[1.0, 1.0], [2.0, 2.0], [3.0, 0.0]]),
            vec![0, 1, 0]
        );
        // duplicates share a rank; a tie in one objective still dominates
        assert_eq!(
            nondominated_sort(&[[1.0, 1.0], [1.0, 1.0], [1.0, 2.0], [2.0, 1.0]]),
            vec![0, 0, 1, 1]
        );
    }

    #[test]
    fn hand_hypervolumes() {
        assert_eq!(hypervolume(&[[0.0, 0.0]], [1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(hypervolume(&[[0.0, 1.0], [1.0, 0.0]], [2.0, 2.0]).unwrap(), 3.0);
        assert_eq!(hypervolume(&[], [2.0, 2.0]).unwrap(), 0.0);
        assert!(hypervolume(&[[2.0, 0.0]], [2.0, 2.0]).is_err());
    }

    #[test]
    fn crowding_boundaries_infinite() {
        let d = crowding_distance(&[[0.0, 3.0], [1.0, 2.0], [2.0, 0.5], [3.0, 0.0]]);
        assert!(d[0].is_infinite() && d[3].is_infinite());
        assert!((d[1] - (2.0 / 3.0 + 2.5 / 3.0)).abs() < 1e-12);
    }
}
