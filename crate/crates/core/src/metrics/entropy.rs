//! Kozachenko–Leonenko nearest-neighbour entropy of a point set.

use crate::error::{invalid, Result};
use crate::metrics::tour::euclid;
use crate::special::{digamma, ln_unit_ball_volume};

/// Floor applied to neighbour distances so coincident points give a finite estimate.
pub const DISTANCE_FLOOR: f64 = 1e-12;

/// Neighbour order used for a set of `t` points: nearest integer to `ln t`, at least 1.
pub fn neighbor_order(t: usize) -> usize {
    ((t as f64).ln().round() as usize).max(1)
}

/// Entropy estimate from the `k`-th neighbour distances of `t` points in `d` dimensions.
///
/// `(d/t) Σ ln ε_i + ψ(t) − ψ(k) + ln V_d`
fn estimate(kth_distances: impl Iterator<Item = f64>, t: usize, k: usize, d: usize) -> f64 {
    let sum_ln: f64 = kth_distances.map(|e| e.max(DISTANCE_FLOOR).ln()).sum();
    d as f64 / t as f64 * sum_ln + digamma(t as f64) - digamma(k as f64) + ln_unit_ball_volume(d)
}

/// Entropy estimate of `points` with neighbour order `k`.
///
/// Points are not required to lie in the unit cube.
pub fn oe(points: &[Vec<f64>], k: usize) -> Result<f64> {
    let t = points.len();
    if t < 2 {
        return invalid(format!("entropy needs at least 2 points, got {t}"));
    }
    if k == 0 || k > t - 1 {
        return invalid(format!("neighbour order {k} outside 1..={}", t - 1));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return invalid("points have inconsistent dimensions");
    }
    let mut row = Vec::with_capacity(t - 1);
    let kth = points.iter().enumerate().map(|(i, p)| {
        row.clear();
        row.extend(points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| euclid(p, q)));
        let (_, kth, _) = row.select_nth_unstable_by(k - 1, f64::total_cmp);
        *kth
    });
    Ok(estimate(kth, t, k, d))
}

/// Entropy of every prefix of `points` from `t = 3` on, with `k = neighbor_order(t)`.
///
/// Each point keeps its `K` smallest distances to the others, with `K` the
/// largest order used over the series, so a new point costs `O(d t + t K)`.
pub fn prefix_entropies(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = points.len();
    if n < 3 {
        return invalid(format!("entropy series needs at least 3 points, got {n}"));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return invalid("points have inconsistent dimensions");
    }
    let cap = (3..=n).map(|t| neighbor_order(t).min(t - 1)).max().unwrap_or(1);
    let mut nearest: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n - 2);
    for (t, p) in points.iter().enumerate() {
        let mut own = Vec::with_capacity(cap + 1);
        for (j, q) in points[..t].iter().enumerate() {
            let dist = euclid(p, q);
            push_sorted(&mut nearest[j], dist, cap);
            push_sorted(&mut own, dist, cap);
        }
        nearest.push(own);
        let count = t + 1;
        if count >= 3 {
            let k = neighbor_order(count).min(count - 1);
            out.push(estimate(nearest.iter().map(|list| list[k - 1]), count, k, d));
        }
    }
    Ok(out)
}

fn push_sorted(list: &mut Vec<f64>, v: f64, cap: usize) {
    if list.len() == cap && v >= list[cap - 1] {
        return;
    }
    let pos = list.partition_point(|&x| x <= v);
    list.insert(pos, v);
    list.truncate(cap);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn order_schedule() {
        assert_eq!(neighbor_order(2), 1);
        assert_eq!(neighbor_order(3), 1);
        assert_eq!(neighbor_order(5), 2);
        assert_eq!(neighbor_order(2000), 8);
    }

    #[test]
    fn input_validation() {
        assert!(oe(&[vec![0.0]], 1).is_err());
        let p = vec![vec![0.0], vec![1.0], vec![2.0]];
        assert!(oe(&p, 0).is_err());
        assert!(oe(&p, 3).is_err());
        assert!(oe(&p, 2).is_ok());
        assert!(prefix_entropies(&p[..2]).is_err());
    }

    #[test]
    fn hand_computed_1d_value() {
        // three collinear points, k=1: eps = 1, 1, 2
        let p = vec![vec![0.0], vec![1.0], vec![3.0]];
        let expect = (2f64.ln()) / 3.0 + digamma(3.0) - digamma(1.0) + 2f64.ln();
        assert!((oe(&p, 1).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn incremental_series_matches_direct() {
        let mut rng = crate::rng::stream(3, &[]);
        let p: Vec<Vec<f64>> = (0..120).map(|_| (0..4).map(|_| rng.gen()).collect()).collect();
        let series = prefix_entropies(&p).unwrap();
        assert_eq!(series.len(), 118);
        for (i, &v) in series.iter().enumerate() {
            let t = i + 3;
            let direct = oe(&p[..t], neighbor_order(t)).unwrap();
            assert!((v - direct).abs() < 1e-10, "t={t}");
        }
    }

    #[test]
    fn coincident_points_hit_the_floor() {
        let p = vec![vec![0.4; 6]; 210];
        let v = oe(&p, 5).unwrap();
        let floor = 6.0 * DISTANCE_FLOOR.ln();
        assert!(v < -100.0);
        assert!((v - (floor + digamma(210.0) - digamma(5.0) + ln_unit_ball_volume(6))).abs() < 1e-9);
    }

    #[test]
    fn duplicate_lowers_entropy_more_than_far_point() {
        let mut rng = crate::rng::stream(4, &[]);
        let base: Vec<Vec<f64>> = (0..40).map(|_| (0..3).map(|_| 0.4 + 0.2 * rng.gen::<f64>()).collect()).collect();
        let mut dup = base.clone();
        dup.push(base[7].clone());
        let mut far = base.clone();
        far.push(vec![0.0, 1.0, 0.0]);
        let a = prefix_entropies(&dup).unwrap();
        let b = prefix_entropies(&far).unwrap();
        assert!(a.last().unwrap() < b.last().unwrap());
    }
}
