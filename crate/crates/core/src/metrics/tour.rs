//! Cheapest-insertion tour lengths through observation points.

use crate::error::{invalid, Result};

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Closed tour built by cheapest insertion.
///
/// `perm` holds indices into an external point store; `edges[i]` caches the
/// length of the edge from `perm[i]` to `perm[(i + 1) % perm.len()]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TourState {
    perm: Vec<usize>,
    edges: Vec<f64>,
    length: f64,
}

impl TourState {
    /// Trivial tour over the single point `index`.
    pub fn start(index: usize) -> Self {
        Self { perm: vec![index], edges: vec![0.0], length: 0.0 }
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Tour length summed from scratch over `points`.
    pub fn recompute_length(&self, points: &[Vec<f64>]) -> f64 {
        closed_tour_length(points, &self.perm)
    }

    /// Insert point `new_index` of `points` at the cheapest position.
    ///
    /// Ties go to the earliest tour position. Returns the insertion cost.
    pub fn insert(&mut self, new_index: usize, points: &[Vec<f64>]) -> Result<f64> {
        let dim = points[self.perm[0]].len();
        let new_point = match points.get(new_index) {
            Some(p) => p,
            None => return invalid(format!("point index {new_index} out of range")),
        };
        if new_point.len() != dim {
            return invalid(format!("point has {} coordinates, tour points have {dim}", new_point.len()));
        }
        let k = self.perm.len();
        let to_new: Vec<f64> = self.perm.iter().map(|&j| euclid(&points[j], new_point)).collect();

        let mut best = (0usize, f64::INFINITY);
        for i in 0..k {
            let next = (i + 1) % k;
            let delta = to_new[i] + to_new[next] - self.edges[i];
            if delta < best.1 {
                best = (i, delta);
            }
        }
        let (i, delta) = best;
        // the triangle inequality makes delta >= 0 up to rounding
        let delta = delta.max(0.0);
        let next = (i + 1) % k;
        self.edges[i] = to_new[i];
        self.edges.insert(i + 1, to_new[next]);
        self.perm.insert(i + 1, new_index);
        self.length += delta;
        Ok(delta)
    }
}

/// Length of the closed tour visiting `points` in `order`.
pub fn closed_tour_length(points: &[Vec<f64>], order: &[usize]) -> f64 {
    let n = order.len();
    if n < 2 {
        return 0.0;
    }
    (0..n).map(|i| euclid(&points[order[i]], &points[order[(i + 1) % n]])).sum()
}

/// Heuristic tour length over every prefix of `points`: entry `t-1` covers the first `t` points.
pub fn prefix_tour_lengths(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    if points.is_empty() {
        return invalid("empty point list");
    }
    let mut tour = TourState::start(0);
    let mut out = Vec::with_capacity(points.len());
    out.push(0.0);
    for k in 1..points.len() {
        tour.insert(k, points)?;
        out.push(tour.length());
    }
    Ok(out)
}

pub const EXACT_TSP_MAX_POINTS: usize = 10;

/// Exact minimal closed-tour length by enumerating every tour with the first point fixed.
pub fn exact_tsp(points: &[Vec<f64>]) -> Result<f64> {
    let n = points.len();
    if n == 0 {
        return invalid("exact tour needs at least one point");
    }
    if n > EXACT_TSP_MAX_POINTS {
        return invalid(format!("exact tour limited to {EXACT_TSP_MAX_POINTS} points, got {n}"));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let dist: Vec<Vec<f64>> = points.iter().map(|a| points.iter().map(|b| euclid(a, b)).collect()).collect();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    permute(&mut rest, 0, &dist, &mut best);
    Ok(best)
}

fn permute(rest: &mut [usize], fixed: usize, dist: &[Vec<f64>], best: &mut f64) {
    if fixed == rest.len() {
        let mut len = dist[0][rest[0]] + dist[rest[rest.len() - 1]][0];
        for w in rest.windows(2) {
            len += dist[w[0]][w[1]];
        }
        if len < *best {
            *best = len;
        }
        return;
    }
    for i in fixed..rest.len() {
        rest.swap(fixed, i);
        permute(rest, fixed + 1, dist, best);
        rest.swap(fixed, i);
    }
}
