use super::spec::Bounds;

pub const TR_LENGTH_INIT: f64 = 0.8;
pub const TR_LENGTH_MIN: f64 = 1.0 / 128.0;
pub const TR_LENGTH_MAX: f64 = 1.6;
pub const TR_SUCCESS_TOL: usize = 3;

/// Side length and success/failure counters of a trust region.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegionState {
    pub length: f64,
    pub success_count: usize,
    pub failure_count: usize,
    pub failure_tol: usize,
    pub center: Vec<f64>,
    pub restarts: usize,
}

impl TrustRegionState {
    /// Fresh region around `center` for batches of size `q`.
    pub fn new(center: Vec<f64>, q: usize) -> Self {
        let d = center.len();
        let failure_tol = d.max(4).div_ceil(q.max(1));
        Self { length: TR_LENGTH_INIT, success_count: 0, failure_count: 0, failure_tol, center, restarts: 0 }
    }

    /// Box of side `length` around the center, stretched per dimension by the
    /// normalized lengthscales and clipped to the unit cube.
    pub fn bounds(&self, lengthscales: &[f64]) -> Bounds {
        let d = self.center.len();
        let mean = lengthscales.iter().sum::<f64>() / d as f64;
        let w: Vec<f64> = lengthscales.iter().map(|l| l / mean).collect();
        let geo = (w.iter().map(|v| v.ln()).sum::<f64>() / d as f64).exp();
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for (c, wj) in self.center.iter().zip(&w) {
            let half = 0.5 * self.length * wj / geo;
            let (a, b) = ((c - half).max(0.0), (c + half).min(1.0));
            if a < b {
                lo.push(a);
                hi.push(b);
            } else {
                // degenerate width from extreme lengthscale ratios
                let a = c.clamp(0.0, 1.0 - 1e-9);
                lo.push(a);
                hi.push(a + 1e-9);
            }
        }
        Bounds::new(lo, hi).expect("trust region box lies in the unit cube")
    }
}

/// Advance the counters after one batch; restarts the region when it collapses.
pub fn tr_update(state: &TrustRegionState, improved: bool) -> TrustRegionState {
    let mut s = state.clone();
    if improved {
        s.success_count += 1;
        s.failure_count = 0;
    } else {
        s.success_count = 0;
        s.failure_count += 1;
    }
    if s.success_count == TR_SUCCESS_TOL {
        s.length = (2.0 * s.length).min(TR_LENGTH_MAX);
        s.success_count = 0;
    } else if s.failure_count == s.failure_tol {
        s.length /= 2.0;
        s.failure_count = 0;
    }
    if s.length < TR_LENGTH_MIN {
        s.length = TR_LENGTH_INIT;
        s.success_count = 0;
        s.failure_count = 0;
        s.restarts += 1;
    }
    s
}
