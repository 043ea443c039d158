//! Scalar special functions: standard normal pdf/cdf, digamma, unit-ball volume.

use std::f64::consts::PI;

/// Euler–Mascheroni constant; `digamma(1) = -EULER_GAMMA`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// `ln Φ(z)`, accurate in the far lower tail where `Φ` underflows.
pub fn ln_norm_cdf(z: f64) -> f64 {
    if z > 0.0 {
        return (-norm_cdf(-z)).ln_1p();
    }
    if z > -30.0 {
        return norm_cdf(z).ln();
    }
    // asymptotic Mills-ratio expansion
    let z2 = z * z;
    let series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    -0.5 * z2 - (-z).ln() - LN_SQRT_2PI + series.ln()
}

/// Digamma function for `x > 0`.
///
/// Shifts the argument above 10 with the recurrence `ψ(x) = ψ(x+1) - 1/x`,
/// then applies the asymptotic Bernoulli series (error < 1e-13).
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma defined here for positive arguments only");
    if x == 1.0 {
        return -EULER_GAMMA;
    }
    let mut acc = 0.0;
    let mut x = x;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    acc + x.ln() - 0.5 * inv - tail
}

/// `ln V_d`, the log volume of the unit ball in `d` dimensions.
///
/// `Γ(1 + d/2)` is formed as an exact product for integer and half-integer
/// arguments, so no general gamma routine is needed.
pub fn ln_unit_ball_volume(d: usize) -> f64 {
    let half_d = d as f64 / 2.0;
    let ln_gamma = if d.is_multiple_of(2) {
        (1..=d / 2).map(|j| (j as f64).ln()).sum::<f64>()
    } else {
        // Γ(m + 3/2) = Γ(1/2) Π_{j=0}^{m} (j + 1/2), d = 2m + 1
        0.5 * PI.ln() + (0..=(d - 1) / 2).map(|j| (j as f64 + 0.5).ln()).sum::<f64>()
    };
    half_d * PI.ln() - ln_gamma
}
