use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ChainParams;

/// Upper envelope of `a(t)`: every `sin²(λ_j t)` set to one.
///
/// It is the supremum over time only when the mode frequencies are incommensurate.
pub fn envelope_am(params: &ChainParams) -> Result<f64> {
    params.validate()?;
    params.require_odd_chain()?;
    let n = params.n;
    let (b, v, g) = (params.b, params.v, params.g);
    let sum: f64 = (1..n)
        .map(|j| {
            let w = 2.0 * PI * j as f64 / n as f64;
            let num = 4.0 * g * g * w.sin().powi(2);
            let x = b + 2.0 * v * w.cos();
            // g = 0 at a resonance gives 0/0; the numerator vanishes identically
            if num == 0.0 {
                0.0
            } else {
                num / (x * x + num)
            }
        })
        .sum();
    Ok(sum / n as f64)
}

/// One resonance of the ring: the field `b_j = −2v cos w_j` that tunes mode `j` to zero
/// single-particle energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceField {
    pub j: usize,
    pub b_center: f64,
    /// `2g|sin w_j|`
    pub width: f64,
    /// Quasienergy on resonance, `2g|sin w_j|`.
    pub lambda_res: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceTable {
    pub fields: Vec<ResonanceField>,
    /// `2πv/n`: peaks are resolved when `g` is below this.
    pub resolvability_threshold: f64,
    pub resolvable: bool,
}

/// The `(n−1)/2` distinct resonances `j = 1..(n−1)/2`.
pub fn resonance_fields(params: &ChainParams) -> Result<ResonanceTable> {
    params.validate()?;
    params.require_odd_chain()?;
    let n = params.n as f64;
    let fields = (1..=(params.n - 1) / 2)
        .map(|j| {
            let w = 2.0 * PI * j as f64 / n;
            let width = 2.0 * params.g.abs() * w.sin().abs();
            ResonanceField { j, b_center: -2.0 * params.v * w.cos(), width, lambda_res: width }
        })
        .collect();
    let resolvability_threshold = 2.0 * PI * params.v.abs() / n;
    Ok(ResonanceTable { fields, resolvability_threshold, resolvable: params.g.abs() <= resolvability_threshold })
}

/// Single-mode approximation on resonance `j`: `(2/n) sin²(2g|sin w_j| t)`.
pub fn resonant_a_approx(n: usize, g: f64, j: usize, t: f64) -> f64 {
    let w = 2.0 * PI * j as f64 / n as f64;
    let lambda = 2.0 * g.abs() * w.sin().abs();
    2.0 / n as f64 * (lambda * t).sin().powi(2)
}

/// Predicted height of the negative-parity pair-concurrence peaks on resonance `j`,
/// floored at zero.
pub fn resonant_c2_peak(n: usize, j: usize) -> f64 {
    let nf = n as f64;
    let w = 2.0 * PI * j as f64 / nf;
    let (s, c) = w.sin_cos();
    let radicand = (1.0 - 2.0 / nf).powi(2) - 2.0 / (nf * nf) * c * c;
    (4.0 / nf * (c.abs() - s.abs() * radicand.max(0.0).sqrt())).max(0.0)
}

/// Tenth-order short-time expansion of `a(t)` at `b = v = 0`, the same for every `n`.
pub fn short_time_a(g: f64, t: f64) -> f64 {
    let x2 = (g * t).powi(2);
    // 2x² − 2x⁴ + (8/9)x⁶ − (2/9)x⁸ + (8/255)x¹⁰ in Horner form
    x2 * (2.0 + x2 * (-2.0 + x2 * (8.0 / 9.0 + x2 * (-2.0 / 9.0 + x2 * (8.0 / 255.0)))))
}

/// Smallest positive `t` with `short_time_a(g, t) = 1/2`, by bisection.
pub fn saturation_time(g: f64) -> Result<f64> {
    if g == 0.0 || !g.is_finite() {
        return Err(Error::Degenerate("saturation needs a nonzero anisotropy g".into()));
    }
    let f = |x: f64| short_time_a(1.0, x) - 0.5;
    // bracket the first sign change in the dimensionless time x = |g| t
    let step = 1e-3;
    let mut lo = 0.0;
    let mut hi = step;
    while f(hi) < 0.0 {
        lo = hi;
        hi += step;
        if hi > 10.0 {
            return Err(Error::Numerical("short-time series never reaches 1/2".into()));
        }
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi) / g.abs())
}
