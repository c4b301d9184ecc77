use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadratic pair problem `Σ_i x_i (c†c + d†d) + y_i (c†d† + h.c.)`, one `(x, y)` per pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcsProblem {
    pub pairs: Vec<(f64, f64)>,
}

/// Quasiparticle data for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcsMode {
    pub lambda: f64,
    pub u2: f64,
    pub v2: f64,
    /// Product `u·v` in the sign convention that cancels the off-diagonal term.
    pub uv: f64,
    /// Constant energy offset `(x − λ)/2`.
    pub shift: f64,
}

impl BcsMode {
    /// Off-diagonal coefficient left after the rotation: `2x·uv + y(u² − v²)`.
    pub fn residual(&self, x: f64, y: f64) -> f64 {
        2.0 * x * self.uv + y * (self.u2 - self.v2)
    }
}

pub fn bcs_diagonalize(problem: &BcsProblem) -> Result<Vec<BcsMode>> {
    problem
        .pairs
        .iter()
        .map(|&(x, y)| {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::validation(format!("non-finite pair coefficients ({x}, {y})")));
            }
            let lambda = x.hypot(y);
            if lambda == 0.0 {
                // any rotation works; keep the identity
                return Ok(BcsMode { lambda, u2: 1.0, v2: 0.0, uv: 0.0, shift: 0.0 });
            }
            let ratio = x / lambda;
            Ok(BcsMode {
                lambda,
                u2: 0.5 * (1.0 + ratio),
                v2: 0.5 * (1.0 - ratio),
                uv: -y / (2.0 * lambda),
                shift: 0.5 * (x - lambda),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(x: f64, y: f64) -> BcsMode {
        bcs_diagonalize(&BcsProblem { pairs: vec![(x, y)] }).unwrap()[0]
    }

    #[test]
    fn textbook_pairs() {
        let m = one(1.0, 0.0);
        assert_eq!((m.lambda, m.u2, m.v2), (1.0, 1.0, 0.0));
        let m = one(0.0, 1.0);
        assert_eq!((m.lambda, m.u2, m.v2), (1.0, 0.5, 0.5));
        let m = one(3.0, 4.0);
        assert_eq!(m.lambda, 5.0);
        assert!((m.u2 - 0.8).abs() < 1e-15 && (m.v2 - 0.2).abs() < 1e-15);
        assert_eq!(m.shift, -1.0);
        assert!(m.residual(3.0, 4.0).abs() < 1e-12);
    }

    #[test]
    fn null_pair_is_identity() {
        let m = one(0.0, 0.0);
        assert_eq!((m.lambda, m.u2, m.v2, m.shift), (0.0, 1.0, 0.0, 0.0));
    }

    #[test]
    fn residual_vanishes_and_squares_consistent() {
        let pairs: Vec<(f64, f64)> =
            (0..200).map(|k| ((k as f64 * 0.37).sin() * 5.0, (k as f64 * 1.13).cos() * 3.0)).collect();
        let modes = bcs_diagonalize(&BcsProblem { pairs: pairs.clone() }).unwrap();
        for (m, &(x, y)) in modes.iter().zip(&pairs) {
            assert!(m.residual(x, y).abs() < 1e-12);
            assert_eq!(m.u2 + m.v2, 1.0);
            assert!((m.uv * m.uv - m.u2 * m.v2).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(bcs_diagonalize(&BcsProblem { pairs: vec![(f64::NAN, 1.0)] }).is_err());
    }
}
