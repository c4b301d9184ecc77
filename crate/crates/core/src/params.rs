use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical configuration of the cyclic XY chain
///
/// `H = Σ_i [ b S^z_i − v_x S^x_i S^x_{i+1} − v_y S^y_i S^y_{i+1} ]` with site `n`
/// coupled back to site 1, written in terms of the hopping `v = (v_x + v_y)/4`
/// and the anisotropy `g = (v_x − v_y)/4`. Energies use ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub n: usize,
    pub b: f64,
    pub v: f64,
    pub g: f64,
}

impl ChainParams {
    pub fn new(n: usize, b: f64, v: f64, g: f64) -> Result<Self> {
        let params = Self { n, b, v, g };
        params.validate()?;
        Ok(params)
    }

    /// Builds the parameters from the Cartesian couplings `(v_x, v_y)`.
    pub fn from_couplings(n: usize, b: f64, vx: f64, vy: f64) -> Result<Self> {
        Self::new(n, b, (vx + vy) / 4.0, (vx - vy) / 4.0)
    }

    pub fn vx(&self) -> f64 {
        2.0 * (self.v + self.g)
    }

    pub fn vy(&self) -> f64 {
        2.0 * (self.v - self.g)
    }

    pub fn with_field(self, b: f64) -> Self {
        Self { b, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::validation("chain length must be positive"));
        }
        for (name, x) in [("b", self.b), ("v", self.v), ("g", self.g)] {
            if !x.is_finite() {
                return Err(Error::validation(format!("{name} must be finite, got {x}")));
            }
        }
        Ok(())
    }

    /// Odd `n ≥ 3`, the chains covered by the fermionic solution.
    pub fn is_odd_chain(&self) -> bool {
        self.n >= 3 && self.n % 2 == 1
    }

    pub(crate) fn require_odd_chain(&self) -> Result<()> {
        if self.is_odd_chain() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "the fermionic solution needs an odd chain length n >= 3, got n = {}",
                self.n
            )))
        }
    }
}
