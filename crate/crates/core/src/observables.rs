use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::DensityMatrix;
use crate::measures::PairDensity;

const IMAG_TOL: f64 = 1e-8;
const ROUNDOFF_EXCESS: f64 = 1e-14;

/// Nearest-neighbour expectation values that fix the two-site reduced state.
///
/// All values are in the spin frame: `spm = ⟨S⁺_i S⁻_{i+1}⟩` and
/// `spp = ⟨S⁺_i S⁺_{i+1}⟩` as measured on the spins themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairObservables {
    pub sz: f64,
    pub spm: f64,
    pub spp: Complex64,
    pub szz: f64,
}

impl PairObservables {
    /// Fills in `⟨S^z S^z⟩` from Wick's theorem, `sz² + |spp|² − spm²`.
    pub fn from_wick(sz: f64, spm: f64, spp: Complex64) -> Self {
        Self { sz, spm, spp, szz: sz * sz + spp.norm_sqr() - spm * spm }
    }

    /// Reads the four expectation values off a two-site density matrix.
    pub fn from_pair_matrix(rho2: &DensityMatrix) -> Result<Self> {
        if rho2.dim() != 4 {
            return Err(Error::validation("expected a two-site density matrix"));
        }
        let e = |r, c| rho2.entry(r, c);
        let spm = e(2, 1);
        if spm.im.abs() > IMAG_TOL {
            return Err(Error::Numerical(format!("<S+S-> has imaginary part {:e}", spm.im)));
        }
        Ok(Self {
            sz: 0.5 * (e(0, 0).re + e(1, 1).re - e(2, 2).re - e(3, 3).re),
            spm: spm.re,
            spp: e(3, 0),
            szz: 0.25 * (e(0, 0).re - e(1, 1).re - e(2, 2).re + e(3, 3).re),
        })
    }

    /// Up-spin probability `a = ⟨S^z⟩ + 1/2`.
    pub fn a(&self) -> f64 {
        self.sz + 0.5
    }

    /// Inverts `Tr[O ρ₂]` for the populations and attaches the coherences.
    ///
    /// The populations are written as `a² + |spp|² − spm²` and its two siblings,
    /// plus whatever part of `szz` departs from Wick's theorem. This is the same
    /// linear solution as `p_uu = szz + sz + 1/4`, but it keeps full relative
    /// precision when `a` is tiny, where the direct form cancels to round-off.
    pub fn pair_density(&self) -> Result<PairDensity> {
        let a = self.a();
        let pairing = self.spp.norm_sqr() - self.spm * self.spm;
        let non_wick = self.szz - (self.sz * self.sz + self.spp.norm_sqr() - self.spm * self.spm);
        let p_uu = a * a + pairing + non_wick;
        let p_dd = (1.0 - a) * (1.0 - a) + pairing + non_wick;
        let p_ud = a * (1.0 - a) - pairing - non_wick;
        let coh_pp = onto_bound(self.spp, (p_uu.max(0.0) * p_dd.max(0.0)).sqrt());
        let coh_pm = onto_bound(Complex64::new(self.spm, 0.0), p_ud.max(0.0));
        PairDensity::new(p_uu, p_ud, p_dd, coh_pp, coh_pm)
            .map_err(|e| Error::Numerical(format!("observables do not define a valid pair state: {e}")))
    }

    /// Largest absolute difference over the four fields.
    pub fn max_abs_diff(&self, other: &PairObservables) -> f64 {
        [
            (self.sz - other.sz).abs(),
            (self.spm - other.spm).abs(),
            (self.spp - other.spp).norm(),
            (self.szz - other.szz).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Pulls a coherence back onto its positivity bound when the excess is at the
/// round-off level of the populations. When a population is itself near zero,
/// an error of 1e-16 in it moves the bound by 1e-8, so the test is done on
/// squared magnitudes.
fn onto_bound(z: Complex64, bound: f64) -> Complex64 {
    let excess = z.norm_sqr() - bound * bound;
    if excess > 0.0 && excess <= ROUNDOFF_EXCESS {
        z * (bound / z.norm())
    } else {
        z
    }
}

/// Free-function form of [`PairObservables::pair_density`].
pub fn pair_density_from_observables(obs: &PairObservables) -> Result<PairDensity> {
    obs.pair_density()
}
