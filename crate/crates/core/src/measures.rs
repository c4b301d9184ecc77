//! Entanglement quantifiers. Logarithms are base 2 throughout.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{clamp_domain, Error, Result};
use crate::hilbert::{hermitian_part, DensityMatrix};

const DOMAIN_SLACK: f64 = 1e-12;
const POPULATION_SLACK: f64 = 1e-12;
const TRACE_SLACK: f64 = 1e-10;
const POSITIVITY_SLACK: f64 = 1e-10;
const RANK_TOL: f64 = 1e-13;
const FAILURE_TOL: f64 = 1e-8;
const PATTERN_TOL: f64 = 1e-8;

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// `h(a) = −a log₂ a − (1−a) log₂(1−a)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(a: f64) -> Result<f64> {
    let a = clamp_domain("a", a, 0.0, 1.0, DOMAIN_SLACK)?;
    Ok(-xlog2x(a) - xlog2x(1.0 - a))
}

/// `S(ρ) = −Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.eigenvalues().into_iter().map(|l| -xlog2x(l)).sum::<f64>().max(0.0)
}

/// One-vs-rest concurrence `2√(λ₊λ₋)` of a single-qubit reduced state.
pub fn one_rest_concurrence(rho1: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != 2 {
        return Err(Error::validation(format!("expected a 2x2 density matrix, got {0}x{0}", rho1.dim())));
    }
    // λ₊λ₋ = det ρ₁
    let det = (rho1.entry(0, 0) * rho1.entry(1, 1) - rho1.entry(0, 1) * rho1.entry(1, 0)).re;
    Ok((2.0 * det.max(0.0).sqrt()).min(1.0))
}

/// Wootters concurrence of an arbitrary two-qubit state.
///
/// The square roots of the eigenvalues of `ρρ̃` are the singular values of
/// `√ρ √ρ̃`, so they are read off an SVD instead of square-rooting a spectrum.
/// Eigenvalues of `ρ` below `1e-13` are treated as round-off and dropped.
/// Eigenvalues of `ρ` below `−1e-8` are reported as a numerical failure.
pub fn wootters_concurrence(rho2: &DensityMatrix) -> Result<f64> {
    if rho2.dim() != 4 {
        return Err(Error::validation(format!("expected a 4x4 density matrix, got {0}x{0}", rho2.dim())));
    }
    let rho = hermitian_part(rho2.matrix());
    let eig = SymmetricEigen::new(rho);
    if let Some(&low) = eig.eigenvalues.iter().find(|&&l| l < -FAILURE_TOL) {
        return Err(Error::Numerical(format!("density matrix has eigenvalue {low:e}")));
    }
    let sqrt_vals = eig.eigenvalues.map(|l| if l < RANK_TOL { 0.0 } else { l.sqrt() });
    let vecs = &eig.eigenvectors;
    let sqrt_rho = vecs * DMatrix::from_diagonal(&sqrt_vals.map(|x| Complex64::new(x, 0.0))) * vecs.adjoint();
    // σ_y ⊗ σ_y in the computational basis
    let flip = DMatrix::from_fn(4, 4, |r, c| match (r, c) {
        (0, 3) | (3, 0) => Complex64::new(-1.0, 0.0),
        (1, 2) | (2, 1) => Complex64::new(1.0, 0.0),
        _ => Complex64::new(0.0, 0.0),
    });
    let sqrt_tilde = &flip * sqrt_rho.map(|z| z.conj()) * &flip;
    let mut roots: Vec<f64> = SVD::new(&sqrt_rho * sqrt_tilde, false, false).singular_values.iter().copied().collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).clamp(0.0, 1.0))
}

/// `E = h((1 + √(1−C²))/2)`.
pub fn formation_from_concurrence(c: f64) -> Result<f64> {
    let c = clamp_domain("C", c, 0.0, 1.0, DOMAIN_SLACK)?;
    binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

/// Two-site reduced state of a parity- and translation-symmetric chain.
///
/// In the basis `(↑↑, ↑↓, ↓↑, ↓↓)` the matrix is
///
/// ```text
/// | p_uu   0       0      coh_pp* |
/// | 0      p_ud    coh_pm* 0      |
/// | 0      coh_pm  p_ud    0      |
/// | coh_pp 0       0      p_dd    |
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairDensity {
    pub p_uu: f64,
    pub p_ud: f64,
    pub p_dd: f64,
    pub coh_pp: Complex64,
    pub coh_pm: Complex64,
}

impl PairDensity {
    pub fn new(p_uu: f64, p_ud: f64, p_dd: f64, coh_pp: Complex64, coh_pm: Complex64) -> Result<Self> {
        let pd = Self { p_uu, p_ud, p_dd, coh_pp, coh_pm };
        pd.validate()?;
        Ok(pd)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.p_uu, self.p_ud, self.p_dd, self.coh_pp.re, self.coh_pp.im, self.coh_pm.re, self.coh_pm.im];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("pair density has non-finite entries"));
        }
        if self.p_uu.min(self.p_ud).min(self.p_dd) < -POPULATION_SLACK {
            return Err(Error::validation(format!("negative population in {self:?}")));
        }
        let trace = self.p_uu + 2.0 * self.p_ud + self.p_dd;
        if (trace - 1.0).abs() > TRACE_SLACK {
            return Err(Error::validation(format!("populations sum to {trace}, expected 1")));
        }
        if self.coh_pm.norm() > self.p_ud.max(0.0) + POSITIVITY_SLACK
            || self.coh_pp.norm() > self.pp_bound() + POSITIVITY_SLACK
        {
            return Err(Error::validation(format!("coherences violate positivity in {self:?}")));
        }
        Ok(())
    }

    fn pp_bound(&self) -> f64 {
        (self.p_uu.max(0.0) * self.p_dd.max(0.0)).sqrt()
    }

    /// The full 4×4 matrix.
    pub fn to_matrix(&self) -> DensityMatrix {
        let z = Complex64::new(0.0, 0.0);
        let r = |x: f64| Complex64::new(x, 0.0);
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            r(self.p_uu), z, z, self.coh_pp.conj(),
            z, r(self.p_ud), self.coh_pm.conj(), z,
            z, self.coh_pm, r(self.p_ud), z,
            self.coh_pp, z, z, r(self.p_dd),
        ]);
        DensityMatrix::from_trusted(m)
    }

    /// `2(|coh_pp| − p_ud)`, the positive-parity branch before flooring at zero.
    pub fn positive_branch(&self) -> f64 {
        2.0 * (self.coh_pp.norm() - self.p_ud)
    }

    /// `2(|coh_pm| − √(p_uu p_dd))`, the negative-parity branch before flooring at zero.
    pub fn negative_branch(&self) -> f64 {
        2.0 * (self.coh_pm.norm() - self.pp_bound())
    }
}

/// Which kind of Bell-like correlation carries the pair concurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    /// Same parity as `|↓↓⟩`: the `|↑↑⟩ ↔ |↓↓⟩` coherence wins.
    #[serde(rename = "pos")]
    PositiveParity,
    /// The `|↑↓⟩ ↔ |↓↑⟩` coherence wins.
    #[serde(rename = "neg")]
    NegativeParity,
    None,
}

impl Channel {
    pub fn label(self) -> &'static str {
        match self {
            Channel::PositiveParity => "pos",
            Channel::NegativeParity => "neg",
            Channel::None => "none",
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceResult {
    pub value: f64,
    pub channel: Channel,
}

/// Closed-form concurrence `2 max(|coh_pm| − √(p_uu p_dd), |coh_pp| − p_ud, 0)`.
pub fn parity_concurrence(pd: &PairDensity) -> ConcurrenceResult {
    let pos = pd.positive_branch();
    let neg = pd.negative_branch();
    if pos <= 0.0 && neg <= 0.0 {
        return ConcurrenceResult { value: 0.0, channel: Channel::None };
    }
    let (value, channel) = if pos >= neg { (pos, Channel::PositiveParity) } else { (neg, Channel::NegativeParity) };
    ConcurrenceResult { value: value.min(1.0), channel }
}

/// Reads a parity-symmetric two-site density matrix back into its five parameters.
pub fn pair_density_from_matrix(rho2: &DensityMatrix) -> Result<PairDensity> {
    if rho2.dim() != 4 {
        return Err(Error::validation(format!("expected a 4x4 density matrix, got {0}x{0}", rho2.dim())));
    }
    const OFF_PATTERN: [(usize, usize); 8] = [(0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (2, 3), (3, 1), (3, 2)];
    let mut worst: Option<(usize, usize, f64)> = None;
    for (r, c) in OFF_PATTERN {
        let mag = rho2.entry(r, c).norm();
        if mag > PATTERN_TOL && worst.is_none_or(|w| mag > w.2) {
            worst = Some((r, c, mag));
        }
    }
    let middle_gap = (rho2.entry(1, 1) - rho2.entry(2, 2)).norm();
    if middle_gap > PATTERN_TOL && worst.is_none_or(|w| middle_gap > w.2) {
        worst = Some((1, 1, middle_gap));
    }
    if let Some((row, col, magnitude)) = worst {
        return Err(Error::Structure { row, col, magnitude });
    }
    PairDensity::new(
        rho2.entry(0, 0).re,
        0.5 * (rho2.entry(1, 1).re + rho2.entry(2, 2).re),
        rho2.entry(3, 3).re,
        rho2.entry(3, 0),
        rho2.entry(2, 1),
    )
}
