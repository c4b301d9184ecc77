//! Exact diagonalization of the cyclic XY chain on the full `2^n` Hilbert space.
//!
//! Basis convention: site 0 is the most significant bit of a basis index and a
//! set bit means spin down. With `n` sites the all-down state is therefore the
//! last basis vector, `2^n − 1`, and the number of up spins in basis state `s`
//! is `n − popcount(s)`.
//!
//! Everything here is brute force on purpose: the oracle has to be exact to
//! machine precision so the closed-form results can be checked against it.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ChainParams;

/// Largest chain the dense routines accept unless told otherwise.
pub const DEFAULT_MAX_SITES: usize = 14;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-10;
const SCHMIDT_TOL: f64 = 1e-10;

/// Bit mask of `site` inside a basis index of an `n`-site register.
#[inline]
pub fn site_mask(n: usize, site: usize) -> usize {
    1 << (n - 1 - site)
}

/// Number of up spins in basis state `index`.
#[inline]
pub fn up_count(n: usize, index: usize) -> u32 {
    n as u32 - index.count_ones()
}

fn dim_to_sites(dim: usize) -> Option<usize> {
    (dim >= 2 && dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

/// A normalized pure state of `n` spins.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Wraps `amplitudes`, which must have power-of-two length and unit norm.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = dim_to_sites(amplitudes.len()).ok_or_else(|| {
            Error::validation(format!("state length {} is not a power of two >= 2", amplitudes.len()))
        })?;
        let amplitudes = DVector::from_vec(amplitudes);
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::validation(format!("state is not normalized: |psi|^2 = {norm2}")));
        }
        Ok(Self { n, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::validation("cannot normalize a zero or non-finite vector"));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > usize::BITS as usize - 2 {
            return Err(Error::validation(format!("unsupported register size n = {n}")));
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::validation(format!("basis index {index} out of range for n = {n}")));
        }
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Every spin down, `|↓↓…↓⟩`.
pub fn all_down_state(params: &ChainParams) -> Result<StateVector> {
    params.validate()?;
    StateVector::basis_state(params.n, (1usize << params.n) - 1)
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::validation("density matrix must be square and non-empty"));
        }
        let dim = entries.nrows();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((entries[(r, c)] - entries[(c, r)].conj()).norm());
            }
        }
        if worst > HERMITIAN_TOL {
            return Err(Error::validation(format!("matrix is not Hermitian (deviation {worst:e})")));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::validation(format!("trace is {trace}, expected 1")));
        }
        let rho = Self { entries };
        let min_eig = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::validation(format!("matrix has negative eigenvalue {min_eig:e}")));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        Self { entries: a * a.adjoint() }
    }

    /// Skips validation; callers guarantee the matrix is a density matrix by construction.
    pub(crate) fn from_trusted(entries: DMatrix<Complex64>) -> Self {
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let hermitian = hermitian_part(&self.entries);
        let mut values: Vec<f64> = SymmetricEigen::new(hermitian).eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }
}

pub(crate) fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()).scale(0.5)
}

/// Real symmetric Hamiltonian on a `2^n` spin register.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    matrix: DMatrix<f64>,
}

impl Hamiltonian {
    /// Wraps an arbitrary real matrix after checking it is a symmetric `2^n × 2^n` operator.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::validation("Hamiltonian must be square"));
        }
        let n = dim_to_sites(matrix.nrows())
            .ok_or_else(|| Error::validation("Hamiltonian dimension must be a power of two >= 2"))?;
        let asym = (&matrix - matrix.transpose()).amax();
        if asym.is_nan() || asym > SYMMETRY_TOL {
            return Err(Error::validation(format!("Hamiltonian is not Hermitian (asymmetry {asym:e})")));
        }
        Ok(Self { n, matrix })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        let a = psi.amplitudes();
        let re = a.map(|z| z.re);
        let im = a.map(|z| z.im);
        re.dot(&(&self.matrix * &re)) + im.dot(&(&self.matrix * &im))
    }

    /// `⟨i|H|j⟩` for arbitrary complex vectors, used to project onto small subspaces.
    pub fn matrix_element(&self, bra: &StateVector, ket: &StateVector) -> Complex64 {
        let hk: DVector<Complex64> = self.matrix.map(|x| Complex64::new(x, 0.0)) * ket.amplitudes();
        bra.amplitudes().dotc(&hk)
    }
}

/// Dense Hamiltonian with the default size cap.
pub fn build_hamiltonian(params: &ChainParams) -> Result<Hamiltonian> {
    build_hamiltonian_capped(params, DEFAULT_MAX_SITES)
}

/// Dense Hamiltonian of the cyclic chain; rejects chains longer than `max_sites`.
///
/// A two-site ring has a single bond: `(1,2)` and `(2,1)` are the same pair and
/// are counted once.
pub fn build_hamiltonian_capped(params: &ChainParams, max_sites: usize) -> Result<Hamiltonian> {
    params.validate()?;
    let n = params.n;
    if n < 2 {
        return Err(Error::validation("the oracle Hamiltonian needs at least two sites"));
    }
    if n > max_sites {
        return Err(Error::Capacity { n, max: max_sites });
    }
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..dim {
        h[(s, s)] = params.b * (up_count(n, s) as f64 - n as f64 / 2.0);
    }
    let bonds: Vec<(usize, usize)> = if n == 2 { vec![(0, 1)] } else { (0..n).map(|i| (i, (i + 1) % n)).collect() };
    for (i, j) in bonds {
        let (mi, mj) = (site_mask(n, i), site_mask(n, j));
        for s in 0..dim {
            let flipped = s ^ mi ^ mj;
            // Opposite spins exchange through S+S- (hopping); equal spins pair-flip through S+S+ (anisotropy).
            let opposite = ((s & mi) == 0) != ((s & mj) == 0);
            h[(flipped, s)] -= if opposite { params.v } else { params.g };
        }
    }
    Ok(Hamiltonian { n, matrix: h })
}

#[derive(Debug, Clone)]
struct EigenBlock {
    indices: Vec<usize>,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

/// Precomputed eigendecomposition of a Hamiltonian, for evaluating `e^{-iHt}|ψ⟩` at many times.
///
/// When the Hamiltonian conserves spin parity the two parity sectors are
/// diagonalized separately, which is still exact and roughly four times cheaper.
#[derive(Debug, Clone)]
pub struct Propagator {
    dim: usize,
    blocks: Vec<EigenBlock>,
}

impl Propagator {
    pub fn new(h: &Hamiltonian) -> Self {
        let n = h.n_sites();
        let dim = h.dim();
        let m = h.matrix();
        let parity = |s: usize| up_count(n, s) % 2;
        let conserves_parity = (0..dim).all(|r| (0..dim).all(|c| parity(r) == parity(c) || m[(r, c)] == 0.0));
        let sectors: Vec<Vec<usize>> = if conserves_parity {
            (0..2).map(|p| (0..dim).filter(|&s| parity(s) == p).collect()).collect()
        } else {
            vec![(0..dim).collect()]
        };
        let blocks = sectors
            .into_iter()
            .map(|indices| {
                let k = indices.len();
                let sub = DMatrix::from_fn(k, k, |r, c| m[(indices[r], indices[c])]);
                let eig = SymmetricEigen::new(sub);
                EigenBlock { indices, energies: eig.eigenvalues, vectors: eig.eigenvectors }
            })
            .collect();
        Self { dim, blocks }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All eigenvalues, ascending.
    pub fn energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.blocks.iter().flat_map(|b| b.energies.iter().copied()).collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// `e^{-iHt}|ψ⟩`.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.dim() != self.dim {
            return Err(Error::validation(format!(
                "state dimension {} does not match Hamiltonian dimension {}",
                psi.dim(),
                self.dim
            )));
        }
        if t == 0.0 {
            return Ok(psi.clone());
        }
        let amps = psi.amplitudes();
        let mut out = DVector::<Complex64>::zeros(self.dim);
        for block in &self.blocks {
            let re = DVector::from_iterator(block.indices.len(), block.indices.iter().map(|&s| amps[s].re));
            let im = DVector::from_iterator(block.indices.len(), block.indices.iter().map(|&s| amps[s].im));
            let mut cre = block.vectors.tr_mul(&re);
            let mut cim = block.vectors.tr_mul(&im);
            for k in 0..cre.len() {
                let (sin, cos) = (block.energies[k] * t).sin_cos();
                let (x, y) = (cre[k], cim[k]);
                // (x + iy)(cos − i sin)
                cre[k] = x * cos + y * sin;
                cim[k] = y * cos - x * sin;
            }
            let new_re = &block.vectors * cre;
            let new_im = &block.vectors * cim;
            for (k, &s) in block.indices.iter().enumerate() {
                out[s] = Complex64::new(new_re[k], new_im[k]);
            }
        }
        Ok(StateVector { n: psi.n, amplitudes: out })
    }
}

/// `e^{-iHt}|ψ₀⟩` via a full eigendecomposition of `H`.
pub fn evolve_state(h: &Hamiltonian, psi0: &StateVector, t: f64) -> Result<StateVector> {
    Propagator::new(h).evolve(psi0, t)
}

fn check_sites(n: usize, sites: &[usize]) -> Result<()> {
    for (k, &s) in sites.iter().enumerate() {
        if s >= n {
            return Err(Error::validation(format!("site {s} out of range for n = {n}")));
        }
        if sites[..k].contains(&s) {
            return Err(Error::validation(format!("site {s} listed twice")));
        }
    }
    Ok(())
}

/// Amplitudes reshaped into a matrix with rows indexed by the configuration of
/// `rows` (in the given order, first site most significant) and columns by the
/// remaining sites in ascending order.
fn bipartite_matrix(psi: &StateVector, rows: &[usize]) -> DMatrix<Complex64> {
    let n = psi.n_sites();
    let cols: Vec<usize> = (0..n).filter(|s| !rows.contains(s)).collect();
    let pack = |index: usize, sites: &[usize]| {
        sites.iter().fold(0usize, |acc, &site| (acc << 1) | usize::from(index & site_mask(n, site) != 0))
    };
    let mut m = DMatrix::zeros(1 << rows.len(), 1 << cols.len());
    for (index, amp) in psi.amplitudes().iter().enumerate() {
        m[(pack(index, rows), pack(index, &cols))] = *amp;
    }
    m
}

/// Reduced density matrix of `keep_sites`, tracing out every other site.
///
/// The kept sites are ordered as given, the first one being the most significant bit.
pub fn reduced_density(psi: &StateVector, keep_sites: &[usize]) -> Result<DensityMatrix> {
    check_sites(psi.n_sites(), keep_sites)?;
    if keep_sites.is_empty() {
        return Err(Error::validation("at least one site must be kept"));
    }
    let m = bipartite_matrix(psi, keep_sites);
    Ok(DensityMatrix::from_trusted(&m * m.adjoint()))
}

/// `⟨P⟩` with `P = (−1)^{n_↑}`.
pub fn parity_expectation(psi: &StateVector) -> f64 {
    let n = psi.n_sites();
    psi.amplitudes()
        .iter()
        .enumerate()
        .map(|(s, a)| if up_count(n, s).is_multiple_of(2) { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

/// Schmidt coefficients of a pure state across a bipartition.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    /// Non-negative, descending.
    pub coefficients: Vec<f64>,
    /// Number of coefficients above `1e-10`.
    pub schmidt_number: usize,
}

/// Schmidt decomposition of `psi` between `side_a` and the remaining sites.
pub fn schmidt_coefficients(psi: &StateVector, side_a: &[usize]) -> Result<SchmidtDecomposition> {
    let n = psi.n_sites();
    check_sites(n, side_a)?;
    if side_a.is_empty() || side_a.len() == n {
        return Err(Error::validation("both sides of the bipartition must be non-empty"));
    }
    let m = bipartite_matrix(psi, side_a);
    let mut coefficients: Vec<f64> = SVD::new(m, false, false).singular_values.iter().copied().collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    let schmidt_number = coefficients.iter().filter(|&&c| c > SCHMIDT_TOL).count();
    Ok(SchmidtDecomposition { coefficients, schmidt_number })
}
