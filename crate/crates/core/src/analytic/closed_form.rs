use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{clamp_domain, Error, Result};
use crate::hilbert::StateVector;
use crate::observables::PairObservables;

/// Two spins: `λ = √(b² + g²)` and `a_m = g²/(b² + g²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitSolution {
    pub lambda: f64,
    pub a_m: f64,
}

impl TwoQubitSolution {
    pub fn new(b: f64, g: f64) -> Self {
        let lambda = b.hypot(g);
        let a_m = if g == 0.0 { 0.0 } else { g * g / (b * b + g * g) };
        Self { lambda, a_m }
    }
}

/// `a(t) = a_m sin²(λt)` for the two-spin chain.
pub fn two_qubit_a(b: f64, g: f64, t: f64) -> f64 {
    let s = TwoQubitSolution::new(b, g);
    s.a_m * (s.lambda * t).sin().powi(2)
}

/// `e^{-iHt}|↓↓⟩ = i(g/λ) sin λt |↑↑⟩ + [cos λt + i(b/λ) sin λt] |↓↓⟩`.
pub fn two_qubit_state(b: f64, g: f64, t: f64) -> StateVector {
    let lambda = b.hypot(g);
    let (s, c) = if lambda == 0.0 { (0.0, 1.0) } else { (lambda * t).sin_cos() };
    let (gs, bs) = if lambda == 0.0 { (0.0, 0.0) } else { (g / lambda * s, b / lambda * s) };
    let zero = Complex64::new(0.0, 0.0);
    StateVector::normalized(vec![Complex64::new(0.0, gs), zero, zero, Complex64::new(c, bs)])
        .expect("closed-form state is normalized")
}

/// Pair observables of the two-spin chain, read off [`two_qubit_state`].
pub fn two_qubit_observables(b: f64, g: f64, t: f64) -> PairObservables {
    let psi = two_qubit_state(b, g, t);
    let up = psi.amplitudes()[0];
    let down = psi.amplitudes()[3];
    PairObservables::from_wick(up.norm_sqr() - 0.5, 0.0, up.conj() * down)
}

/// Peak one-vs-rest concurrence and the first time it is reached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitMax {
    pub c_max: f64,
    pub t_star: f64,
}

/// Maximum of `2√(a(1−a))` over time for two spins.
///
/// When `a_m ≥ 1/2` a Bell-like state is reached at `t* = arcsin((2a_m)^{-1/2})/λ`;
/// otherwise the maximum `2√(a_m(1−a_m))` sits at `t* = π/(2λ)`.
pub fn two_qubit_max(b: f64, g: f64) -> Result<TwoQubitMax> {
    if g == 0.0 || !g.is_finite() || !b.is_finite() {
        return Err(Error::Degenerate("no entanglement is generated without anisotropy (g = 0)".into()));
    }
    let s = TwoQubitSolution::new(b, g);
    Ok(if s.a_m >= 0.5 {
        TwoQubitMax { c_max: 1.0, t_star: (1.0 / (2.0 * s.a_m).sqrt()).asin() / s.lambda }
    } else {
        TwoQubitMax { c_max: 2.0 * (s.a_m * (1.0 - s.a_m)).sqrt(), t_star: std::f64::consts::FRAC_PI_2 / s.lambda }
    })
}

/// Three spins: the dynamics lives in `span{|↓↓↓⟩, |W⟩}` with energies `E₀ ± λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeQubitSolution {
    pub e0: f64,
    pub lambda: f64,
    pub a_m: f64,
}

impl ThreeQubitSolution {
    pub fn new(b: f64, v: f64, g: f64) -> Self {
        let d2 = (b - v) * (b - v) + 3.0 * g * g;
        let a_m = if g == 0.0 { 0.0 } else { 2.0 * g * g / d2 };
        Self { e0: -b / 2.0 - v, lambda: d2.sqrt(), a_m }
    }
}

/// `a(t) = 2g²/((b−v)² + 3g²) · sin²(λt)`.
pub fn three_qubit_a(b: f64, v: f64, g: f64, t: f64) -> f64 {
    let s = ThreeQubitSolution::new(b, v, g);
    s.a_m * (s.lambda * t).sin().powi(2)
}

/// Pair concurrence of the three-spin ring as a function of `a ∈ [0, 2/3]`.
pub fn three_qubit_c2(a: f64) -> Result<f64> {
    let a = clamp_domain("a", a, 0.0, 2.0 / 3.0, 1e-12)?;
    Ok((a - ((2.0 - 3.0 * a).max(0.0) * a).sqrt()).abs())
}
