//! Closed-form dynamics: the two- and three-spin solutions, the fermionic
//! solution for odd rings, and the envelope, resonance and short-time analyses
//! built on it.

mod bcs;
mod bogoliubov;
mod closed_form;
mod envelope;

pub use crate::observables::{pair_density_from_observables, PairObservables};
pub use bcs::{bcs_diagonalize, BcsMode, BcsProblem};
pub use bogoliubov::{bogoliubov_spectrum, pair_observables, BogoliubovMode};
pub use closed_form::{
    three_qubit_a, three_qubit_c2, two_qubit_a, two_qubit_max, two_qubit_observables, two_qubit_state,
    ThreeQubitSolution, TwoQubitMax, TwoQubitSolution,
};
pub use envelope::{
    envelope_am, resonance_fields, resonant_a_approx, resonant_c2_peak, saturation_time, short_time_a, ResonanceField,
    ResonanceTable,
};

/// `sin(λt)/λ`, continuous through `λ = 0` where it equals `t`.
pub(crate) fn sin_over(lambda: f64, t: f64) -> f64 {
    let x = lambda * t;
    if x.abs() < 1e-6 {
        t * (1.0 - x * x / 6.0)
    } else {
        x.sin() / lambda
    }
}
