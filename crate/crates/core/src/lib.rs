//! Exact entanglement dynamics of the cyclic XY spin-1/2 chain in a transverse
//! field, quenched from the fully polarized state `|↓↓…↓⟩`.
//!
//! Two independent engines compute the same nearest-neighbour observables:
//!
//! * [`hilbert`] builds the full `2^n` Hamiltonian and evolves the state by
//!   dense diagonalization. It is slow and exact, and serves as the oracle.
//! * [`analytic`] uses the closed-form two-spin solution and the free-fermion
//!   solution for odd rings.
//!
//! [`measures`] turns observables into concurrences and entropies, and
//! [`sweep`] drives time series, field sweeps and engine comparisons.
//!
//! Sites are numbered from 0 in the public API.

pub mod analytic;
pub mod error;
pub mod hilbert;
pub mod measures;
mod observables;
pub mod params;
pub mod sweep;

pub use error::{Error, Result};
pub use hilbert::{DensityMatrix, StateVector};
pub use measures::{Channel, ConcurrenceResult, PairDensity};
pub use observables::{pair_density_from_observables, PairObservables};
pub use params::ChainParams;
pub use sweep::{Engine, SweepConfig, SweepRow, TimePoint};
