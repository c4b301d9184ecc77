use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use xychain_core::hilbert::{reduced_density, StateVector};
use xychain_core::measures::{
    binary_entropy, formation_from_concurrence, one_rest_concurrence, parity_concurrence, von_neumann_entropy,
    wootters_concurrence,
};
use xychain_core::{DensityMatrix, PairDensity};

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn gaussian_matrix(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

fn wishart(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let a = gaussian_matrix(dim, rng);
    let m = &a * a.adjoint();
    let tr = m.trace();
    let m = m / tr;
    // symmetrize away round-off before validation
    DensityMatrix::new((&m + m.adjoint()) * Complex64::new(0.5, 0.0)).unwrap()
}

fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    gaussian_matrix(dim, rng).qr().q()
}

fn pair_density() -> impl Strategy<Value = PairDensity> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, -3.2..3.2f64, -3.2..3.2f64).prop_map(
        |(w1, w2, w3, r_pp, r_pm, phi_pp, phi_pm)| {
            let total = w1 + w2 + w3 + 1e-12;
            let (p_uu, p_ud, p_dd) = (w1 / total, 0.5 * w2 / total, w3 / total);
            let coh_pp = Complex64::from_polar(r_pp * (p_uu * p_dd).sqrt(), phi_pp);
            let coh_pm = Complex64::from_polar(r_pm * p_ud, phi_pm);
            PairDensity::new(p_uu, p_ud, p_dd, coh_pp, coh_pm).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn wootters_matches_parity_form(pd in pair_density()) {
        let closed = parity_concurrence(&pd);
        let general = wootters_concurrence(&pd.to_matrix()).unwrap();
        prop_assert!((closed.value - general).abs() < 1e-9, "{closed:?} vs {general}");
        prop_assert!(closed.positive_branch_only_if_positive(&pd));
    }
}

trait ChannelCheck {
    fn positive_branch_only_if_positive(&self, pd: &PairDensity) -> bool;
}

impl ChannelCheck for xychain_core::ConcurrenceResult {
    fn positive_branch_only_if_positive(&self, pd: &PairDensity) -> bool {
        use xychain_core::Channel;
        let (pos, neg) = (pd.positive_branch(), pd.negative_branch());
        match self.channel {
            Channel::PositiveParity => pos > 0.0 && pos >= neg,
            Channel::NegativeParity => neg > 0.0 && neg > pos,
            Channel::None => pos <= 0.0 && neg <= 0.0 && self.value == 0.0,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn formation_equals_entropy_for_pure_states(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = StateVector::normalized((0..4).map(|_| gaussian(&mut rng)).collect()).unwrap();
        let c = wootters_concurrence(&DensityMatrix::from_pure(&psi)).unwrap();
        let e = formation_from_concurrence(c).unwrap();
        let s = von_neumann_entropy(&reduced_density(&psi, &[0]).unwrap());
        prop_assert!((e - s).abs() < 1e-8, "E = {e}, S = {s}");
    }

    #[test]
    fn concurrence_invariant_under_local_unitaries(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = wishart(4, &mut rng);
        let u = haar_unitary(2, &mut rng).kronecker(&haar_unitary(2, &mut rng));
        let rotated = &u * rho.matrix() * u.adjoint();
        let rotated = DensityMatrix::new((&rotated + rotated.adjoint()) * Complex64::new(0.5, 0.0)).unwrap();
        let before = wootters_concurrence(&rho).unwrap();
        let after = wootters_concurrence(&rotated).unwrap();
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn binary_entropy_symmetric_and_bounded(a in 0.0..=1.0f64) {
        let h = binary_entropy(a).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
        prop_assert!((h - binary_entropy(1.0 - a).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn formation_monotone_on_grid() {
    let values: Vec<f64> = (0..=1000).map(|k| formation_from_concurrence(k as f64 / 1000.0).unwrap()).collect();
    assert_eq!(values[0], 0.0);
    assert!((values[1000] - 1.0).abs() < 1e-15);
    assert!(values.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn one_rest_concurrence_and_entropy_are_co_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut pairs: Vec<(f64, f64)> = (0..1000)
        .map(|_| {
            let rho = wishart(2, &mut rng);
            (one_rest_concurrence(&rho).unwrap(), von_neumann_entropy(&rho))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in pairs.windows(2) {
        assert!(w[1].1 >= w[0].1 - 1e-12, "{w:?}");
    }
}

#[test]
fn bell_states_are_maximal() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    for amps in [[r(h), z, z, r(h)], [r(h), z, z, r(-h)], [z, r(h), r(h), z], [z, r(h), r(-h), z]] {
        let psi = StateVector::new(amps.to_vec()).unwrap();
        let c = wootters_concurrence(&DensityMatrix::from_pure(&psi)).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        assert!((formation_from_concurrence(c).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn w_state_pair_concurrence() {
    let r = 1.0 / 3f64.sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    for idx in [0b100, 0b001, 0b010] {
        amps[idx] = Complex64::new(r, 0.0);
    }
    let psi = StateVector::new(amps).unwrap();
    let rho2 = reduced_density(&psi, &[0, 1]).unwrap();
    assert!((wootters_concurrence(&rho2).unwrap() - 2.0 / 3.0).abs() < 1e-10);
}
