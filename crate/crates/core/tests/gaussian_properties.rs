//! Property tests of the Gaussian-state engine on random physical states.

mod common;

use cvqkd_core::gaussian::{
    bosonic_entropy_g, symplectic_eigenvalues, symplectic_eigenvalues_numeric, GaussianSystem,
    Quadrature, Role,
};
use cvqkd_core::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Reference entropy function, written in the textbook form.
fn g_reference(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (x + 1.0) * (x + 1.0).log2() - x * x.log2()
    }
}

fn system(seed: u64, modes: usize, max_nu: f64) -> GaussianSystem<f64> {
    common::random_system(&mut common::rng(seed), modes, max_nu)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_function_matches_reference(x in 1e-6f64..1e3) {
        let got = bosonic_entropy_g(x).unwrap();
        let want = g_reference(x);
        prop_assert!((got - want).abs() <= 1e-10 * want.max(1.0));
    }

    #[test]
    fn thermal_state_has_its_own_spectrum(v in 1.0f64..1e4) {
        let sys = GaussianSystem::thermal(v, Role::Alice).unwrap();
        let spec = symplectic_eigenvalues(sys.matrix()).unwrap();
        prop_assert!((spec.values[0] - v).abs() <= 1e-12 * v);
        let s = sys.entropy().unwrap();
        prop_assert!((s - g_reference((v - 1.0) / 2.0)).abs() <= 1e-9 * s.max(1.0));
    }

    #[test]
    fn spectra_are_physical_and_entropy_nonnegative(seed in any::<u64>(), modes in 1usize..6) {
        let sys = system(seed, modes, 5.0);
        let spec = symplectic_eigenvalues(sys.matrix()).unwrap();
        prop_assert_eq!(spec.values.len(), modes);
        prop_assert!(spec.values.iter().all(|&l| l >= 1.0));
        prop_assert!(spec.values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(sys.entropy().unwrap() >= 0.0);
    }

    #[test]
    fn symplectic_operations_preserve_entropy(seed in any::<u64>(), t in 0.0f64..1.0, r in -2.0f64..2.0, th in 0.0f64..6.3) {
        let sys = system(seed, 3, 4.0);
        let s0 = sys.entropy().unwrap();
        let out = sys
            .apply_beamsplitter(0, 2, t).unwrap()
            .apply_squeezer(1, r).unwrap()
            .apply_phase_rotation(2, th).unwrap();
        prop_assert!((out.entropy().unwrap() - s0).abs() < 1e-8 * s0.max(1.0));
    }

    #[test]
    fn subadditivity_and_araki_lieb(seed in any::<u64>()) {
        let sys = system(seed, 4, 3.0);
        let (s_ab, s_a, s_b) = (
            sys.entropy().unwrap(),
            sys.entropy_of(&[0, 1]).unwrap(),
            sys.entropy_of(&[2, 3]).unwrap(),
        );
        prop_assert!(s_ab <= s_a + s_b + 1e-9);
        prop_assert!(s_ab + 1e-9 >= (s_a - s_b).abs());
    }

    #[test]
    fn pure_bipartitions_have_equal_entropies(seed in any::<u64>(), modes in 2usize..6, cut in 1usize..5) {
        let cut = 1 + (cut - 1) % (modes - 1);
        let sys = common::random_pure_system(&mut common::rng(seed), modes);
        prop_assert!(sys.entropy().unwrap() < 1e-7);
        let left: Vec<usize> = (0..cut).collect();
        let right: Vec<usize> = (cut..modes).collect();
        let d = sys.entropy_of(&left).unwrap() - sys.entropy_of(&right).unwrap();
        prop_assert!(d.abs() < 1e-8, "{}", d);
    }

    #[test]
    fn conditioning_never_increases_variances(seed in any::<u64>(), mode in 0usize..4, p_quad in any::<bool>()) {
        let sys = system(seed, 4, 5.0);
        let q = if p_quad { Quadrature::P } else { Quadrature::X };
        let cond = sys.condition_on_homodyne(mode, q).unwrap();
        let keep: Vec<usize> = (0..4).filter(|&m| m != mode).collect();
        let before = sys.reduce(&keep).unwrap();
        for i in 0..6 {
            prop_assert!(cond.matrix()[(i, i)] <= before.matrix()[(i, i)] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn classical_conditioning_duplicates_homodyne(seed in any::<u64>(), mode in 0usize..3) {
        let sys = system(seed, 3, 3.0);
        let a = sys.condition_on_homodyne(mode, Quadrature::X).unwrap();
        let b = sys.condition_on_classical(&[(mode, Quadrature::X)]).unwrap();
        prop_assert!(common::max_abs_diff(a.matrix(), b.matrix()) < 1e-10);
    }

    #[test]
    fn closed_form_and_numeric_spectra_agree(seed in any::<u64>(), max_nu in 1.0f64..20.0) {
        let sys = system(seed, 2, max_nu.max(1.0 + 1e-9));
        let closed = symplectic_eigenvalues(sys.matrix()).unwrap().values;
        let numeric = symplectic_eigenvalues_numeric(sys.matrix()).unwrap();
        for (a, b) in closed.iter().zip(&numeric) {
            prop_assert!((a - b).abs() <= 1e-9 * b, "{} vs {}", a, b);
        }
    }

    #[test]
    fn lossy_channel_output_variance(v in 1.0f64..100.0, eta in 0.0f64..1.0, eps in 0.0f64..1.0) {
        let sys = GaussianSystem::thermal(v, Role::Bob).unwrap().apply_lossy_channel(0, eta, eps).unwrap();
        let want = eta * (v + eps) + 1.0 - eta;
        prop_assert!((sys.matrix()[(0, 0)] - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn beamsplitter_on_epr_arm(v in 1.0f64..100.0, eta in 0.0f64..1.0) {
        let sys = GaussianSystem::epr_source(v)
            .unwrap()
            .tensor(&GaussianSystem::vacuum(&[Role::EveHeld]))
            .apply_beamsplitter(1, 2, eta)
            .unwrap();
        let m = sys.matrix();
        prop_assert!((m[(2, 2)] - (eta * v + 1.0 - eta)).abs() <= 1e-12 * v);
        prop_assert!((m[(0, 2)] - (eta * (v * v - 1.0)).sqrt()).abs() <= 1e-12 * v);
    }
}

#[test]
fn two_mode_squeezed_vacuum_blocks() {
    let id = GaussianSystem::epr_source(1.0).unwrap();
    assert_eq!(id.matrix(), &DMatrix::identity(4, 4));
    let m = GaussianSystem::epr_source(2.0).unwrap().matrix().clone();
    let c = 3f64.sqrt();
    assert!((m[(0, 2)] - c).abs() < 1e-15 && (m[(1, 3)] + c).abs() < 1e-15);
    let spec = symplectic_eigenvalues(&m).unwrap();
    assert!(spec.values.iter().all(|&l| (l - 1.0).abs() < 1e-12));
}

#[test]
fn thermal_three_has_two_bits() {
    let sys = GaussianSystem::thermal(3.0, Role::EveHeld).unwrap();
    assert!((sys.entropy().unwrap() - 2.0).abs() < 1e-14);
}

#[test]
fn homodyne_on_epr_prepares_squeezed_state() {
    for v in [1.5, 10.0, 1e4] {
        let cond = GaussianSystem::epr_source(v)
            .unwrap()
            .condition_on_homodyne(0, Quadrature::X)
            .unwrap();
        assert!((cond.matrix()[(0, 0)] - 1.0 / v).abs() < 1e-12);
        assert!((cond.matrix()[(1, 1)] - v).abs() < 1e-12 * v);
    }
}

#[test]
fn homodyne_on_received_mode_gives_alice_conditional_variance() {
    let (va, eta, eps) = (10.0, 0.4, 0.1);
    let cond = GaussianSystem::epr_source(va)
        .unwrap()
        .apply_lossy_channel(1, eta, eps)
        .unwrap()
        .condition_on_homodyne(1, Quadrature::X)
        .unwrap();
    let want = va - eta * (va * va - 1.0) / (eta * (va + eps) + 1.0 - eta);
    assert!((cond.matrix()[(0, 0)] - want).abs() < 1e-12);
    assert!((cond.matrix()[(1, 1)] - va).abs() < 1e-12);
}

#[test]
fn heterodyne_on_coherent_source_prepares_vacuum_signal() {
    let cond = GaussianSystem::epr_source(7.0)
        .unwrap()
        .condition_on_heterodyne(0)
        .unwrap();
    assert!(common::max_abs_diff(cond.matrix(), &DMatrix::identity(2, 2)) < 1e-12);
}

#[test]
fn measuring_uncorrelated_modes_leaves_the_rest() {
    let sys = common::random_system(&mut common::rng(3), 2, 3.0);
    let joint = sys.tensor(&GaussianSystem::thermal(2.0, Role::EveHeld).unwrap());
    for cond in [
        joint.condition_on_homodyne(2, Quadrature::P).unwrap(),
        joint.condition_on_heterodyne(2).unwrap(),
        joint.condition_on_classical(&[(2, Quadrature::X)]).unwrap(),
    ] {
        assert!(common::max_abs_diff(cond.matrix(), sys.matrix()) < 1e-14);
    }
}

#[test]
fn two_mode_noisy_state_entropy_agrees_across_paths() {
    let sys = GaussianSystem::epr_source(10.0)
        .unwrap()
        .apply_lossy_channel(1, 0.5, 0.1)
        .unwrap();
    let s = sys.entropy().unwrap();
    let numeric: f64 = symplectic_eigenvalues_numeric(sys.matrix())
        .unwrap()
        .iter()
        .map(|&l| g_reference((l - 1.0) / 2.0))
        .sum();
    assert!(s > 0.0 && (s - numeric).abs() < 1e-9);
}

#[test]
fn unphysical_matrices_are_rejected() {
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.5]));
    assert!(matches!(
        symplectic_eigenvalues(&m),
        Err(Error::NonPhysical { .. })
    ));
    // Inside the silent band: clamped to 1 without a warning.
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0 - 1e-10, 1.0]));
    let spec = symplectic_eigenvalues(&m).unwrap();
    assert_eq!((spec.values[0], spec.clamp_warnings), (1.0, 0));
    // Inside the warning band: clamped with a warning.
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0 - 1e-7, 1.0]));
    let spec = symplectic_eigenvalues(&m).unwrap();
    assert_eq!((spec.values[0], spec.clamp_warnings), (1.0, 1));
}

#[test]
fn invalid_operations_are_rejected() {
    let sys = GaussianSystem::epr_source(3.0).unwrap();
    assert!(matches!(
        sys.apply_beamsplitter(0, 5, 0.5),
        Err(Error::ModeIndex { .. })
    ));
    assert!(sys.apply_beamsplitter(0, 1, 1.5).is_err());
    assert!(sys.apply_beamsplitter(0, 0, 0.5).is_err());
    let mut m = sys.matrix().clone();
    m[(0, 1)] = 0.3;
    assert!(matches!(
        GaussianSystem::new(m, vec![Role::Alice, Role::Bob]),
        Err(Error::NotSymmetric { .. })
    ));
}
