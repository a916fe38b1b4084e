//! Shared helpers for the integration tests: seeded random Gaussian states
//! built as `S D S^T` from thermal modes and random symplectic circuits.

#![allow(dead_code)]

use cvqkd_core::gaussian::{GaussianSystem, Role};
use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random symplectic circuit (beamsplitters, squeezers, phase rotations)
/// applied to independent thermal modes with symplectic eigenvalues drawn
/// from `[1, max_nu]`. `max_nu = 1` gives a pure state.
pub fn random_system(rng: &mut ChaCha8Rng, modes: usize, max_nu: f64) -> GaussianSystem<f64> {
    let mut sys = GaussianSystem::thermal(1.0, Role::Alice).unwrap();
    for _ in 1..modes {
        sys = sys.tensor(&GaussianSystem::thermal(1.0, Role::Alice).unwrap());
    }
    let mut data = sys.matrix().clone();
    for k in 0..modes {
        let nu = if max_nu > 1.0 {
            rng.random_range(1.0..max_nu)
        } else {
            1.0
        };
        data[(2 * k, 2 * k)] = nu;
        data[(2 * k + 1, 2 * k + 1)] = nu;
    }
    let roles = vec![Role::Alice; modes];
    let mut sys = GaussianSystem::new(data, roles).unwrap();
    for _ in 0..3 * modes {
        let a = rng.random_range(0..modes);
        sys = match rng.random_range(0..3) {
            0 if modes > 1 => {
                let b = (a + rng.random_range(1..modes)) % modes;
                sys.apply_beamsplitter(a, b, rng.random_range(0.0..1.0))
                    .unwrap()
            }
            1 => sys.apply_squeezer(a, rng.random_range(-1.0..1.0)).unwrap(),
            _ => sys
                .apply_phase_rotation(a, rng.random_range(0.0..std::f64::consts::TAU))
                .unwrap(),
        };
    }
    sys
}

pub fn random_pure_system(rng: &mut ChaCha8Rng, modes: usize) -> GaussianSystem<f64> {
    random_system(rng, modes, 1.0)
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
