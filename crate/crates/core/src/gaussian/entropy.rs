use crate::error::{Error, Result};

use super::symplectic::{symplectic_eigenvalues, SymplecticSpectrum};
use super::CovarianceMatrix;
use crate::real::Real;

/// Inputs in `[-NEGATIVE_SLACK, 0)` are treated as rounding noise and clamped.
const NEGATIVE_SLACK: f64 = 1e-12;

/// Bosonic entropy function `G(x) = (x+1) log2(x+1) - x log2(x)` in bits.
///
/// Evaluated as `log2(1+x) + x log2(1 + 1/x)`, which stays accurate both for
/// `x -> 0` and for the large occupation numbers produced by strong
/// modulation, where the direct difference cancels catastrophically.
pub fn bosonic_entropy_g(x: f64) -> Result<f64> {
    if x.is_nan() || x < -NEGATIVE_SLACK {
        return Err(Error::Domain(format!(
            "bosonic entropy needs a non-negative argument, got {x}"
        )));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok((x.ln_1p() + x * (1.0 / x).ln_1p()) / std::f64::consts::LN_2)
}

/// Entropy in bits of a state with the given symplectic spectrum.
pub fn entropy_of_spectrum(spectrum: &SymplecticSpectrum) -> Result<f64> {
    spectrum
        .values
        .iter()
        .try_fold(0.0, |acc, &l| Ok(acc + bosonic_entropy_g((l - 1.0) / 2.0)?))
}

/// Von Neumann entropy `S = sum_i G((lambda_i - 1)/2)` in bits.
pub fn von_neumann_entropy<R: Real>(cov: &CovarianceMatrix<R>) -> Result<f64> {
    entropy_of_spectrum(cov.spectrum())
}

/// Entropy of a raw matrix, computing its spectrum on the fly.
pub(crate) fn matrix_entropy<R: Real>(m: &nalgebra::DMatrix<R>) -> Result<(f64, usize)> {
    let spectrum = symplectic_eigenvalues(m)?;
    Ok((entropy_of_spectrum(&spectrum)?, spectrum.clamp_warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_at_zero_and_one() {
        assert_eq!(bosonic_entropy_g(0.0).unwrap(), 0.0);
        assert!((bosonic_entropy_g(1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn g_at_one_half_matches_reference() {
        // 1.5 log2 1.5 + 0.5, computed to 30 digits independently.
        let reference = 1.377_443_751_081_734_4;
        assert!((bosonic_entropy_g(0.5).unwrap() - reference).abs() < 1e-15);
    }

    #[test]
    fn g_negative_inputs() {
        assert_eq!(bosonic_entropy_g(-5e-13).unwrap(), 0.0);
        assert!(matches!(bosonic_entropy_g(-1e-6), Err(Error::Domain(_))));
        assert!(bosonic_entropy_g(f64::NAN).is_err());
    }

    #[test]
    fn g_large_argument_asymptotics() {
        // G(x) = log2(x) + 1/ln2 + O(1/x)
        let x: f64 = 5e5;
        let asym =
            x.log2() + 1.0 / std::f64::consts::LN_2 + 1.0 / (2.0 * x * std::f64::consts::LN_2);
        assert!((bosonic_entropy_g(x).unwrap() - asym).abs() < 1e-10);
    }

    #[test]
    fn g_small_argument_is_continuous() {
        let x: f64 = 1e-12;
        let direct = -x * x.log2() + x / std::f64::consts::LN_2;
        assert!((bosonic_entropy_g(x).unwrap() - direct).abs() < 1e-20);
    }
}
