use nalgebra::DMatrix;

use super::linalg::cholesky;
use super::symplectic::{symplectic_eigenvalues, SymplecticSpectrum};
use crate::error::{Error, Result};
use crate::real::Real;

/// Absolute symmetry tolerance, scaled up by the entry magnitude for entries
/// larger than one (strongly modulated states carry variances ~1e6).
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A validated covariance matrix of an `N`-mode Gaussian state.
///
/// Quadratures are interleaved `(x1, p1, ..., xN, pN)` in shot-noise units:
/// the vacuum has variance 1 and `[x, p] = 2i`. Construction checks symmetry,
/// positive definiteness and the uncertainty principle (every symplectic
/// eigenvalue `>= 1` up to the clamp band), and caches the spectrum.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix<R: Real = f64> {
    data: DMatrix<R>,
    spectrum: SymplecticSpectrum,
}

impl<R: Real> CovarianceMatrix<R> {
    pub fn new(data: DMatrix<R>) -> Result<Self> {
        check_symmetric(&data)?;
        if !data.nrows().is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "covariance matrix dimension {} is odd",
                data.nrows()
            )));
        }
        if data.nrows() > 0 && cholesky(&data).is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        let spectrum = symplectic_eigenvalues(&data)?;
        Ok(Self { data, spectrum })
    }

    pub fn modes(&self) -> usize {
        self.data.nrows() / 2
    }

    pub fn data(&self) -> &DMatrix<R> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<R> {
        self.data
    }

    pub fn spectrum(&self) -> &SymplecticSpectrum {
        &self.spectrum
    }

    /// The same matrix rounded to `f64`.
    pub fn to_f64(&self) -> DMatrix<f64> {
        self.data.map(|v| v.as_f64())
    }
}

pub(crate) fn check_symmetric<R: Real>(m: &DMatrix<R>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Domain(format!(
            "matrix must be square, got {} x {}",
            m.nrows(),
            m.ncols()
        )));
    }
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let (a, b) = (m[(i, j)].as_f64(), m[(j, i)].as_f64());
            let delta = (a - b).abs();
            if !(delta <= SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0)) {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    delta,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1e-9, 0.0, 1.0]);
        assert!(matches!(
            CovarianceMatrix::new(m),
            Err(Error::NotSymmetric { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn rejects_unphysical_and_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]);
        assert!(matches!(
            CovarianceMatrix::new(m),
            Err(Error::NonPhysical { .. })
        ));
        let m = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        assert_eq!(
            CovarianceMatrix::new(m).unwrap_err(),
            Error::NotPositiveDefinite
        );
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(CovarianceMatrix::new(m), Err(Error::Domain(_))));
    }

    #[test]
    fn determinant_matches_spectrum() {
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                3.0, 0.0, 2.0, 0.0, 0.0, 3.0, 0.0, -2.0, 2.0, 0.0, 4.0, 0.0, 0.0, -2.0, 0.0, 4.0,
            ],
        );
        let cov = CovarianceMatrix::new(m.clone()).unwrap();
        let prod: f64 = cov.spectrum().values.iter().map(|l| l * l).product();
        assert!((prod / m.determinant() - 1.0).abs() < 1e-12);
    }
}
