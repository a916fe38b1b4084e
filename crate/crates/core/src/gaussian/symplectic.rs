use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::linalg::{cholesky, singular_values};
use crate::error::{Error, Result};
use crate::real::{Dd, Real};
use num_traits::{Float, Zero};

/// Eigenvalues in `[1 - SILENT_CLAMP, 1)` are rounding noise and set to 1.
pub const SILENT_CLAMP: f64 = 1e-9;
/// Eigenvalues in `[1 - PHYSICALITY_TOL, 1 - SILENT_CLAMP)` are set to 1 but
/// counted as warnings; anything lower is a non-physical state.
pub const PHYSICALITY_TOL: f64 = 1e-6;

/// Symplectic spectrum, sorted descending, every value `>= 1` after clamping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    pub values: Vec<f64>,
    /// Number of eigenvalues clamped from the warning band.
    pub clamp_warnings: usize,
}

/// Symplectic eigenvalues of a `2N x 2N` covariance matrix (clamped, sorted).
///
/// One- and two-mode matrices use the closed forms; larger matrices go
/// through [`symplectic_eigenvalues_numeric`].
pub fn symplectic_eigenvalues<R: Real>(m: &DMatrix<R>) -> Result<SymplecticSpectrum> {
    let raw = match m.nrows() {
        2 => vec![one_mode(m)?],
        4 => two_mode(m)?,
        _ => symplectic_eigenvalues_numeric(m)?,
    };
    clamp(raw)
}

/// Unclamped symplectic eigenvalues by the general path, sorted descending.
///
/// With the Cholesky factor `gamma = L L^T`, the antisymmetric matrix
/// `L^T Omega L` has singular values equal to the symplectic eigenvalues,
/// each appearing twice. When `x` and `p` are uncorrelated (all `x_i p_j`
/// entries vanish) the problem splits as `gamma = X (+) P` and the spectrum is
/// given directly by the singular values of `L_P^T L_X`.
pub fn symplectic_eigenvalues_numeric<R: Real>(m: &DMatrix<R>) -> Result<Vec<R>> {
    let n = check_shape(m)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if xp_decoupled(m) {
        let x = DMatrix::from_fn(n, n, |i, j| m[(2 * i, 2 * j)]);
        let p = DMatrix::from_fn(n, n, |i, j| m[(2 * i + 1, 2 * j + 1)]);
        let lx = cholesky(&x).ok_or(Error::NotPositiveDefinite)?;
        let lp = cholesky(&p).ok_or(Error::NotPositiveDefinite)?;
        return Ok(singular_values(lp.transpose() * lx));
    }
    let l = cholesky(m).ok_or(Error::NotPositiveDefinite)?;
    let omega_l = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        // (Omega L)_{ij}: rows (2k, 2k+1) of Omega are (e_{2k+1}, -e_{2k}).
        if i % 2 == 0 {
            l[(i + 1, j)]
        } else {
            -l[(i - 1, j)]
        }
    });
    let k = l.transpose() * omega_l;
    let sv = singular_values(k);
    Ok(sv
        .chunks(2)
        .map(|pair| (pair[0] + pair[1]) / R::lit(2.0))
        .collect())
}

fn check_shape<R: Real>(m: &DMatrix<R>) -> Result<usize> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "covariance matrix must be 2N x 2N, got {} x {}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows() / 2)
}

fn xp_decoupled<R: Real>(m: &DMatrix<R>) -> bool {
    let n = m.nrows() / 2;
    (0..n).all(|i| (0..n).all(|j| m[(2 * i, 2 * j + 1)] == R::zero()))
}

fn det2<R: Real>(m: &DMatrix<R>, r: usize, c: usize) -> R {
    m[(r, c)] * m[(r + 1, c + 1)] - m[(r, c + 1)] * m[(r + 1, c)]
}

fn one_mode<R: Real>(m: &DMatrix<R>) -> Result<R> {
    if !(m[(0, 0)] > R::zero()) {
        return Err(Error::NotPositiveDefinite);
    }
    let d = det2(m, 0, 0);
    if !(d > R::zero()) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(d.sqrt())
}

/// Below this ratio `disc / Delta^2` the closed form is ill-conditioned.
const DEGENERATE_DISCRIMINANT: f64 = 1e-8;

/// Closed form for `[[A, C], [C^T, B]]`:
/// `lambda_pm^2 = (Delta +- sqrt(Delta^2 - 4 det gamma)) / 2` with
/// `Delta = det A + det B + 2 det C`. The smaller root is taken as
/// `det gamma / lambda_+^2` to avoid cancellation.
///
/// The formula is evaluated in double-double. When the two eigenvalues
/// nearly coincide (every pure two-mode state) the discriminant vanishes and
/// its square root turns a rounding error `d` into an eigenvalue error of
/// order `sqrt(d)`; in that regime the general path is used instead.
fn two_mode<R: Real>(m: &DMatrix<R>) -> Result<Vec<R>> {
    let dd: DMatrix<Dd> = m.map(|v| v.to_dd());
    let det = super::linalg::pd_determinant(&dd).ok_or(Error::NotPositiveDefinite)?;
    let two = Dd::new(2.0);
    let delta = det2(&dd, 0, 0) + det2(&dd, 2, 2) + two * det2(&dd, 0, 2);
    let disc = delta * delta - Dd::new(4.0) * det;
    if !(disc > Dd::new(DEGENERATE_DISCRIMINANT) * delta * delta) {
        return symplectic_eigenvalues_numeric(m);
    }
    let plus2 = (delta + disc.sqrt()) / two;
    let minus2 = det / plus2;
    Ok(vec![R::from_dd(plus2.sqrt()), R::from_dd(minus2.sqrt())])
}

/// Two-mode closed form without the degenerate-spectrum fallback, for
/// cross-checking the general path.
pub fn two_mode_closed_form(m: &DMatrix<f64>) -> Result<[f64; 2]> {
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::Domain(
            "the closed form needs a 4 x 4 matrix".to_string(),
        ));
    }
    let dd: DMatrix<Dd> = m.map(Dd::new);
    let det = super::linalg::pd_determinant(&dd).ok_or(Error::NotPositiveDefinite)?;
    let two = Dd::new(2.0);
    let delta = det2(&dd, 0, 0) + det2(&dd, 2, 2) + two * det2(&dd, 0, 2);
    let disc = (delta * delta - Dd::new(4.0) * det).max(Dd::zero());
    let plus2 = (delta + disc.sqrt()) / two;
    let minus2 = det / plus2;
    Ok([plus2.sqrt().as_f64(), minus2.sqrt().as_f64()])
}

fn clamp<R: Real>(raw: Vec<R>) -> Result<SymplecticSpectrum> {
    let mut warnings = 0;
    let mut values = Vec::with_capacity(raw.len());
    for l in raw {
        let deficit = (R::one() - l).as_f64();
        let v = if deficit <= 0.0 {
            l.as_f64()
        } else if deficit <= SILENT_CLAMP {
            1.0
        } else if deficit <= PHYSICALITY_TOL {
            warnings += 1;
            1.0
        } else {
            return Err(Error::NonPhysical { value: l.as_f64() });
        };
        values.push(v);
    }
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(SymplecticSpectrum {
        values,
        clamp_warnings: warnings,
    })
}
