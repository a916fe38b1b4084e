//! Small dense kernels generic over [`Real`]. nalgebra's decompositions need
//! `ComplexField`, which the double-double scalar does not implement, so the
//! few factorizations the engine needs live here.

use nalgebra::DMatrix;

use crate::real::Real;

/// Lower Cholesky factor, or `None` if `m` is not positive definite.
pub fn cholesky<R: Real>(m: &DMatrix<R>) -> Option<DMatrix<R>> {
    let n = m.nrows();
    let mut l = DMatrix::<R>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > R::zero()) {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Determinant of a positive-definite matrix through its Cholesky factor.
pub fn pd_determinant<R: Real>(m: &DMatrix<R>) -> Option<R> {
    let l = cholesky(m)?;
    let mut d = R::one();
    for i in 0..l.nrows() {
        d *= l[(i, i)] * l[(i, i)];
    }
    Some(d)
}

/// Inverse of a positive-definite matrix.
pub fn pd_inverse<R: Real>(m: &DMatrix<R>) -> Option<DMatrix<R>> {
    let n = m.nrows();
    let l = cholesky(m)?;
    // L^{-1} by forward substitution, then inv = L^{-T} L^{-1}.
    let mut linv = DMatrix::<R>::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { R::one() } else { R::zero() };
            for k in c..i {
                s -= l[(i, k)] * linv[(k, c)];
            }
            linv[(i, c)] = s / l[(i, i)];
        }
    }
    let mut inv = DMatrix::<R>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = R::zero();
            for k in i..n {
                s += linv[(k, i)] * linv[(k, j)];
            }
            inv[(i, j)] = s;
            inv[(j, i)] = s;
        }
    }
    Some(inv)
}

/// Singular values by one-sided (Hestenes) Jacobi, sorted descending.
///
/// Columns are orthogonalized pairwise until every pair is orthogonal to
/// working precision; the singular values are then the column norms. The
/// method is accurate relative to the largest singular value, which is what
/// the symplectic-spectrum paths rely on.
pub fn singular_values<R: Real>(mut a: DMatrix<R>) -> Vec<R> {
    let (rows, cols) = a.shape();
    let tol = R::unit_roundoff() * R::lit(rows.max(1) as f64);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut alpha = R::zero();
                let mut beta = R::zero();
                let mut gamma = R::zero();
                for i in 0..rows {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == R::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (R::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (R::one() + zeta * zeta).sqrt());
                let c = R::one() / (R::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    a[(i, p)] = c * x - s * y;
                    a[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<R> = (0..cols)
        .map(|j| {
            let mut s = R::zero();
            for i in 0..rows {
                s += a[(i, j)] * a[(i, j)];
            }
            s.sqrt()
        })
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Dd;

    #[test]
    fn cholesky_reconstructs() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0]);
        let l = cholesky(&m).unwrap();
        let back = &l * l.transpose();
        assert!((back - &m).abs().max() < 1e-14);
        let det = pd_determinant(&m).unwrap();
        assert!((det - m.determinant()).abs() < 1e-12);
        let inv = pd_inverse(&m).unwrap();
        assert!(((&inv * &m) - DMatrix::identity(3, 3)).abs().max() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(cholesky(&m).is_none());
    }

    #[test]
    fn singular_values_match_nalgebra() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, -2.0, 0.5, 3.0, 0.1, 0.0, -1.0, 4.0, 2.0]);
        let ours = singular_values(m.clone());
        let mut reference: Vec<f64> = m
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        reference.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in ours.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-13 * reference[0]);
        }
    }

    #[test]
    fn double_double_singular_values() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Dd::from(3.0), Dd::from(0.0), Dd::from(0.0), Dd::from(0.5)],
        );
        let sv = singular_values(m);
        assert_eq!(sv[0].as_f64(), 3.0);
        assert_eq!(sv[1].as_f64(), 0.5);
    }
}
