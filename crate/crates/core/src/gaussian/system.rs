use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::covariance::{check_symmetric, CovarianceMatrix};
use super::entropy::matrix_entropy;
use super::linalg::pd_inverse;
use crate::error::{Error, Result};
use crate::real::Real;

/// Who holds a mode. `ClassicalData` modes carry jointly Gaussian classical
/// variables (e.g. Alice's modulation data) and are not quantum states, so
/// they are excluded from entropy evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Alice,
    Bob,
    EveHeld,
    TrustedAncilla,
    ClassicalData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    /// Offset of this quadrature inside a mode's `(x, p)` pair.
    pub fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// Second moments of a set of modes together with their roles.
///
/// All transforms are pure: they return a new system and leave `self`
/// untouched. The matrix is only required to be symmetric here; physicality
/// is checked when a quantum sub-block is turned into a [`CovarianceMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSystem<R: Real = f64> {
    data: DMatrix<R>,
    roles: Vec<Role>,
}

impl<R: Real> GaussianSystem<R> {
    pub fn new(data: DMatrix<R>, roles: Vec<Role>) -> Result<Self> {
        check_symmetric(&data)?;
        if data.nrows() != 2 * roles.len() {
            return Err(Error::Domain(format!(
                "{} roles given for a {} x {} matrix",
                roles.len(),
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { data, roles })
    }

    /// Vacuum on every listed mode.
    pub fn vacuum(roles: &[Role]) -> Self {
        let n = 2 * roles.len();
        Self {
            data: DMatrix::identity(n, n),
            roles: roles.to_vec(),
        }
    }

    /// Single-mode state `Diag(v_x, v_p)`.
    pub fn diagonal(v_x: R, v_p: R, role: Role) -> Result<Self> {
        if !(v_x > R::zero() && v_p > R::zero()) {
            return Err(Error::Domain(format!(
                "quadrature variances must be positive, got ({:?}, {:?})",
                v_x.as_f64(),
                v_p.as_f64()
            )));
        }
        let mut data = DMatrix::zeros(2, 2);
        data[(0, 0)] = v_x;
        data[(1, 1)] = v_p;
        Ok(Self {
            data,
            roles: vec![role],
        })
    }

    /// Thermal state `Diag(v, v)`.
    pub fn thermal(v: R, role: Role) -> Result<Self> {
        if !(v >= R::one()) {
            return Err(Error::Domain(format!(
                "thermal variance must be >= 1, got {}",
                v.as_f64()
            )));
        }
        Self::diagonal(v, v, role)
    }

    /// Pure squeezed vacuum `Diag(v_x, 1/v_x)`.
    pub fn squeezed_vacuum(v_x: R, role: Role) -> Result<Self> {
        Self::diagonal(v_x, R::one() / v_x, role)
    }

    /// Two-mode squeezed vacuum of variance `v`:
    /// `[[v I, c Z], [c Z, v I]]` with `c = sqrt(v^2 - 1)` and `Z = Diag(1, -1)`.
    /// Modes are tagged `[Alice, Bob]`.
    pub fn epr_source(v: R) -> Result<Self> {
        Self::epr_source_with_roles(v, [Role::Alice, Role::Bob])
    }

    pub fn epr_source_with_roles(v: R, roles: [Role; 2]) -> Result<Self> {
        if !(v >= R::one()) {
            return Err(Error::Domain(format!(
                "EPR variance must be >= 1, got {}",
                v.as_f64()
            )));
        }
        // v^2 - 1 = (v - 1)(v + 1) keeps precision for v close to 1.
        let c = ((v - R::one()) * (v + R::one())).sqrt();
        let mut data = DMatrix::zeros(4, 4);
        for i in 0..4 {
            data[(i, i)] = v;
        }
        data[(0, 2)] = c;
        data[(2, 0)] = c;
        data[(1, 3)] = -c;
        data[(3, 1)] = -c;
        Ok(Self {
            data,
            roles: roles.to_vec(),
        })
    }

    pub fn modes(&self) -> usize {
        self.roles.len()
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn matrix(&self) -> &DMatrix<R> {
        &self.data
    }

    pub fn with_role(mut self, mode: usize, role: Role) -> Result<Self> {
        self.check_mode(mode)?;
        self.roles[mode] = role;
        Ok(self)
    }

    /// Indices of every mode carrying `role`.
    pub fn modes_with_role(&self, role: Role) -> Vec<usize> {
        (0..self.modes())
            .filter(|&i| self.roles[i] == role)
            .collect()
    }

    /// Direct sum: the modes of `other` are appended after those of `self`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (n, m) = (self.data.nrows(), other.data.nrows());
        let mut data = DMatrix::zeros(n + m, n + m);
        data.view_mut((0, 0), (n, n)).copy_from(&self.data);
        data.view_mut((n, n), (m, m)).copy_from(&other.data);
        let mut roles = self.roles.clone();
        roles.extend_from_slice(&other.roles);
        Self { data, roles }
    }

    /// Beamsplitter of transmittance `t` between modes `a` and `b`:
    /// `a -> sqrt(t) a + sqrt(1-t) b`, `b -> sqrt(t) b - sqrt(1-t) a`.
    pub fn apply_beamsplitter(&self, a: usize, b: usize, t: R) -> Result<Self> {
        self.check_mode(a)?;
        self.check_mode(b)?;
        if a == b {
            return Err(Error::Domain(format!(
                "beamsplitter needs two distinct modes, got {a} twice"
            )));
        }
        if !(t >= R::zero() && t <= R::one()) {
            return Err(Error::Domain(format!(
                "beamsplitter transmittance must lie in [0, 1], got {}",
                t.as_f64()
            )));
        }
        let (c, s) = (t.sqrt(), (R::one() - t).sqrt());
        let mut out = self.clone();
        for q in 0..2 {
            let (i, j) = (2 * a + q, 2 * b + q);
            mix_rows(&mut out.data, i, j, c, s);
            mix_cols(&mut out.data, i, j, c, s);
        }
        Ok(out)
    }

    /// Single-mode squeezer `x -> e^{-r} x`, `p -> e^{r} p`.
    pub fn apply_squeezer(&self, mode: usize, r: R) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = self.clone();
        let scale = [(-r).exp(), r.exp()];
        for (q, f) in scale.into_iter().enumerate() {
            let i = 2 * mode + q;
            for k in 0..out.data.ncols() {
                out.data[(i, k)] *= f;
            }
            for k in 0..out.data.nrows() {
                out.data[(k, i)] *= f;
            }
        }
        Ok(out)
    }

    /// Phase rotation `x -> cos(th) x + sin(th) p`, `p -> cos(th) p - sin(th) x`.
    pub fn apply_phase_rotation(&self, mode: usize, theta: R) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = self.clone();
        let (i, j) = (2 * mode, 2 * mode + 1);
        mix_rows(&mut out.data, i, j, theta.cos(), theta.sin());
        mix_cols(&mut out.data, i, j, theta.cos(), theta.sin());
        Ok(out)
    }

    /// Phase-insensitive lossy, noisy channel on one mode: the mode's rows
    /// and columns are scaled by `sqrt(eta)` and `(1 - eta + eta * eps) I` is
    /// added to its block, so the output variance is `eta (V + eps) + 1 - eta`.
    pub fn apply_lossy_channel(&self, mode: usize, eta: R, eps: R) -> Result<Self> {
        self.check_mode(mode)?;
        if !(eta >= R::zero() && eta <= R::one()) || !(eps >= R::zero()) {
            return Err(Error::Domain(format!(
                "channel needs eta in [0, 1] and eps >= 0, got ({}, {})",
                eta.as_f64(),
                eps.as_f64()
            )));
        }
        let mut out = self.clone();
        let f = eta.sqrt();
        for q in 0..2 {
            let i = 2 * mode + q;
            for k in 0..out.data.ncols() {
                out.data[(i, k)] *= f;
            }
            for k in 0..out.data.nrows() {
                out.data[(k, i)] *= f;
            }
            out.data[(i, i)] += R::one() - eta + eta * eps;
        }
        Ok(out)
    }

    /// Partial trace: keep `modes` in the given order.
    pub fn reduce(&self, modes: &[usize]) -> Result<Self> {
        for &m in modes {
            self.check_mode(m)?;
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        Ok(Self {
            data: self.data.select_rows(&idx).select_columns(&idx),
            roles: modes.iter().map(|&m| self.roles[m]).collect(),
        })
    }

    /// Homodyne detection of `quadrature` on `mode`. The mode is removed and
    /// the rest becomes `gamma_rest - sigma (Pi gamma_m Pi)^MP sigma^T`; for the
    /// rank-one projection the pseudo-inverse is `Diag(1/v, 0)`, so only the
    /// measured quadrature's correlations enter.
    pub fn condition_on_homodyne(&self, mode: usize, quadrature: Quadrature) -> Result<Self> {
        self.check_mode(mode)?;
        let measured = 2 * mode + quadrature.offset();
        let v = self.data[(measured, measured)];
        if !(v > R::zero()) {
            return Err(Error::DegenerateMeasurement(format!(
                "measured quadrature of mode {mode} has variance {}",
                v.as_f64()
            )));
        }
        let keep: Vec<usize> = (0..self.modes()).filter(|&m| m != mode).collect();
        self.schur_condition(&keep, &[measured])
    }

    /// Heterodyne detection of `mode`: split it with a vacuum on a balanced
    /// beamsplitter, homodyne `x` on one output and `p` on the other.
    pub fn condition_on_heterodyne(&self, mode: usize) -> Result<Self> {
        let split = self.split_with_vacuum(mode)?;
        let ancilla = split.modes() - 1;
        split
            .condition_on_homodyne(ancilla, Quadrature::P)?
            .condition_on_homodyne(mode, Quadrature::X)
    }

    /// Split `mode` with a vacuum on a balanced beamsplitter and homodyne `x`
    /// on the transmitted port only. The reflected port stays in the system
    /// as the last mode (with the role of the measured one), which is the
    /// state the remaining parties share after the `x` half of a heterodyne.
    pub fn split_and_measure_x(&self, mode: usize) -> Result<Self> {
        let split = self.split_with_vacuum(mode)?;
        split.condition_on_homodyne(mode, Quadrature::X)
    }

    fn split_with_vacuum(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let ancilla = self.modes();
        self.tensor(&Self::vacuum(&[self.roles[mode]]))
            .apply_beamsplitter(mode, ancilla, R::lit(0.5))
    }

    /// Condition on jointly Gaussian classical variables, given as
    /// `(mode, quadrature)` pairs: `gamma_rest - sigma gamma_cls^-1 sigma^T`.
    /// Every mode referenced by a variable is removed from the result.
    pub fn condition_on_classical(&self, variables: &[(usize, Quadrature)]) -> Result<Self> {
        let mut cond = Vec::with_capacity(variables.len());
        for &(m, q) in variables {
            self.check_mode(m)?;
            cond.push(2 * m + q.offset());
        }
        let keep: Vec<usize> = (0..self.modes())
            .filter(|m| !variables.iter().any(|&(v, _)| v == *m))
            .collect();
        self.schur_condition(&keep, &cond)
    }

    fn schur_condition(&self, keep_modes: &[usize], cond: &[usize]) -> Result<Self> {
        let keep: Vec<usize> = keep_modes
            .iter()
            .flat_map(|&m| [2 * m, 2 * m + 1])
            .collect();
        let block = self.data.select_rows(cond).select_columns(cond);
        let inv = pd_inverse(&block).ok_or_else(|| {
            Error::DegenerateMeasurement("conditioning block is not positive definite".to_string())
        })?;
        let sigma = self.data.select_rows(&keep).select_columns(cond);
        let rest = self.data.select_rows(&keep).select_columns(&keep);
        let mut data = rest - &sigma * inv * sigma.transpose();
        symmetrize(&mut data);
        Ok(Self {
            data,
            roles: keep_modes.iter().map(|&m| self.roles[m]).collect(),
        })
    }

    /// Validated covariance matrix of the whole system. Fails if any mode is
    /// classical data.
    pub fn covariance(&self) -> Result<CovarianceMatrix<R>> {
        if let Some(i) = self.roles.iter().position(|&r| r == Role::ClassicalData) {
            return Err(Error::Domain(format!(
                "mode {i} holds classical data and has no quantum covariance matrix"
            )));
        }
        CovarianceMatrix::new(self.data.clone())
    }

    /// Von Neumann entropy (bits) of the whole system.
    pub fn entropy(&self) -> Result<f64> {
        self.entropy_with_warnings().map(|(s, _)| s)
    }

    /// Entropy together with the number of eigenvalues clamped from the
    /// warning band.
    pub fn entropy_with_warnings(&self) -> Result<(f64, usize)> {
        if self.roles.contains(&Role::ClassicalData) {
            return Err(Error::Domain(
                "entropy requested for a system containing classical data".to_string(),
            ));
        }
        matrix_entropy(&self.data)
    }

    /// Entropy (bits) of the reduced state of `modes`.
    pub fn entropy_of(&self, modes: &[usize]) -> Result<f64> {
        self.reduce(modes)?.entropy()
    }

    /// Round every entry to `f64`.
    pub fn to_f64(&self) -> GaussianSystem<f64> {
        GaussianSystem {
            data: self.data.map(|v| v.as_f64()),
            roles: self.roles.clone(),
        }
    }

    fn check_mode(&self, index: usize) -> Result<()> {
        if index >= self.modes() {
            return Err(Error::ModeIndex {
                index,
                modes: self.modes(),
            });
        }
        Ok(())
    }
}

/// Rows `(i, j) -> (c r_i + s r_j, c r_j - s r_i)`.
fn mix_rows<R: Real>(m: &mut DMatrix<R>, i: usize, j: usize, c: R, s: R) {
    for k in 0..m.ncols() {
        let (a, b) = (m[(i, k)], m[(j, k)]);
        m[(i, k)] = c * a + s * b;
        m[(j, k)] = c * b - s * a;
    }
}

fn mix_cols<R: Real>(m: &mut DMatrix<R>, i: usize, j: usize, c: R, s: R) {
    for k in 0..m.nrows() {
        let (a, b) = (m[(k, i)], m[(k, j)]);
        m[(k, i)] = c * a + s * b;
        m[(k, j)] = c * b - s * a;
    }
}

fn symmetrize<R: Real>(m: &mut DMatrix<R>) {
    let half = R::lit(0.5);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            let v = (m[(i, j)] + m[(j, i)]) * half;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn epr_source_entries() {
        let e = GaussianSystem::epr_source(2.0).unwrap();
        let c = 3f64.sqrt();
        let m = e.matrix();
        assert_eq!(m[(0, 0)], 2.0);
        assert!(close(m[(0, 2)], c, 1e-15));
        assert!(close(m[(1, 3)], -c, 1e-15));
        assert_eq!(m[(0, 1)], 0.0);
        assert!(e.entropy().unwrap() < 1e-10);
        assert_eq!(
            GaussianSystem::epr_source(1.0).unwrap().matrix(),
            &DMatrix::identity(4, 4)
        );
        assert!(GaussianSystem::epr_source(0.9).is_err());
    }

    #[test]
    fn beamsplitter_identity_and_loss() {
        let s = GaussianSystem::thermal(5.0, Role::Bob)
            .unwrap()
            .tensor(&GaussianSystem::vacuum(&[Role::EveHeld]));
        assert_eq!(s.apply_beamsplitter(0, 1, 1.0).unwrap(), s);
        let eta = 0.3;
        let out = s.apply_beamsplitter(0, 1, eta).unwrap();
        assert!(close(out.matrix()[(0, 0)], eta * 5.0 + 1.0 - eta, 1e-14));
        assert!(s.apply_beamsplitter(0, 0, 0.5).is_err());
        assert!(s.apply_beamsplitter(0, 2, 0.5).is_err());
        assert!(s.apply_beamsplitter(0, 1, 1.5).is_err());
    }

    #[test]
    fn epr_through_loss_correlation() {
        let (v, eta) = (4.0f64, 0.7);
        let s = GaussianSystem::epr_source(v)
            .unwrap()
            .tensor(&GaussianSystem::vacuum(&[Role::EveHeld]))
            .apply_beamsplitter(1, 2, eta)
            .unwrap();
        let c = eta.sqrt() * (v * v - 1.0).sqrt();
        assert!(close(s.matrix()[(0, 2)], c, 1e-13));
        assert!(close(s.matrix()[(1, 3)], -c, 1e-13));
        // The global state stays pure.
        assert!(s.entropy().unwrap() < 1e-9);
    }

    #[test]
    fn homodyne_on_epr_prepares_squeezed_state() {
        let v = 7.0;
        let b = GaussianSystem::epr_source(v)
            .unwrap()
            .condition_on_homodyne(0, Quadrature::X)
            .unwrap();
        assert_eq!(b.modes(), 1);
        assert!(close(b.matrix()[(0, 0)], 1.0 / v, 1e-14));
        assert!(close(b.matrix()[(1, 1)], v, 1e-14));
    }

    #[test]
    fn heterodyne_on_epr_prepares_coherent_state() {
        let b = GaussianSystem::epr_source(9.0)
            .unwrap()
            .condition_on_heterodyne(0)
            .unwrap();
        assert!(close(b.matrix()[(0, 0)], 1.0, 1e-13));
        assert!(close(b.matrix()[(1, 1)], 1.0, 1e-13));
        // Heterodyne of an uncorrelated vacuum leaves the rest unchanged.
        let s = GaussianSystem::thermal(3.0, Role::Bob)
            .unwrap()
            .tensor(&GaussianSystem::vacuum(&[Role::Alice]));
        let rest = s.condition_on_heterodyne(1).unwrap();
        assert_eq!(rest.matrix(), &DMatrix::from_diagonal_element(2, 2, 3.0));
    }

    #[test]
    fn degenerate_measurement() {
        let s = GaussianSystem::new(
            DMatrix::from_diagonal_element(4, 4, 1.0).map(|v: f64| v * 0.0),
            vec![Role::Alice, Role::Bob],
        )
        .unwrap();
        assert!(matches!(
            s.condition_on_homodyne(0, Quadrature::X),
            Err(Error::DegenerateMeasurement(_))
        ));
    }

    #[test]
    fn classical_conditioning_scalar_schur() {
        // Data M = Diag(vm, vm) fully correlated with Bob's mode.
        let (vm, vb, c) = (3.0, 4.0, 2.5);
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                vm, 0.0, c, 0.0, 0.0, vm, 0.0, c, c, 0.0, vb, 0.0, 0.0, c, 0.0, vb,
            ],
        );
        let s = GaussianSystem::new(m, vec![Role::ClassicalData, Role::Bob]).unwrap();
        let r = s
            .condition_on_classical(&[(0, Quadrature::X), (0, Quadrature::P)])
            .unwrap();
        assert_eq!(r.roles(), &[Role::Bob]);
        assert!(close(r.matrix()[(0, 0)], vb - c * c / vm, 1e-14));
        assert!(close(r.matrix()[(1, 1)], vb - c * c / vm, 1e-14));
        let only_x = s.condition_on_classical(&[(0, Quadrature::X)]).unwrap();
        assert!(close(only_x.matrix()[(1, 1)], vb, 1e-14));
    }

    #[test]
    fn entropy_refuses_classical_modes() {
        let s = GaussianSystem::<f64>::vacuum(&[Role::ClassicalData]);
        assert!(s.entropy().is_err());
        assert!(s.covariance().is_err());
    }

    #[test]
    fn squeezer_and_rotation_preserve_purity() {
        let s = GaussianSystem::epr_source(3.0)
            .unwrap()
            .apply_squeezer(0, 0.4)
            .unwrap()
            .apply_phase_rotation(1, 0.7)
            .unwrap()
            .apply_beamsplitter(0, 1, 0.35)
            .unwrap();
        let total = s.entropy().unwrap();
        assert!(
            total < 1e-9,
            "total entropy {total:e}, spectrum {:?}",
            crate::gaussian::symplectic_eigenvalues_numeric(s.matrix())
        );
        let a = s.entropy_of(&[0]).unwrap();
        let b = s.entropy_of(&[1]).unwrap();
        assert!(close(a, b, 1e-9));
    }

    #[test]
    fn lossy_channel_variance() {
        let s = GaussianSystem::thermal(5.0, Role::Bob).unwrap();
        let out = s.apply_lossy_channel(0, 0.4, 0.1).unwrap();
        assert!(close(out.matrix()[(0, 0)], 0.4 * (5.0 + 0.1) + 0.6, 1e-14));
    }
}
