//! Multimode Gaussian-state engine.
//!
//! Conventions used throughout the crate:
//!
//! * **Shot-noise units**: the vacuum quadrature variance is 1 and
//!   `[x, p] = 2i`. Conventions with vacuum variance 1/2 are *not* used.
//! * **Interleaved ordering**: an `N`-mode covariance matrix is indexed
//!   `(x1, p1, x2, p2, ..., xN, pN)`, and the symplectic form is
//!   `Omega = (+)_k [[0, 1], [-1, 0]]`.
//!
//! Only second moments are tracked; displacements never enter entropies.

mod covariance;
mod entropy;
pub mod linalg;
mod symplectic;
mod system;

pub use covariance::{CovarianceMatrix, SYMMETRY_TOL};
pub use entropy::{bosonic_entropy_g, entropy_of_spectrum, von_neumann_entropy};
pub use symplectic::{
    symplectic_eigenvalues, symplectic_eigenvalues_numeric, two_mode_closed_form,
    SymplecticSpectrum, PHYSICALITY_TOL, SILENT_CLAMP,
};
pub use system::{GaussianSystem, Quadrature, Role};
