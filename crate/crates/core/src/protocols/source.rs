//! Entanglement-based description of the prepare-and-measure ensembles.
//!
//! Alice prepares `Diag(V_S, 1/V_S)` and displaces both quadratures by
//! Gaussian data of variance `V_M`, so the average signal is
//! `Diag(a, b)` with `a = V_S + V_M`, `b = 1/V_S + V_M`. The same ensemble is
//! obtained from a pure two-mode source with Alice's arm thermal,
//! `A = nu I`, `nu = sqrt(a b)`, and correlations
//! `c_x = s sqrt(nu^2 - 1)`, `c_p = -sqrt(nu^2 - 1)/s`, `s^2 = sqrt(a/b)`.
//! For coherent states (`a = b`) this is the usual two-mode squeezed vacuum.
//!
//! Alice recovers her `x` data by mixing her arm with an ancilla
//! `Diag(m_x, 1/m_x)`, `m_x = V_S s^2`, on a balanced beamsplitter and
//! measuring `x` on one output. The conditional `x` variance of the signal is
//! then exactly `V_S`; for coherent states the ancilla is the vacuum and this
//! is the `x` half of a heterodyne measurement.

use num_traits::Float;

use crate::real::Dd;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Source {
    /// Average signal variance per quadrature, `[a, b]`.
    pub signal: [Dd; 2],
    pub nu: Dd,
    /// Alice-signal correlation per quadrature, `[c_x, c_p]`.
    pub corr: [Dd; 2],
    /// `x` variance of Alice's measurement ancilla.
    pub ancilla_x: Dd,
}

impl Source {
    pub fn new(v_s: f64, v_m: f64) -> Self {
        let (v_s, v_m) = (Dd::from(v_s), Dd::from(v_m));
        let one = Dd::from(1.0);
        let a = v_s + v_m;
        let b = one / v_s + v_m;
        // nu^2 - 1 = ab - 1 = V_M (V_S + 1/V_S + V_M), free of cancellation.
        let nu2m1 = v_m * (v_s + one / v_s + v_m);
        let nu = (a * b).sqrt();
        let s2 = (a / b).sqrt();
        let s = s2.sqrt();
        let root = nu2m1.sqrt();
        Self {
            signal: [a, b],
            nu,
            corr: [s * root, -root / s],
            ancilla_x: v_s * s2,
        }
    }
}
