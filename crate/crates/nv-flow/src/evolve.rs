//! Time phases on the scattering data.
//!
//! With k₁ + ik₂ = √E·λ and k₁ − ik₂ = √E/λ,
//! 2(k₁³ − 3k₁k₂²) = E^{3/2}(λ³ + λ⁻³), so
//!
//! * h_t(λ,ς) = h(λ,ς)·exp[iE^{3/2}t(λ³+λ⁻³−ς³−ς⁻³)],
//! * b_t(λ) = b(λ)·exp[iE^{3/2}t(λ³+λ⁻³+λ̄³+λ̄⁻³)], a pure phase,
//! * f_t(k,l) = f(k,l)·exp[2it(k₁³−3k₁k₂² − l₁³+3l₁l₂²)], a pure phase on the
//!   energy shell.
//!
//! The h phase is not unimodular on ∂Λ: its modulus is
//! exp[−E^{3/2}t·Im(λ³+λ⁻³−ς³−ς⁻³)], which is capped.

use forward_scattering::ScatteringDataset;
use serde::{Deserialize, Serialize};

use crate::{NvError, C64};

/// Default bound on |Re| of the h-phase exponent.
pub const DEFAULT_PHASE_CAP: f64 = 40.0;

/// z·p, leaving z untouched (signed zeros included) when p is exactly 1.
fn rotate(z: C64, p: C64) -> C64 {
    if p == C64::new(1.0, 0.0) {
        z
    } else {
        z * p
    }
}

fn cubic(l: C64) -> C64 {
    l * l * l + (l * l * l).inv()
}

/// Exponent of the h phase, iE^{3/2}t(λ³+λ⁻³−ς³−ς⁻³).
pub fn h_exponent(e32: f64, t: f64, lambda: C64, sigma: C64) -> C64 {
    C64::new(0.0, e32 * t) * (cubic(lambda) - cubic(sigma))
}

/// Phase of b, exp[iE^{3/2}t·2Re(λ³+λ⁻³)].
pub fn b_phase(e32: f64, t: f64, lambda: C64) -> C64 {
    C64::from_polar(1.0, e32 * t * 2.0 * cubic(lambda).re)
}

/// Phase of f for real momenta k, l.
pub fn f_phase(t: f64, k: [f64; 2], l: [f64; 2]) -> C64 {
    let p = |k: [f64; 2]| k[0].powi(3) - 3.0 * k[0] * k[1] * k[1];
    C64::from_polar(1.0, 2.0 * t * (p(k) - p(l)))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    /// Largest |Re| of the h-phase exponent.
    pub max_exponent: f64,
    /// Node pairs (i, j) whose exponent exceeded the cap.
    pub rejected: Vec<(usize, usize)>,
}

/// Scattering data at time t. `data` carries h_t, b_t, u_t and f_t in the
/// tables of the base dataset, so it feeds the reconstruction unchanged.
#[derive(Debug, Clone)]
pub struct EvolvedDataset {
    pub t: f64,
    pub data: ScatteringDataset,
    pub report: PhaseReport,
}

impl EvolvedDataset {
    pub fn h_t(&self) -> &[C64] {
        &self.data.h
    }

    pub fn b_t(&self) -> &[C64] {
        &self.data.b
    }

    pub fn u_t(&self) -> &[C64] {
        &self.data.u
    }
}

pub fn evolve_data(ds: &ScatteringDataset, t: f64) -> Result<EvolvedDataset, NvError> {
    evolve_data_capped(ds, t, DEFAULT_PHASE_CAP)
}

pub fn evolve_data_capped(ds: &ScatteringDataset, t: f64, cap: f64) -> Result<EvolvedDataset, NvError> {
    if !t.is_finite() {
        return Err(NvError::InvalidTime(t));
    }
    let e = ds.energy();
    let e32 = e.value() * e.sqrt();
    let lambdas = ds.contour.lambdas();
    let m = lambdas.len();

    let mut report = PhaseReport::default();
    let mut h = ds.h.clone();
    for i in 0..m {
        for j in 0..m {
            let ex = h_exponent(e32, t, lambdas[i], lambdas[j]);
            report.max_exponent = report.max_exponent.max(ex.re.abs());
            if ex.re.abs() > cap {
                report.rejected.push((i, j));
                continue;
            }
            h[i * m + j] = rotate(h[i * m + j], ex.exp());
        }
    }
    if !report.rejected.is_empty() {
        return Err(NvError::PhaseCap { t, max_exponent: report.max_exponent, cap, rejected: report.rejected.len() });
    }

    let b_contour = ds.b_contour.iter().zip(&lambdas).map(|(b, &l)| rotate(*b, b_phase(e32, t, l))).collect();
    let nodes = ds.exterior.nodes();
    let b: Vec<C64> = ds.b.iter().zip(&nodes).map(|(b, &l)| rotate(*b, b_phase(e32, t, l))).collect();
    // the exterior grid lies outside Λ, where χ = 1
    let u = b.iter().zip(&nodes).map(|(b, l)| b / l.conj()).collect();

    let na = ds.f_angles.len();
    let dirs: Vec<[f64; 2]> = ds.f_angles.iter().map(|a| [e.sqrt() * a.cos(), e.sqrt() * a.sin()]).collect();
    let f = ds.f.iter().enumerate().map(|(idx, f)| rotate(*f, f_phase(t, dirs[idx / na], dirs[idx % na]))).collect();

    let mut data = ds.clone();
    data.h = h;
    data.b_contour = b_contour;
    data.b = b;
    data.u = u;
    data.f = f;
    // the kept lattice fields belong to t = 0
    if t != 0.0 {
        data.mu_contour = None;
        data.psi_plus_contour = None;
    }
    Ok(EvolvedDataset { t, data, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use spectral_domain::{lambda_to_k, Energy, SpectralPoint};

    #[test]
    fn lambda_form_matches_the_momentum_form() {
        let e = Energy::new(25.0).unwrap();
        let e32 = 125.0;
        let p = |k: [C64; 2]| k[0].powi(3) - 3.0 * k[0] * k[1] * k[1];
        for l in [C64::new(1.2, 0.3), C64::new(-0.4, 0.7), C64::from_polar(3.0, 2.0)] {
            let k = lambda_to_k(SpectralPoint::new(l).unwrap(), e);
            let kk = [k.k1, k.k2];
            let a = 2.0 * p(kk);
            assert!((a - e32 * cubic(l)).norm() < 1e-10 * a.norm().max(1.0));
            let kb = [k.k1.conj(), k.k2.conj()];
            let bsum = 2.0 * (p(kk) + p(kb));
            assert!((bsum - e32 * 2.0 * cubic(l).re).norm() < 1e-10 * bsum.norm().max(1.0));
        }
    }

    #[test]
    fn real_momenta_give_the_f_phase() {
        // on the unit circle λ = e^{iθ} the h phase is unimodular and equals the f phase
        let e32 = 125.0;
        let (a, b) = (0.4_f64, 2.1_f64);
        let k = [5.0 * a.cos(), 5.0 * a.sin()];
        let l = [5.0 * b.cos(), 5.0 * b.sin()];
        let h = h_exponent(e32, 0.3, C64::from_polar(1.0, a), C64::from_polar(1.0, b)).exp();
        assert!((h - f_phase(0.3, k, l)).norm() < 1e-9);
    }

    proptest! {
        #[test]
        fn diagonal_h_phase_is_one(r in 0.2f64..5.0, th in 0.0f64..6.28, t in -2.0f64..2.0) {
            let l = C64::from_polar(r, th);
            prop_assert_eq!(h_exponent(125.0, t, l, l), C64::new(0.0, 0.0));
        }

        #[test]
        fn b_phase_is_unimodular(r in 0.1f64..10.0, th in 0.0f64..6.28, t in -1.0f64..1.0) {
            let p = b_phase(125.0, t, C64::from_polar(r, th));
            prop_assert!((p.norm() - 1.0).abs() < 1e-14);
        }
    }
}
