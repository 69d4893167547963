//! Scattering amplitudes as lattice sums against the solved densities.

use std::f64::consts::TAU;

use potential_lab::PotentialGrid;
use spectral_domain::{lambda_to_k, ComplexMomentum, Energy, SpectralPoint};

use crate::nystrom::{FieldKind, Lattice, WaveField};
use crate::{ForwardError, C64};

fn prefactor(lat: &Lattice) -> f64 {
    lat.h * lat.h / (TAU * TAU)
}

/// f(k,l) = (2π)^{-2}∫e^{−ily}v(y)ψ⁺(y,k)dy for real l.
pub fn scattering_amplitude_f(lat: &Lattice, psi_plus: &WaveField, l: [f64; 2]) -> Result<C64, ForwardError> {
    if psi_plus.kind != FieldKind::Classical {
        return Err(ForwardError::WrongField("ψ⁺"));
    }
    let i = C64::new(0.0, 1.0);
    let s: C64 = psi_plus
        .density
        .iter()
        .enumerate()
        .filter(|(_, w)| w.norm() != 0.0)
        .map(|(n, w)| {
            let y = lat.node(n);
            w * (-i * (l[0] * y[0] + l[1] * y[1])).exp()
        })
        .sum();
    Ok(s * prefactor(lat))
}

/// First Born term (2π)^{-2}∫e^{i(k−l)y}v(y)dy by the same lattice rule.
pub fn born_amplitude(v: &PotentialGrid, k: [f64; 2], l: [f64; 2]) -> C64 {
    let lat = Lattice::of(v);
    let q = [k[0] - l[0], k[1] - l[1]];
    let s: C64 = v
        .values
        .iter()
        .enumerate()
        .filter(|(_, x)| **x != 0.0)
        .map(|(n, x)| {
            let y = lat.node(n);
            C64::from_polar(*x, q[0] * y[0] + q[1] * y[1])
        })
        .sum();
    s * prefactor(&lat)
}

/// Largest |Im (k − l)·y| over the support of a density.
fn growth(lat: &Lattice, density: &[C64], d: &ComplexMomentum) -> f64 {
    let im = d.im();
    density
        .iter()
        .enumerate()
        .filter(|(_, w)| w.norm() != 0.0)
        .map(|(n, _)| {
            let y = lat.node(n);
            (im[0] * y[0] + im[1] * y[1]).abs()
        })
        .fold(0.0, f64::max)
}

/// h(k(λ),k(σ)) = (2π)^{-2}∫e^{−ik(σ)y}v(y)ψ(y,k(λ))dy with ψ = e^{ik(λ)y}μ.
/// Rejects σ for which |e^{i(k(λ)−k(σ))y}| exceeds e^{cap} on the support.
pub fn faddeev_amplitude_h(lat: &Lattice, mu: &WaveField, sigma: SpectralPoint, e: Energy, cap: f64) -> Result<C64, ForwardError> {
    if mu.kind != FieldKind::Faddeev {
        return Err(ForwardError::WrongField("μ"));
    }
    let ks = lambda_to_k(sigma, e);
    let d = ComplexMomentum { k1: mu.k.k1 - ks.k1, k2: mu.k.k2 - ks.k2 };
    let g = growth(lat, &mu.density, &d);
    if g > cap {
        return Err(ForwardError::ExponentCap { exponent: g, cap });
    }
    let i = C64::new(0.0, 1.0);
    let s: C64 = mu
        .density
        .iter()
        .enumerate()
        .filter(|(_, w)| w.norm() != 0.0)
        .map(|(n, w)| w * (i * d.dot(lat.node(n))).exp())
        .sum();
    Ok(s * prefactor(lat))
}

/// b(k) = h(k, −k̄), i.e. σ = −1/λ̄; the phase e^{2i Re k·y} is unimodular.
pub fn faddeev_amplitude_b(lat: &Lattice, mu: &WaveField, e: Energy) -> Result<C64, ForwardError> {
    let lambda = mu.lambda.ok_or(ForwardError::WrongField("μ solved through λ"))?;
    let l = SpectralPoint::new(lambda).map_err(|e| ForwardError::Spectral(e.to_string()))?;
    faddeev_amplitude_h(lat, mu, l.mirror(), e, f64::INFINITY)
}
