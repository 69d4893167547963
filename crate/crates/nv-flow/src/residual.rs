//! Residual of the Novikov-Veselov equation for a candidate v(x,t):
//!
//! ∂_t v = 4Re(4∂³v + ∂(vw) − E∂w), ∂̄w = −3∂v,
//!
//! with ∂ = (∂₁ − i∂₂)/2. Spatial derivatives are spectral on the x-grid
//! padded to twice its size with zeros; w is the solution decaying at
//! infinity, ŵ = −3(ζ̄/ζ)v̂ with ζ = ξ₁ + iξ₂. ∂_t v is a centred difference.
//! This is a diagnostic only: nothing here asserts that the reconstructed
//! v solves the equation.

use std::f64::consts::TAU;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::C64;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NvResidual {
    /// ∂_t v − 4Re(…) on the input grid.
    pub residual: Vec<f64>,
    pub dv_dt_norm: f64,
    pub rhs_norm: f64,
    /// ‖residual‖ / max(‖∂_t v‖, ‖rhs‖).
    pub relative: f64,
}

/// Spectral derivatives on an nx × ny grid with spacing `step`, padded ×2.
pub struct SpectralPlane {
    nx: usize,
    ny: usize,
    px: usize,
    py: usize,
    /// ζ = ξ₁ + iξ₂ per padded mode, Nyquist modes set to zero.
    zeta: Vec<C64>,
    planner_fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    planner_inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
    planner_fwd_y: std::sync::Arc<dyn rustfft::Fft<f64>>,
    planner_inv_y: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

fn freq(k: usize, n: usize, len: f64) -> f64 {
    if 2 * k == n {
        0.0
    } else if 2 * k < n {
        TAU * k as f64 / len
    } else {
        TAU * (k as f64 - n as f64) / len
    }
}

impl SpectralPlane {
    pub fn new(nx: usize, ny: usize, step: f64) -> Self {
        let (px, py) = (2 * nx, 2 * ny);
        let zeta = (0..px * py).map(|idx| C64::new(freq(idx % px, px, px as f64 * step), freq(idx / px, py, py as f64 * step))).collect();
        let mut p = FftPlanner::new();
        Self {
            nx,
            ny,
            px,
            py,
            zeta,
            planner_fwd: p.plan_fft_forward(px),
            planner_inv: p.plan_fft_inverse(px),
            planner_fwd_y: p.plan_fft_forward(py),
            planner_inv_y: p.plan_fft_inverse(py),
        }
    }

    pub fn zeta(&self) -> &[C64] {
        &self.zeta
    }

    fn fft2(&self, data: &mut [C64], inverse: bool) {
        let (fx, fy) = if inverse { (&self.planner_inv, &self.planner_inv_y) } else { (&self.planner_fwd, &self.planner_fwd_y) };
        data.chunks_mut(self.px).for_each(|row| fx.process(row));
        let mut col = vec![C64::new(0.0, 0.0); self.py];
        for ix in 0..self.px {
            (0..self.py).for_each(|iy| col[iy] = data[iy * self.px + ix]);
            fy.process(&mut col);
            (0..self.py).for_each(|iy| data[iy * self.px + ix] = col[iy]);
        }
        if inverse {
            let s = 1.0 / (self.px * self.py) as f64;
            data.iter_mut().for_each(|z| *z *= s);
        }
    }

    /// Padded spectrum of a field given on the nx × ny grid.
    pub fn spectrum(&self, v: &[C64]) -> Vec<C64> {
        let mut d = vec![C64::new(0.0, 0.0); self.px * self.py];
        for iy in 0..self.ny {
            d[iy * self.px..iy * self.px + self.nx].copy_from_slice(&v[iy * self.nx..(iy + 1) * self.nx]);
        }
        self.fft2(&mut d, false);
        d
    }

    /// Padded field from a spectrum.
    pub fn padded_field(&self, mut s: Vec<C64>) -> Vec<C64> {
        self.fft2(&mut s, true);
        s
    }

    /// Restriction of a padded field to the nx × ny grid.
    pub fn crop(&self, d: &[C64]) -> Vec<C64> {
        (0..self.ny).flat_map(|iy| d[iy * self.px..iy * self.px + self.nx].iter().copied()).collect()
    }

    fn apply(&self, s: &[C64], symbol: impl Fn(C64) -> C64) -> Vec<C64> {
        s.iter().zip(&self.zeta).map(|(s, &z)| s * symbol(z)).collect()
    }

    /// Spectrum of ∂ applied to a spectrum.
    pub fn dz(&self, s: &[C64]) -> Vec<C64> {
        self.apply(s, |z| C64::new(0.0, 0.5) * z.conj())
    }

    /// Spectrum of w with ∂̄w = −3∂v.
    pub fn w_of(&self, v_spec: &[C64]) -> Vec<C64> {
        self.apply(v_spec, |z| if z.norm() == 0.0 { C64::new(0.0, 0.0) } else { -3.0 * z.conj() / z })
    }

    /// 4Re(4∂³v + ∂(vw) − E∂w) on the nx × ny grid.
    pub fn nv_rhs(&self, v: &[f64], energy: f64) -> Vec<f64> {
        let vc: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        let vs = self.spectrum(&vc);
        let ws = self.w_of(&vs);
        let w = self.padded_field(ws.clone());
        let vp = self.padded_field(vs.clone());
        let vw: Vec<C64> = vp.iter().zip(&w).map(|(a, b)| a * b).collect();
        let mut vws = vw;
        self.fft2(&mut vws, false);
        let d3 = self.dz(&self.dz(&self.dz(&vs)));
        let dvw = self.dz(&vws);
        let dw = self.dz(&ws);
        let total: Vec<C64> = (0..d3.len()).map(|i| 4.0 * d3[i] + dvw[i] - energy * dw[i]).collect();
        self.crop(&self.padded_field(total)).iter().map(|z| 4.0 * z.re).collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Residual at the middle of three snapshots spaced by `dt`.
pub fn nv_residual(plane: &SpectralPlane, prev: &[f64], mid: &[f64], next: &[f64], dt: f64, energy: f64) -> NvResidual {
    let rhs = plane.nv_rhs(mid, energy);
    let dvdt: Vec<f64> = prev.iter().zip(next).map(|(a, b)| (b - a) / (2.0 * dt)).collect();
    let residual: Vec<f64> = dvdt.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let (dn, rn) = (norm(&dvdt), norm(&rhs));
    let scale = dn.max(rn);
    NvResidual { relative: if scale == 0.0 { 0.0 } else { norm(&residual) / scale }, dv_dt_norm: dn, rhs_norm: rn, residual }
}
