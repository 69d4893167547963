//! Faddeev's Green's function G(x,k(λ)) and its reduced form
//! g = G·e^{−ik(λ)x}.
//!
//! G is obtained by integrating its λ-derivatives along the ray through λ.
//! With u = λ/|λ| and τ the distance parameter (λ = τu outside the unit
//! circle, λ = u/τ inside it), both derivative identities combine into
//!
//!   dG/dτ = (1/4πτ)[e^{ik(λ(τ))x} + e^{ik(−1/λ̄(τ))x}],
//!
//! and the unit-circle limit G(x,k(u±0)) − G⁺(x) is a half-circle integral of
//! a plane wave. Either the ray is integrated outward from |λ| = 1, or (when
//! e^{ik(λ)x} decays along the ray) inward from infinity where G vanishes.
//! The forward sum is only used while the decay e^{−Im k(λ)x} stays above e^{-2},
//! so neither branch suffers from cancellation and g stays bounded.

use std::f64::consts::PI;

use scatter_numerics::quadrature::GaussLegendre;
use spectral_domain::{Energy, SpectralPoint};

use crate::classical::green_classical_r;
use crate::{GreenError, C64};

const PANEL_GL: usize = 12;
/// Phase plus growth allowed across one Gauss panel.
const PANEL_PHASE: f64 = 2.5;
/// Relative decay at which the inward integral from infinity is truncated.
const TAIL_DECAY: f64 = 40.0;
/// Growth of |e^{−ik(λ)x}| tolerated in the outward branch.
const SWITCH: f64 = 2.0;

/// k(μ)·x = (√E/2)(μz̄ + z/μ) with z = x₁ + ix₂.
#[inline]
pub fn phase(sqrt_e: f64, z: C64, mu: C64) -> C64 {
    (mu * z.conj() + z / mu) * (0.5 * sqrt_e)
}

/// The ray geometry shared by all radii along one direction u.
#[derive(Debug, Clone, Copy)]
struct Ray {
    sqrt_e: f64,
    z: C64,
    u: C64,
    outer: bool,
    /// Im k(λ(τ))x = −c_eff·(τ − 1/τ); positive c_eff means decay along the ray.
    c_eff: f64,
}

impl Ray {
    fn new(sqrt_e: f64, x: [f64; 2], u: C64, outer: bool) -> Self {
        let z = C64::new(x[0], x[1]);
        let c = 0.5 * sqrt_e * (u * z.conj()).im;
        Self { sqrt_e, z, u, outer, c_eff: if outer { c } else { -c } }
    }

    fn lambda(&self, tau: f64) -> C64 {
        if self.outer {
            self.u * tau
        } else {
            self.u / tau
        }
    }

    fn kx(&self, tau: f64) -> C64 {
        phase(self.sqrt_e, self.z, self.lambda(tau))
    }

    /// dG/dτ · e^{−iκ}, κ a reference phase.
    fn integrand(&self, tau: f64, kappa: C64) -> C64 {
        let l = self.lambda(tau);
        let m = -1.0 / l.conj();
        let i = C64::new(0.0, 1.0);
        let a = (i * (phase(self.sqrt_e, self.z, l) - kappa)).exp();
        let b = (i * (phase(self.sqrt_e, self.z, m) - kappa)).exp();
        (a + b) / (4.0 * PI * tau)
    }

    fn panel_len(&self) -> f64 {
        let rate = self.sqrt_e * self.z.norm() + 2.0 * self.c_eff.abs();
        (PANEL_PHASE / rate.max(1e-300)).clamp(1e-3, 0.5)
    }

    /// ∫_a^b dG/dτ · e^{−iκ} dτ.
    fn segment(&self, a: f64, b: f64, kappa: C64) -> C64 {
        let gl = GaussLegendre::cached(PANEL_GL);
        let panels = (((b - a) / self.panel_len()).ceil() as usize).max(1);
        gl.integrate_composite(a, b, panels, |t| self.integrand(t, kappa))
    }

    /// ∫_a^∞ dG/dτ · e^{−iκ} dτ for c_eff > 0, truncated once the integrand
    /// has decayed by e^{−TAIL_DECAY} relative to τ = a.
    fn tail(&self, a: f64, kappa: C64) -> C64 {
        let s = a - 1.0 / a + TAIL_DECAY / self.c_eff;
        let end = 0.5 * (s + (s * s + 4.0).sqrt());
        self.segment(a, end, kappa)
    }

    fn use_inward(&self, tau: f64) -> bool {
        self.c_eff * (tau - 1.0 / tau) > SWITCH
    }
}

/// G(x,k(u±0)) − G⁺(x) = (i/4π)∫ e^{i√E(x₁cos α + x₂sin α)} dα over the half
/// circle α ∈ (φ−π, φ) (outer side) or (φ, φ+π) (inner side), u = e^{iφ}.
pub fn unit_circle_limit(x: [f64; 2], phi: f64, outer: bool, sqrt_e: f64) -> C64 {
    let (a, b) = if outer { (phi - PI, phi) } else { (phi, phi + PI) };
    let s = sqrt_e * x[0].hypot(x[1]);
    let panels = 1 + (s / 6.0) as usize;
    let gl = GaussLegendre::cached(24);
    let v = gl.integrate_composite(a, b, panels, |t: f64| {
        C64::from_polar(1.0, sqrt_e * (x[0] * t.cos() + x[1] * t.sin()))
    });
    v * C64::new(0.0, 1.0 / (4.0 * PI))
}

/// g(x,k(λ)) for λ = τ_t·u (outer) or u/τ_t (inner) and every τ_t in the
/// increasing list `taus` (all > 1), along one ray. `classical` is G⁺(x), or
/// zero to obtain (G − G⁺)e^{−ik(λ)x} instead.
fn ray_core(ray: &Ray, phi: f64, taus: &[f64], classical: C64, out: &mut [C64]) {
    let m = taus.len();
    debug_assert!(m > 0 && taus[0] > 1.0);
    let i = C64::new(0.0, 1.0);
    let kx: Vec<C64> = taus.iter().map(|&t| ray.kx(t)).collect();
    // segments [τ_{t−1}, τ_t] scaled by e^{−ik(λ_t)x}, τ_{−1} = 1
    let mut seg = Vec::with_capacity(m);
    for t in 0..m {
        let a = if t == 0 { 1.0 } else { taus[t - 1] };
        seg.push(ray.segment(a, taus[t], kx[t]));
    }
    let inward: Vec<bool> = taus.iter().map(|&t| ray.use_inward(t)).collect();
    // outward accumulation while it is stable
    let kx1 = ray.kx(1.0);
    let mut acc = (classical + unit_circle_limit([ray.z.re, ray.z.im], phi, ray.outer, ray.sqrt_e))
        * (i * (-kx1)).exp();
    let mut prev = kx1;
    for t in 0..m {
        if inward[t] {
            break;
        }
        acc = acc * (i * (prev - kx[t])).exp() + seg[t];
        prev = kx[t];
        out[t] = acc;
    }
    if !inward[m - 1] {
        return;
    }
    // inward accumulation from infinity; inward[t] is monotone in t
    let mut back = -ray.tail(taus[m - 1], kx[m - 1]);
    out[m - 1] = back;
    for t in (0..m - 1).rev() {
        if !inward[t] {
            break;
        }
        let shift = (i * (kx[t + 1] - kx[t])).exp();
        back = back * shift - seg[t + 1] * shift;
        out[t] = back;
    }
}

fn split(lambda: SpectralPoint) -> Result<(C64, f64, bool, f64), GreenError> {
    let l = lambda.value();
    let r = l.norm();
    if (r - 1.0).abs() < 1e-12 {
        return Err(GreenError::UnitCircle(l));
    }
    let outer = r > 1.0;
    Ok((l / r, l.arg(), outer, if outer { r } else { 1.0 / r }))
}

/// g(x,k(λ)) = G(x,k(λ))e^{−ik(λ)x}, x ≠ 0.
pub fn green_faddeev_g(x: [f64; 2], lambda: SpectralPoint, e: Energy) -> Result<C64, GreenError> {
    let (u, phi, outer, tau) = split(lambda)?;
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return Err(GreenError::SingularArgument);
    }
    let ray = Ray::new(e.sqrt(), x, u, outer);
    let mut out = [C64::new(0.0, 0.0)];
    ray_core(&ray, phi, &[tau], green_classical_r(r, e.sqrt()), &mut out);
    Ok(out[0])
}

/// G(x,k(λ)), x ≠ 0.
pub fn green_faddeev(x: [f64; 2], lambda: SpectralPoint, e: Energy) -> Result<C64, GreenError> {
    let g = green_faddeev_g(x, lambda, e)?;
    let z = C64::new(x[0], x[1]);
    Ok(g * (C64::new(0.0, 1.0) * phase(e.sqrt(), z, lambda.value())).exp())
}

/// G(x,k(λ)) − G⁺(x); finite at x = 0 where it equals [`diagonal_difference`].
pub fn green_difference(x: [f64; 2], lambda: SpectralPoint, e: Energy) -> Result<C64, GreenError> {
    let (u, phi, outer, tau) = split(lambda)?;
    if x == [0.0, 0.0] {
        return Ok(diagonal_difference(lambda));
    }
    let ray = Ray::new(e.sqrt(), x, u, outer);
    let mut out = [C64::new(0.0, 0.0)];
    ray_core(&ray, phi, &[tau], C64::new(0.0, 0.0), &mut out);
    let z = C64::new(x[0], x[1]);
    Ok(out[0] * (C64::new(0.0, 1.0) * phase(e.sqrt(), z, lambda.value())).exp())
}

/// lim_{x→0} G(x,k(λ)) − G⁺(x) = i/4 + |ln|λ||/(2π).
pub fn diagonal_difference(lambda: SpectralPoint) -> C64 {
    C64::new(lambda.value().norm().ln().abs() / (2.0 * PI), 0.25)
}

/// g(x,k(λ_t)) for all λ_t on one ray: λ_t = τ_t e^{iφ} if `outer`, else
/// e^{iφ}/τ_t, with `taus` increasing and > 1. Costs about as much as one
/// pointwise evaluation at the largest τ.
pub fn green_faddeev_g_ray(x: [f64; 2], phi: f64, outer: bool, taus: &[f64], e: Energy) -> Result<Vec<C64>, GreenError> {
    if taus.is_empty() {
        return Ok(Vec::new());
    }
    if taus[0] <= 1.0 + 1e-12 || taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GreenError::InvalidRay);
    }
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return Err(GreenError::SingularArgument);
    }
    let ray = Ray::new(e.sqrt(), x, C64::from_polar(1.0, phi), outer);
    let mut out = vec![C64::new(0.0, 0.0); taus.len()];
    ray_core(&ray, phi, taus, green_classical_r(r, e.sqrt()), &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e25() -> Energy {
        Energy::new(25.0).unwrap()
    }

    fn lam(z: C64) -> SpectralPoint {
        SpectralPoint::new(z).unwrap()
    }

    #[test]
    fn ray_matches_pointwise() {
        let taus = [1.1, 1.3, 2.0, 3.5, 6.0, 9.0];
        for &(x, phi) in &[([0.3, -0.7], 0.4), ([-1.2, 0.5], 2.0), ([0.05, 0.02], -1.0)] {
            for outer in [true, false] {
                let ray = green_faddeev_g_ray(x, phi, outer, &taus, e25()).unwrap();
                for (t, g) in taus.iter().zip(&ray) {
                    let l = if outer { C64::from_polar(*t, phi) } else { C64::from_polar(1.0 / t, phi) };
                    let p = green_faddeev_g(x, lam(l), e25()).unwrap();
                    assert!((p - g).norm() < 1e-11 * (1.0 + p.norm()), "{x:?} {phi} {t}: {p} vs {g}");
                }
            }
        }
    }

    #[test]
    fn both_branches_agree_near_the_switch() {
        // evaluate the same point by the outward and the inward integral
        let e = e25();
        let x = [0.0, -0.5];
        let u = C64::new(1.0, 0.0);
        let ray = Ray::new(e.sqrt(), x, u, true);
        assert!(ray.c_eff > 0.0);
        let tau = 1.6;
        let kx = ray.kx(tau);
        let i = C64::new(0.0, 1.0);
        let g0 = (green_classical_r(0.5, e.sqrt()) + unit_circle_limit(x, 0.0, true, e.sqrt())) * (i * (-kx)).exp();
        let fwd = g0 + ray.segment(1.0, tau, kx);
        let bwd = -ray.tail(tau, kx);
        assert!((fwd - bwd).norm() < 1e-11, "{fwd} vs {bwd}");
    }

    #[test]
    fn unit_circle_rejected() {
        let r = green_faddeev_g([0.1, 0.2], lam(C64::from_polar(1.0, 0.3)), e25());
        assert!(matches!(r, Err(GreenError::UnitCircle(_))));
    }

    #[test]
    fn difference_is_continuous_at_origin() {
        let l = lam(C64::from_polar(1.7, 0.9));
        let d0 = diagonal_difference(l);
        let d = green_difference([1e-7, 2e-7], l, e25()).unwrap();
        assert!((d - d0).norm() < 1e-5, "{d} vs {d0}");
    }
}
