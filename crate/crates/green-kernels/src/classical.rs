//! The outgoing Green's function G⁺(x) = −(i/4)H₀⁽¹⁾(√E|x|) of −Δ − E, its
//! exact integrals over lattice cells and the decay constant c₀.

use std::f64::consts::{PI, TAU};

use scatter_numerics::quadrature::GaussLegendre;
use spectral_domain::Energy;

use crate::bessel::{hankel1_0, hankel1_01};
use crate::{GreenError, C64};

/// G⁺ as a function of the radius r = |x| > 0.
pub fn green_classical_r(r: f64, sqrt_e: f64) -> C64 {
    C64::new(0.0, -0.25) * hankel1_0(sqrt_e * r)
}

pub fn green_classical(x: [f64; 2], e: Energy) -> Result<C64, GreenError> {
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return Err(GreenError::SingularArgument);
    }
    Ok(green_classical_r(r, e.sqrt()))
}

/// ∫₀^R G⁺(r) r dr = −(i/4)[R·H₁(aR)/a + 2i/(πa²)], a = √E.
pub fn radial_primitive(r: f64, a: f64) -> C64 {
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let (_, h1) = hankel1_01(a * r);
    C64::new(0.0, -0.25) * (h1 * (r / a) + C64::new(0.0, 2.0 / (PI * a * a)))
}

/// ∫ G⁺(y) dy over the square of side `h` centred at `center`, exactly up to
/// an angular Gauss rule. The square is split into the signed triangles
/// spanned by the origin and each edge; on each triangle the radial integral
/// is the closed-form primitive.
pub fn cell_integral_classical(center: [f64; 2], h: f64, sqrt_e: f64) -> C64 {
    let gl = GaussLegendre::cached(24);
    let d = 0.5 * h;
    let corners = [
        [center[0] - d, center[1] - d],
        [center[0] + d, center[1] - d],
        [center[0] + d, center[1] + d],
        [center[0] - d, center[1] + d],
    ];
    let mut acc = C64::new(0.0, 0.0);
    for e in 0..4 {
        let p = corners[e];
        let q = corners[(e + 1) % 4];
        let cross = p[0] * q[1] - p[1] * q[0];
        let len = (q[0] - p[0]).hypot(q[1] - p[1]);
        let dist = cross.abs() / len;
        if dist < 1e-15 * h {
            continue;
        }
        // outward-from-origin unit normal of the edge line
        let (mut nx, mut ny) = ((q[1] - p[1]) / len, -(q[0] - p[0]) / len);
        if nx * p[0] + ny * p[1] < 0.0 {
            nx = -nx;
            ny = -ny;
        }
        let phi_n = ny.atan2(nx);
        let a0 = p[1].atan2(p[0]);
        let mut da = q[1].atan2(q[0]) - a0;
        if da > PI {
            da -= TAU;
        } else if da < -PI {
            da += TAU;
        }
        acc += gl.integrate(a0, a0 + da, |phi| radial_primitive(dist / (phi - phi_n).cos(), sqrt_e));
    }
    acc
}

/// sup over sampled s > 0 of s^{1/2}|H₀⁽¹⁾(s)|/4, the smallest c₀ with
/// |G⁺(x)| ≤ c₀|x|^{-1/2}E^{-1/4}. The supremum is approached as s → ∞
/// where it tends to (2/π)^{1/2}/4; the sample maximum over (0, s_max] is
/// returned together with its location.
pub fn calibrate_c0(s_max: f64, samples: usize) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    for i in 1..=samples {
        // geometric spacing resolves both the log regime and the oscillatory tail
        let s = s_max * (1e-6f64).powf(1.0 - i as f64 / samples as f64);
        let v = s.sqrt() * hankel1_0(s).norm() / 4.0;
        if v > best.0 {
            best = (v, s);
        }
    }
    best
}

/// Limit value of [`calibrate_c0`] as s_max → ∞.
pub fn c0_limit() -> f64 {
    (2.0 / PI).sqrt() / 4.0
}
