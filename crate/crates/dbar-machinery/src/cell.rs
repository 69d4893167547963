//! Exact Cauchy transform of the indicator of one annular sector.
//!
//! With F(η) = (η̄ − λ̄)/(η − λ) one has ∂̄F = 1/(η − λ) away from λ and F is
//! bounded, so ∫_cell dA/(η−λ) = (1/2i)∮_{∂cell} F dη for λ anywhere,
//! including inside the cell. Each of the four edges integrates in closed
//! form; logarithms are taken of quantities whose principal branch is
//! continuous along the edge.

use std::f64::consts::PI;

use spectral_domain::Cell;

use crate::C64;

/// c·(ln b − ln a), with c·ln 0 read as its limit 0 (the target sits on a
/// cell corner, where c vanishes like the distance).
fn dlog(c: C64, b: C64, a: C64) -> C64 {
    let l = |z: C64| if z.norm() == 0.0 { C64::new(0.0, 0.0) } else { z.ln() };
    if c.norm() == 0.0 {
        return C64::new(0.0, 0.0);
    }
    c * (l(b) - l(a))
}

/// ∫ F dη along the arc |η| = s from angle a to angle b.
fn arc(s: f64, a: f64, b: f64, lambda: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let (ea, eb) = (C64::from_polar(s, a), C64::from_polar(s, b));
    let coef = (s * s - lambda.norm_sqr()) / lambda;
    if lambda.norm() < s {
        // A + B = −λ̄; ln(η−λ) = ln η + ln(1 − λ/η) with |λ/η| < 1
        let mut v = -lambda.conj() * i * (b - a);
        v += dlog(coef, one - lambda / eb, one - lambda / ea);
        v
    } else {
        let mut v = -s * s / lambda * i * (b - a);
        v += dlog(coef, one - eb / lambda, one - ea / lambda);
        v
    }
}

/// ∫ F dη along the ray arg η = t from |η| = a to |η| = b.
fn radial(t: f64, a: f64, b: f64, lambda: C64) -> C64 {
    let beta = lambda * C64::from_polar(1.0, -t);
    let mut v = C64::new(b - a, 0.0);
    // s − β runs parallel to the real axis, off it: principal log is continuous
    v += dlog(C64::new(0.0, 2.0 * beta.im), C64::new(b, 0.0) - beta, C64::new(a, 0.0) - beta);
    // F dη = e^{−it}(s − β̄)/(s − β) ds
    v * C64::from_polar(1.0, -t)
}

/// −(1/π)∫_cell dA(η)/(η − λ), λ ≠ 0.
pub fn cell_cauchy(cell: &Cell, lambda: C64) -> C64 {
    debug_assert!(lambda.norm() > 0.0);
    let loop_integral = arc(cell.r1, cell.t0, cell.t1, lambda)
        + radial(cell.t1, cell.r1, cell.r0, lambda)
        + arc(cell.r0, cell.t1, cell.t0, lambda)
        + radial(cell.t0, cell.r0, cell.r1, lambda);
    // −(1/π)·(1/2i)·∮ = (i/2π)·∮
    loop_integral * C64::new(0.0, 0.5 / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use scatter_numerics::quadrature::GaussLegendre;

    fn brute(cell: &Cell, lambda: C64) -> C64 {
        let gl = GaussLegendre::cached(40);
        let v: C64 = gl.integrate_composite(cell.r0, cell.r1, 4, |r: f64| {
            gl.integrate_composite(cell.t0, cell.t1, 4, |t: f64| r / (C64::from_polar(r, t) - lambda))
        });
        -v / PI
    }

    #[test]
    fn far_targets_match_tensor_quadrature() {
        let cell = Cell { r0: 1.3, r1: 1.5, t0: 0.2, t1: 0.35 };
        for lambda in [C64::new(3.0, 1.0), C64::new(0.1, -0.2), C64::new(-1.4, 0.3), C64::from_polar(1.4, 0.9)] {
            let (a, b) = (cell_cauchy(&cell, lambda), brute(&cell, lambda));
            assert!((a - b).norm() < 1e-12 * b.norm(), "{lambda}: {a} {b}");
        }
    }

    #[test]
    fn small_cell_behaves_like_a_point_mass() {
        let cell = Cell { r0: 2.0, r1: 2.001, t0: 1.0, t1: 1.0005 };
        let lambda = C64::new(-0.5, 0.7);
        let c = C64::from_polar(2.0005, 1.00025);
        let approx = -cell.area() / PI / (c - lambda);
        assert!((cell_cauchy(&cell, lambda) - approx).norm() < 1e-6 * approx.norm());
    }

    #[test]
    fn interior_target_has_dbar_equal_to_one() {
        // inside the cell the transform is λ̄-like: ∂̄ of it is exactly 1
        let cell = Cell { r0: 1.0, r1: 1.4, t0: -0.3, t1: 0.3 };
        let l0 = C64::new(1.2, 0.05);
        let h = 1e-4;
        let f = |z: C64| cell_cauchy(&cell, z);
        let dx = (f(l0 + h) - f(l0 - h)) / (2.0 * h);
        let dy = (f(l0 + C64::new(0.0, h)) - f(l0 - C64::new(0.0, h))) / (2.0 * h);
        let dbar = 0.5 * (dx + C64::new(0.0, 1.0) * dy);
        assert!((dbar - 1.0).norm() < 1e-7, "{dbar}");
    }

    #[test]
    fn targets_on_edges_are_finite() {
        let cell = Cell { r0: 1.0, r1: 1.4, t0: -0.3, t1: 0.3 };
        for z in [C64::new(1.0, 0.0), C64::new(1.4, 0.0), C64::from_polar(1.2, 0.3), C64::from_polar(1.0, 0.3), C64::from_polar(1.4, -0.3)] {
            assert!(cell_cauchy(&cell, z).is_finite());
        }
        // continuity across the outer arc
        let a = cell_cauchy(&cell, C64::new(1.4 - 1e-9, 0.0));
        let b = cell_cauchy(&cell, C64::new(1.4 + 1e-9, 0.0));
        assert!((a - b).norm() < 1e-7);
    }
}
