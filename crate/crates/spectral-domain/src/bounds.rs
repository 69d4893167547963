use std::f64::consts::PI;

use potential_lab::DomainDescriptor;
use serde::{Deserialize, Serialize};

use crate::Energy;

/// Operator-norm bound M for the Faddeev equation and the threshold ρ₁ above
/// which no exceptional points occur.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AprioriBounds {
    pub c0: f64,
    pub q: f64,
    pub i1: f64,
    pub m: f64,
    pub rho1: f64,
}

const ANGLES: usize = 2048;

/// ∫_D |x − y|^{-1/2} dy for x in a convex D, via polar coordinates about x:
/// (2/3)∫ R(θ)^{3/2} dθ with R the distance to ∂D along direction θ.
fn i1_at(domain: &DomainDescriptor, x: [f64; 2]) -> f64 {
    let dt = 2.0 * PI / ANGLES as f64;
    let mut acc = 0.0;
    for k in 0..ANGLES {
        let t = (k as f64 + 0.5) * dt;
        let r = domain.ray_exit(x, [t.cos(), t.sin()]);
        acc += r * r.sqrt();
    }
    2.0 / 3.0 * acc * dt
}

/// I₁(D) = max_x ∫_D |x − y|^{-1/2} dy. Coarse search over a lattice in D
/// followed by a shrinking compass search around the best lattice point.
pub fn i1_domain(domain: &DomainDescriptor) -> f64 {
    let (lo, hi) = domain.bounding_box();
    let m = 24;
    let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
    for j in 0..=m {
        for i in 0..=m {
            let x = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / m as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / m as f64,
            ];
            if domain.contains(x) {
                let v = i1_at(domain, x);
                if v > best.0 {
                    best = (v, x);
                }
            }
        }
    }
    let mut step = (hi[0] - lo[0]).max(hi[1] - lo[1]) / m as f64;
    while step > 1e-7 {
        let mut moved = false;
        for d in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
            let x = [best.1[0] + step * d[0], best.1[1] + step * d[1]];
            if domain.contains(x) {
                let v = i1_at(domain, x);
                if v > best.0 {
                    best = (v, x);
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best.0
}

/// M = c₀qI₁/(E + ρ²)^{1/4}, ρ₁ = max((c₀qI₁)⁴ − E, 0)^{1/2}.
pub fn apriori_bounds(q: f64, domain: &DomainDescriptor, e: Energy, rho: f64, c0: f64) -> AprioriBounds {
    let i1 = if q == 0.0 { 0.0 } else { i1_domain(domain) };
    bounds_from_i1(q, i1, e, rho, c0)
}

/// Same as [`apriori_bounds`] with a precomputed I₁(D).
pub fn bounds_from_i1(q: f64, i1: f64, e: Energy, rho: f64, c0: f64) -> AprioriBounds {
    let a = c0 * q * i1;
    AprioriBounds {
        c0,
        q,
        i1,
        m: a / (e.value() + rho * rho).powf(0.25),
        rho1: (a.powi(4) - e.value()).max(0.0).sqrt(),
    }
}

/// Default ρ: 1.05·ρ₁, but never below `floor_fraction`·√E. In the small-data
/// regime ρ₁ vanishes and some positive ρ is still needed to open Λ.
pub fn auto_rho(rho1: f64, e: Energy, floor_fraction: f64) -> f64 {
    (1.05 * rho1).max(floor_fraction * e.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_has_zero_bounds() {
        let b = apriori_bounds(0.0, &DomainDescriptor::unit_disk(), Energy::new(4.0).unwrap(), 1.0, 0.2);
        assert_eq!(b.m, 0.0);
        assert_eq!(b.rho1, 0.0);
    }

    #[test]
    fn unit_disk_i1_is_four_pi_over_three() {
        let v = i1_domain(&DomainDescriptor::unit_disk());
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn auto_rho_respects_floor() {
        let e = Energy::new(25.0).unwrap();
        assert_eq!(auto_rho(0.0, e, 0.2), 1.0);
        assert!((auto_rho(10.0, e, 0.2) - 10.5).abs() < 1e-12);
    }
}
