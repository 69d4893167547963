//! Cauchy integrals (1/2πi)∫_{∂Λ} K(ζ)/(ζ − λ) dζ of contour data, with K
//! replaced by its trigonometric interpolant on each circle. The integral of
//! a Fourier mode is closed form, so values near ∂Λ and the boundary values
//! from inside Λ (Plemelj) are as accurate as the interpolant itself.

use std::f64::consts::TAU;

use spectral_domain::SpectralContour;

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    /// Target strictly off ∂Λ.
    Off,
    /// Target on ∂Λ, boundary value from inside Λ.
    FromInside,
}

#[derive(Debug, Clone)]
pub struct ContourCauchy {
    n: usize,
    radius: f64,
    /// e^{−imθ_j}, index (m + n/2)·n + j.
    basis: Vec<C64>,
}

/// (1/2πi)∮_{|ζ|=a, ccw} (ζ/a)^m/(ζ − λ) dζ; `inside` selects the branch
/// |λ| < a (or the limit from inside when λ is on the circle).
fn mode_value(m: i64, a: f64, lambda: C64, inside: bool) -> C64 {
    if inside {
        if m >= 0 {
            (lambda / a).powi(m as i32)
        } else {
            C64::new(0.0, 0.0)
        }
    } else if m < 0 {
        -(C64::new(a, 0.0) / lambda).powi((-m) as i32)
    } else {
        C64::new(0.0, 0.0)
    }
}

impl ContourCauchy {
    pub fn new(contour: &SpectralContour) -> Self {
        let n = contour.per_circle();
        let half = (n / 2) as i64;
        let basis = (-half..=half)
            .flat_map(|m| (0..n).map(move |j| C64::from_polar(1.0, -(m as f64) * TAU * j as f64 / n as f64)))
            .collect();
        Self { n, radius: contour.radius(), basis }
    }

    fn on_circle(&self, z: C64, a: f64) -> bool {
        (z.norm() - a).abs() <= 1e-12 * a
    }

    /// Weights w_j with (1/2πi)∫K(ζ)dζ/(ζ−λ) = Σ_j w_j K(ζ_j) for the
    /// interpolant of K on the 2n contour nodes.
    pub fn weights(&self, lambda: C64, approach: Approach) -> Vec<C64> {
        let n = self.n;
        let half = (n / 2) as i64;
        let mut out = Vec::with_capacity(2 * n);
        for (circle, a, orient) in [(0, self.radius, 1.0), (1, 1.0 / self.radius, -1.0)] {
            let own = self.on_circle(lambda, a);
            if own && approach == Approach::Off {
                panic!("target {lambda} lies on the contour; use Approach::FromInside");
            }
            // Λ lies inside the outer circle and outside the inner one
            let inside = if own { circle == 0 } else { lambda.norm() < a };
            let mut w = vec![C64::new(0.0, 0.0); n];
            for m in -half..=half {
                let v = mode_value(m, a, lambda, inside) * if m.abs() == half { 0.5 } else { 1.0 };
                if v.norm() == 0.0 {
                    continue;
                }
                let row = &self.basis[(m + half) as usize * n..(m + half + 1) as usize * n];
                w.iter_mut().zip(row).for_each(|(a, b)| *a += v * b);
            }
            out.extend(w.into_iter().map(|z| z * (orient / n as f64)));
        }
        out
    }

    /// Row-major targets × 2n weight matrix.
    pub fn matrix(&self, targets: &[C64], approach: Approach) -> Vec<C64> {
        targets.iter().flat_map(|&z| self.weights(z, approach)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_domain::{build_contour, ContourSpec, Energy};

    fn contour(n: usize) -> SpectralContour {
        build_contour(ContourSpec::new(Energy::new(25.0).unwrap(), 1.0, n).unwrap())
    }

    #[test]
    fn matches_trapezoid_far_from_the_contour() {
        let c = contour(128);
        let cc = ContourCauchy::new(&c);
        let k: Vec<C64> = c.nodes.iter().map(|p| (p.lambda * 0.3).exp() + 1.0 / p.lambda).collect();
        for z in [C64::new(5.0, 1.0), C64::new(0.1, 0.2), C64::new(0.0, 1.0)] {
            let w = cc.weights(z, Approach::Off);
            let a: C64 = w.iter().zip(&k).map(|(w, k)| w * k).sum();
            let b: C64 = c.nodes.iter().zip(&k).map(|(p, k)| k * p.weight / (p.lambda - z)).sum::<C64>() / C64::new(0.0, TAU);
            assert!((a - b).norm() < 1e-10, "{z}: {a} {b}");
        }
    }

    #[test]
    fn plemelj_jump_is_the_density() {
        // boundary value from inside Λ minus the value just outside equals K
        let c = contour(32);
        let cc = ContourCauchy::new(&c);
        let k: Vec<C64> = c.nodes.iter().map(|p| (p.lambda * 0.5).sin() + p.lambda.conj()).collect();
        for i in [0, 5, 40, 50] {
            let l = c.nodes[i].lambda;
            let out = if l.norm() > 1.0 { l * 1.0000001 } else { l * 0.9999999 };
            let a: C64 = cc.weights(l, Approach::FromInside).iter().zip(&k).map(|(w, k)| w * k).sum();
            let b: C64 = cc.weights(out, Approach::Off).iter().zip(&k).map(|(w, k)| w * k).sum();
            assert!((a - b - k[i]).norm() < 1e-5, "{i}: {}", (a - b - k[i]).norm());
        }
    }

    #[test]
    fn holomorphic_data_inside_is_reproduced() {
        // K = F|∂Λ with F holomorphic on a neighbourhood of the closed annulus:
        // the Cauchy integral reproduces F inside Λ and its boundary values
        let c = contour(64);
        let cc = ContourCauchy::new(&c);
        let f = |z: C64| z * z + 2.0 / z + (0.2 * z).exp();
        let k: Vec<C64> = c.nodes.iter().map(|p| f(p.lambda)).collect();
        for z in [C64::new(1.0, 0.1), c.nodes[3].lambda, c.nodes[70].lambda] {
            let ap = if (z.norm() - c.radius()).abs() < 1e-12 || (z.norm() - 1.0 / c.radius()).abs() < 1e-12 { Approach::FromInside } else { Approach::Off };
            let v: C64 = cc.weights(z, ap).iter().zip(&k).map(|(w, k)| w * k).sum();
            assert!((v - f(z)).norm() < 1e-12, "{z}: {v} {}", f(z));
        }
    }
}
