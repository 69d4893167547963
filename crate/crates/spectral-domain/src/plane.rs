//! Polar grid on ℂ∖Λ truncated to 1/C_max ≤ |λ| ≤ C_max.
//!
//! Outer rings have geometric edges C·q^t, t = 0..=n_r, with q = (C_max/C)^{1/n_r};
//! each ring is split into n_θ equal angular cells centred on θ_j = 2πj/n_θ.
//! Node radii are the arithmetic midpoints of the ring edges. Inner ring t is
//! the image of outer ring t under λ ↦ −1/λ̄, so every inner node is exactly
//! the mirror of an outer node. Nodes are ordered ring-major: outer rings
//! outward, then inner rings inward, angle fastest.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{SpectralError, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExteriorGridSpec {
    /// Radius C of the outer contour circle.
    pub c: f64,
    /// C_max / C.
    pub c_max_factor: f64,
    pub n_rings: usize,
    pub n_theta: usize,
}

/// Annular sector r0 ≤ |λ| ≤ r1, t0 ≤ arg λ ≤ t1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub r0: f64,
    pub r1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Cell {
    pub fn area(&self) -> f64 {
        0.5 * (self.t1 - self.t0) * (self.r1 * self.r1 - self.r0 * self.r0)
    }

    pub fn contains(&self, z: C64) -> bool {
        let r = z.norm();
        if r < self.r0 || r > self.r1 {
            return false;
        }
        let mid = 0.5 * (self.t0 + self.t1);
        let half = 0.5 * (self.t1 - self.t0);
        let d = (z.arg() - mid + PI).rem_euclid(2.0 * PI) - PI;
        d.abs() <= half
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorGrid {
    pub spec: ExteriorGridSpec,
    /// Outer ring edges, length n_rings + 1.
    pub edges: Vec<f64>,
    /// Node radius per ring, length 2·n_rings.
    pub radii: Vec<f64>,
}

impl ExteriorGrid {
    pub fn new(spec: ExteriorGridSpec) -> Result<Self, SpectralError> {
        if !(spec.c > 1.0) || !(spec.c_max_factor > 1.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "need C > 1 and C_max/C > 1, got C = {}, factor = {}",
                spec.c, spec.c_max_factor
            )));
        }
        if spec.n_rings == 0 || spec.n_theta < 4 || spec.n_theta % 2 != 0 {
            return Err(SpectralError::InvalidGrid(format!(
                "need n_rings ≥ 1 and even n_theta ≥ 4, got {} and {}",
                spec.n_rings, spec.n_theta
            )));
        }
        let q = spec.c_max_factor.powf(1.0 / spec.n_rings as f64);
        let edges: Vec<f64> = (0..=spec.n_rings).map(|t| spec.c * q.powi(t as i32)).collect();
        let outer: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let mut radii = outer.clone();
        radii.extend(outer.iter().map(|r| 1.0 / r));
        Ok(Self { spec, edges, radii })
    }

    pub fn n_rings(&self) -> usize {
        self.spec.n_rings
    }

    pub fn n_theta(&self) -> usize {
        self.spec.n_theta
    }

    /// Total number of rings (outer and inner).
    pub fn ring_count(&self) -> usize {
        2 * self.spec.n_rings
    }

    pub fn len(&self) -> usize {
        self.ring_count() * self.spec.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn c_max(&self) -> f64 {
        self.spec.c * self.spec.c_max_factor
    }

    pub fn is_outer_ring(&self, t: usize) -> bool {
        t < self.spec.n_rings
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.spec.n_theta as f64
    }

    pub fn index(&self, t: usize, j: usize) -> usize {
        t * self.spec.n_theta + j
    }

    /// (ring, angle index) of a flat index.
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.spec.n_theta, idx % self.spec.n_theta)
    }

    pub fn node(&self, idx: usize) -> C64 {
        let (t, j) = self.split(idx);
        C64::from_polar(self.radii[t], self.angle(j))
    }

    pub fn nodes(&self) -> Vec<C64> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    /// Radial extent of ring t.
    pub fn ring_edges(&self, t: usize) -> (f64, f64) {
        let n = self.spec.n_rings;
        if t < n {
            (self.edges[t], self.edges[t + 1])
        } else {
            let s = t - n;
            (1.0 / self.edges[s + 1], 1.0 / self.edges[s])
        }
    }

    pub fn cell(&self, idx: usize) -> Cell {
        let (t, j) = self.split(idx);
        let (r0, r1) = self.ring_edges(t);
        let h = PI / self.spec.n_theta as f64;
        let th = self.angle(j);
        Cell { r0, r1, t0: th - h, t1: th + h }
    }

    /// Cell area, constant along a ring.
    pub fn ring_area(&self, t: usize) -> f64 {
        let (r0, r1) = self.ring_edges(t);
        PI / self.spec.n_theta as f64 * (r1 * r1 - r0 * r0)
    }

    pub fn areas(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.ring_area(k / self.spec.n_theta)).collect()
    }

    /// Index of the node at −1/λ̄.
    pub fn mirror(&self, idx: usize) -> usize {
        let (t, j) = self.split(idx);
        let n = self.spec.n_rings;
        let t2 = if t < n { t + n } else { t - n };
        self.index(t2, (j + self.spec.n_theta / 2) % self.spec.n_theta)
    }

    /// Flat index of the cell containing z, if any.
    pub fn locate(&self, z: C64) -> Option<usize> {
        let r = z.norm();
        let t = (0..self.ring_count()).find(|&t| {
            let (a, b) = self.ring_edges(t);
            r >= a && r <= b
        })?;
        let n = self.spec.n_theta as f64;
        let j = ((z.arg() / (2.0 * PI) * n).round() as i64).rem_euclid(self.spec.n_theta as i64) as usize;
        Some(self.index(t, j))
    }

    /// Discrete L_{p,2} norm ‖u‖_{L_p(D₁)} + ‖|λ|^{-2} u(1/λ)‖_{L_p(D₁)} of a
    /// cellwise-constant field. The second term becomes, after λ ↦ 1/λ, an
    /// integral of |λ|^{2p−4}|u|^p over |λ| ≥ 1, i.e. over the outer rings.
    pub fn lp2_norm(&self, u: &[C64], p: f64) -> f64 {
        assert_eq!(u.len(), self.len());
        let nt = self.spec.n_theta;
        let mut inner = 0.0;
        let mut outer = 0.0;
        for t in 0..self.ring_count() {
            let a = self.ring_area(t);
            let r = self.radii[t];
            let s: f64 = u[t * nt..(t + 1) * nt].iter().map(|z| z.norm().powf(p)).sum();
            if self.is_outer_ring(t) {
                outer += a * r.powf(2.0 * p - 4.0) * s;
            } else {
                inner += a * s;
            }
        }
        inner.powf(1.0 / p) + outer.powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> ExteriorGrid {
        ExteriorGrid::new(ExteriorGridSpec { c: 1.3, c_max_factor: 8.0, n_rings: 10, n_theta: 16 }).unwrap()
    }

    #[test]
    fn cells_tile_the_two_annuli() {
        let g = grid();
        let total: f64 = g.areas().iter().sum();
        let c = 1.3;
        let cm = 8.0 * c;
        let exact = PI * (cm * cm - c * c) + PI * (1.0 / (c * c) - 1.0 / (cm * cm));
        assert!((total - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn mirror_is_an_involution_on_nodes() {
        let g = grid();
        for k in 0..g.len() {
            let m = g.mirror(k);
            assert_eq!(g.mirror(m), k);
            assert!((g.node(m) + 1.0 / g.node(k).conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn nodes_lie_in_their_cells() {
        let g = grid();
        for k in 0..g.len() {
            assert!(g.cell(k).contains(g.node(k)));
            assert_eq!(g.locate(g.node(k)), Some(k));
        }
        assert_eq!(g.locate(C64::new(1.0, 0.0)), None);
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(ExteriorGrid::new(ExteriorGridSpec { c: 0.9, c_max_factor: 8.0, n_rings: 4, n_theta: 8 }).is_err());
        assert!(ExteriorGrid::new(ExteriorGridSpec { c: 1.2, c_max_factor: 8.0, n_rings: 4, n_theta: 7 }).is_err());
    }
}
