use serde::{Deserialize, Serialize};

use crate::{DomainDescriptor, PotentialError};

/// Sampled potential. Node (i, j) sits at
/// `origin + ((i + ½) h, (j + ½) h)`; values are stored row-major with `i`
/// fastest, i.e. index `j * nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    pub domain: DomainDescriptor,
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    pub origin: [f64; 2],
    pub values: Vec<f64>,
}

impl PotentialGrid {
    /// Zero grid with `n` cells along the longer side of D's bounding box.
    pub fn zeros(domain: DomainDescriptor, n: usize) -> Result<Self, PotentialError> {
        if n < 2 {
            return Err(PotentialError::InvalidGrid(format!("need at least 2 cells, got {n}")));
        }
        let (lo, hi) = domain.bounding_box();
        let w = hi[0] - lo[0];
        let ht = hi[1] - lo[1];
        let h = w.max(ht) / n as f64;
        let nx = ((w / h) - 1e-9).ceil().max(1.0) as usize;
        let ny = ((ht / h) - 1e-9).ceil().max(1.0) as usize;
        // centre the (possibly slightly larger) lattice on the box
        let origin = [
            0.5 * (lo[0] + hi[0]) - 0.5 * nx as f64 * h,
            0.5 * (lo[1] + hi[1]) - 0.5 * ny as f64 * h,
        ];
        Ok(Self { domain, nx, ny, spacing: h, origin, values: vec![0.0; nx * ny] })
    }

    /// Samples `f` at every node inside D; nodes outside D are set to zero.
    pub fn sample<F: Fn([f64; 2]) -> f64>(domain: DomainDescriptor, n: usize, f: F) -> Result<Self, PotentialError> {
        let mut g = Self::zeros(domain, n)?;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let x = g.node(i, j);
                if g.domain.contains(x) {
                    g.values[j * g.nx + i] = f(x);
                }
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.spacing,
            self.origin[1] + (j as f64 + 0.5) * self.spacing,
        ]
    }

    pub fn node_at(&self, idx: usize) -> [f64; 2] {
        self.node(idx % self.nx, idx / self.nx)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Cell area h².
    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Midpoint-rule integral over the grid.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_area()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.cell_area()).sqrt()
    }

    /// Indices of nodes where the potential is nonzero.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&k| self.values[k] != 0.0).collect()
    }

    /// True when the potential vanishes at every node outside D.
    pub fn vanishes_outside_domain(&self) -> bool {
        (0..self.values.len()).all(|k| self.values[k] == 0.0 || self.domain.contains(self.node_at(k)))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

fn bump_profile(r2: f64, radius: f64) -> f64 {
    let t = r2 / (radius * radius);
    if t >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t)).exp()
    }
}

/// C∞ bump `a·exp(1 − 1/(1 − r²/R²))` on the disk of radius R about `center`.
pub fn make_bump(
    domain: DomainDescriptor,
    n: usize,
    center: [f64; 2],
    radius: f64,
    amplitude: f64,
) -> Result<PotentialGrid, PotentialError> {
    if !(radius > 0.0) || !domain.contains_disk(center, radius) {
        return Err(PotentialError::SupportViolation { center, radius });
    }
    PotentialGrid::sample(domain, n, |x| {
        let dx = x[0] - center[0];
        let dy = x[1] - center[1];
        amplitude * bump_profile(dx * dx + dy * dy, radius)
    })
}

/// Radial factory functions with their parameters, serializable for run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    Bump { center: [f64; 2], radius: f64, amplitude: f64 },
    /// `a·exp(−r²/(2σ²))` cut off to zero for r ≥ cutoff.
    TruncatedGaussian { center: [f64; 2], sigma: f64, cutoff: f64, amplitude: f64 },
    /// Two bumps of different size and height; no symmetry axis through the origin.
    TwoBump {
        centers: [[f64; 2]; 2],
        radii: [f64; 2],
        amplitudes: [f64; 2],
    },
    /// Piecewise constant: `a` on the disk, 0 elsewhere.
    DiskIndicator { center: [f64; 2], radius: f64, amplitude: f64 },
}

/// Domain, resolution and shape of a test potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub domain: DomainDescriptor,
    pub n: usize,
    #[serde(flatten)]
    pub kind: PotentialKind,
}

impl PotentialSpec {
    pub fn build(&self) -> Result<PotentialGrid, PotentialError> {
        let d = self.domain;
        match &self.kind {
            PotentialKind::Zero => PotentialGrid::zeros(d, self.n),
            PotentialKind::Bump { center, radius, amplitude } => {
                make_bump(d, self.n, *center, *radius, *amplitude)
            }
            PotentialKind::TruncatedGaussian { center, sigma, cutoff, amplitude } => {
                if !d.contains_disk(*center, *cutoff) {
                    return Err(PotentialError::SupportViolation { center: *center, radius: *cutoff });
                }
                let (c, s, rc, a) = (*center, *sigma, *cutoff, *amplitude);
                PotentialGrid::sample(d, self.n, |x| {
                    let r2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
                    if r2 < rc * rc {
                        a * (-r2 / (2.0 * s * s)).exp()
                    } else {
                        0.0
                    }
                })
            }
            PotentialKind::TwoBump { centers, radii, amplitudes } => {
                for k in 0..2 {
                    if !(radii[k] > 0.0) || !d.contains_disk(centers[k], radii[k]) {
                        return Err(PotentialError::SupportViolation { center: centers[k], radius: radii[k] });
                    }
                }
                let (cs, rs, as_) = (*centers, *radii, *amplitudes);
                PotentialGrid::sample(d, self.n, |x| {
                    (0..2)
                        .map(|k| {
                            let r2 = (x[0] - cs[k][0]).powi(2) + (x[1] - cs[k][1]).powi(2);
                            as_[k] * bump_profile(r2, rs[k])
                        })
                        .sum()
                })
            }
            PotentialKind::DiskIndicator { center, radius, amplitude } => {
                if !d.contains_disk(*center, *radius) {
                    return Err(PotentialError::SupportViolation { center: *center, radius: *radius });
                }
                let (c, r, a) = (*center, *radius, *amplitude);
                PotentialGrid::sample(d, self.n, |x| {
                    if (x[0] - c[0]).hypot(x[1] - c[1]) < r {
                        a
                    } else {
                        0.0
                    }
                })
            }
        }
    }
}

/// `s ↦ s·v` for s in (−s₁, s₁) with s₁ = q / ‖v‖∞.
#[derive(Debug, Clone)]
pub struct PotentialFamily {
    pub base: PotentialGrid,
    pub s1: f64,
}

impl PotentialFamily {
    /// Family whose members stay below the sup-norm bound `q`.
    pub fn new(base: PotentialGrid, q: f64) -> Self {
        let n = base.sup_norm();
        let s1 = if n == 0.0 { f64::INFINITY } else { q / n };
        Self { base, s1 }
    }

    pub fn scale(&self, s: f64) -> Result<PotentialGrid, PotentialError> {
        if !(s.abs() < self.s1) {
            return Err(PotentialError::ScaleOutOfRange { s, s1: self.s1 });
        }
        Ok(self.base.scaled(s))
    }

    /// `m` equispaced values strictly inside (−s₁, s₁): the endpoints of the
    /// uniform grid with `m + 1` gaps are dropped.
    pub fn s_grid(&self, m: usize) -> Vec<f64> {
        let s1 = if self.s1.is_finite() { self.s1 } else { 1.0 };
        (0..m)
            .map(|k| -s1 + 2.0 * s1 * (k as f64 + 1.0) / (m as f64 + 1.0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> DomainDescriptor {
        DomainDescriptor::unit_disk()
    }

    #[test]
    fn zero_amplitude_gives_zero_grid() {
        let g = make_bump(unit(), 32, [0.0, 0.0], 0.8, 0.0).unwrap();
        assert!(g.is_zero());
    }

    #[test]
    fn bump_peaks_at_amplitude() {
        // odd n puts a node on the centre
        let g = make_bump(unit(), 33, [0.0, 0.0], 0.8, 2.5).unwrap();
        assert_eq!(g.value(16, 16), 2.5);
        assert!(g.sup_norm() <= 2.5);
    }

    #[test]
    fn bump_outside_domain_is_rejected() {
        let e = make_bump(unit(), 16, [0.5, 0.0], 0.8, 1.0);
        assert!(matches!(e, Err(PotentialError::SupportViolation { .. })));
    }

    #[test]
    fn every_factory_vanishes_outside_domain() {
        let kinds = [
            PotentialKind::Zero,
            PotentialKind::Bump { center: [0.1, 0.0], radius: 0.7, amplitude: 1.0 },
            PotentialKind::TruncatedGaussian { center: [0.0, 0.0], sigma: 0.3, cutoff: 0.9, amplitude: 1.0 },
            PotentialKind::TwoBump { centers: [[-0.4, 0.1], [0.35, -0.3]], radii: [0.45, 0.3], amplitudes: [1.0, 0.6] },
            PotentialKind::DiskIndicator { center: [0.0, 0.2], radius: 0.5, amplitude: 1.0 },
        ];
        for kind in kinds {
            let g = PotentialSpec { domain: unit(), n: 40, kind }.build().unwrap();
            assert!(g.vanishes_outside_domain());
            assert!(g.values.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn family_scaling_and_range() {
        let base = make_bump(unit(), 16, [0.0, 0.0], 0.8, 1.0).unwrap();
        let fam = PotentialFamily::new(base.clone(), 2.0 * base.sup_norm());
        assert!((fam.s1 - 2.0).abs() < 1e-15);
        assert!(fam.scale(0.0).unwrap().is_zero());
        assert_eq!(fam.scale(1.0).unwrap(), base);
        assert!(fam.scale(2.0).is_err());
        let sg = fam.s_grid(21);
        assert_eq!(sg.len(), 21);
        assert!(sg[10].abs() < 1e-15);
        assert!(sg.iter().all(|s| s.abs() < fam.s1));
    }
}
