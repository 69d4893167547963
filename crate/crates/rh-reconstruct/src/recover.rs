//! μ' at the probes over an x-grid, and v̂ = (Δμ' + 2ik·∇μ')/μ'.
//!
//! Differentiating μ' rather than ψ' = e^{ikx}μ' keeps the finite
//! differences away from the oscillating exponential.

use forward_scattering::Lattice;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spectral_domain::ComplexMomentum;

use crate::det::{fredholm_det, FredholmDet};
use crate::jump::{solve_point, JumpSolution};
use crate::system::{assemble_system, matvec, RHSystem, RhSetup};
use crate::{RhError, C64};

/// |μ'| below this excludes a node from v̂.
pub const MU_FLOOR: f64 = 1e-8;

/// Uniform grid of x points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XGrid {
    pub origin: [f64; 2],
    pub step: f64,
    pub nx: usize,
    pub ny: usize,
}

impl XGrid {
    /// Every `stride`-th lattice node in each direction.
    pub fn from_lattice(lat: &Lattice, stride: usize) -> Self {
        let stride = stride.max(1);
        Self { origin: lat.node(0), step: lat.h * stride as f64, nx: lat.nx.div_ceil(stride), ny: lat.ny.div_ceil(stride) }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let (i, j) = (idx % self.nx, idx / self.nx);
        [self.origin[0] + i as f64 * self.step, self.origin[1] + j as f64 * self.step]
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        let (i, j) = (idx % self.nx, idx / self.nx);
        i > 0 && j > 0 && i + 1 < self.nx && j + 1 < self.ny
    }
}

/// Probes at |λ| = 4C with phases 1, i, −1, −i.
pub fn default_probes(c: f64) -> Vec<C64> {
    [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)].iter().map(|p| 4.0 * c * p).collect()
}

/// μ'(λ_p) = e(λ_p) + Φ_K(λ_p) from an assembled system.
pub fn reconstruct_mu(sys: &RHSystem, jump: &JumpSolution, probe: usize) -> C64 {
    let m = sys.m;
    let kc: Vec<C64> = jump.k.iter().map(|z| z.conj()).collect();
    let row = |q: &[C64], v: &[C64]| matvec(&q[probe * m..(probe + 1) * m], m, v)[0];
    sys.e_probes[probe] + row(&sys.q1, &jump.k) + row(&sys.q2, &kc)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialEstimate {
    /// Re v̂ at every grid node; 0 where not available.
    pub v_hat: Vec<f64>,
    /// Im v̂, which should vanish.
    pub v_hat_imag: Vec<f64>,
    pub valid: Vec<bool>,
    /// Nodes skipped by the |μ'| guard.
    pub excluded: Vec<usize>,
    /// max over nodes and probes of |v̂_p − v̂|.
    pub probe_spread: f64,
}

/// v̂ at the interior nodes of `grid`, averaged over the probes.
/// `mu[p]` holds μ' for probe p at every node.
pub fn recover_potential(grid: &XGrid, mu: &[Vec<C64>], ks: &[ComplexMomentum]) -> PotentialEstimate {
    let n = grid.len();
    let d = grid.step;
    let mut v_hat = vec![0.0; n];
    let mut v_hat_imag = vec![0.0; n];
    let mut valid = vec![false; n];
    let mut excluded = Vec::new();
    let mut spread: f64 = 0.0;
    let i = C64::new(0.0, 1.0);
    for idx in 0..n {
        if !grid.is_interior(idx) {
            continue;
        }
        let (e, w, no, so) = (idx + 1, idx - 1, idx + grid.nx, idx - grid.nx);
        if mu.iter().any(|f| [idx, e, w, no, so].iter().any(|&k| f[k].norm() < MU_FLOOR)) {
            excluded.push(idx);
            continue;
        }
        let per: Vec<C64> = mu
            .iter()
            .zip(ks)
            .map(|(f, k)| {
                let lap = (f[e] + f[w] + f[no] + f[so] - 4.0 * f[idx]) / (d * d);
                let gx = (f[e] - f[w]) / (2.0 * d);
                let gy = (f[no] - f[so]) / (2.0 * d);
                (lap + 2.0 * i * (k.k1 * gx + k.k2 * gy)) / f[idx]
            })
            .collect();
        let avg = per.iter().sum::<C64>() / per.len() as f64;
        spread = per.iter().map(|z| (z - avg).norm()).fold(spread, f64::max);
        v_hat[idx] = avg.re;
        v_hat_imag[idx] = avg.im;
        valid[idx] = true;
    }
    PotentialEstimate { v_hat, v_hat_imag, valid, excluded, probe_spread: spread }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepOptions {
    /// GMRES tolerance for the jump equation.
    pub tol: f64,
    /// det A on every `det_stride`-th grid node in each direction; 0 skips it.
    pub det_stride: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { tol: 1e-10, det_stride: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionField {
    pub grid: XGrid,
    pub probes: Vec<C64>,
    /// μ'[p][node].
    pub mu_probes: Vec<Vec<C64>>,
    pub estimate: PotentialEstimate,
    /// Nodes where the jump solve failed; μ' there is the mean of the
    /// solved neighbours.
    pub flagged: Vec<usize>,
    pub det_nodes: Vec<usize>,
    pub det_values: Vec<FredholmDet>,
    /// Relative residual of the jump solve per node, NaN where flagged.
    pub residuals: Vec<f64>,
    pub max_iterations: usize,
    pub max_residual: f64,
    pub r0: f64,
}

pub fn reconstruct_field(setup: &RhSetup, grid: XGrid, opts: SweepOptions) -> Result<ReconstructionField, RhError> {
    let results: Vec<Result<_, RhError>> = (0..grid.len()).into_par_iter().map(|idx| solve_point(setup, grid.point(idx), opts.tol)).collect();
    let np = setup.ctx.probes.len();
    let mut mu = vec![vec![C64::new(0.0, 0.0); grid.len()]; np];
    let mut flagged = Vec::new();
    let mut residuals = vec![f64::NAN; grid.len()];
    let (mut max_it, mut max_res, mut r0) = (0, 0.0f64, 0.0);
    for (idx, r) in results.into_iter().enumerate() {
        match r {
            Ok(p) => {
                for (q, v) in p.mu_probes.iter().enumerate() {
                    mu[q][idx] = *v;
                }
                max_it = max_it.max(p.iterations);
                max_res = max_res.max(p.residual);
                residuals[idx] = p.residual;
                r0 = p.r0;
            }
            Err(RhError::Singular { .. }) | Err(RhError::NotConverged { .. }) => flagged.push(idx),
            Err(e) => return Err(e),
        }
    }
    if flagged.len() == grid.len() {
        return Err(RhError::Singular { x: grid.point(0), ratio: 0.0 });
    }
    for &idx in &flagged {
        let (i, j) = ((idx % grid.nx) as i64, (idx / grid.nx) as i64);
        let nb: Vec<usize> = [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .map(|(a, b)| (i + a, j + b))
            .filter(|(a, b)| *a >= 0 && *b >= 0 && (*a as usize) < grid.nx && (*b as usize) < grid.ny)
            .map(|(a, b)| b as usize * grid.nx + a as usize)
            .filter(|k| !flagged.contains(k))
            .collect();
        for f in mu.iter_mut() {
            f[idx] = if nb.is_empty() { C64::new(1.0, 0.0) } else { nb.iter().map(|&k| f[k]).sum::<C64>() / nb.len() as f64 };
        }
    }
    let estimate = recover_potential(&grid, &mu, &setup.probe_ks);
    let det_nodes: Vec<usize> = if opts.det_stride == 0 {
        Vec::new()
    } else {
        (0..grid.len()).filter(|k| (k % grid.nx) % opts.det_stride == 0 && (k / grid.nx) % opts.det_stride == 0).collect()
    };
    let det_values = det_nodes
        .par_iter()
        .map(|&k| assemble_system(setup, grid.point(k)).map(|s| fredholm_det(&s)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReconstructionField {
        grid,
        probes: setup.ctx.probes.clone(),
        mu_probes: mu,
        estimate,
        flagged,
        det_nodes,
        det_values,
        residuals,
        max_iterations: max_it,
        max_residual: max_res,
        r0,
    })
}

impl ReconstructionField {
    /// ‖v̂ − v‖/‖v‖ over the valid nodes, v given at the same nodes.
    pub fn relative_l2_error(&self, v: &[f64]) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (k, ok) in self.estimate.valid.iter().enumerate() {
            if *ok {
                num += (self.estimate.v_hat[k] - v[k]).powi(2);
                den += v[k] * v[k];
            }
        }
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }

    pub fn max_imag(&self) -> f64 {
        self.estimate.v_hat_imag.iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_potential_is_recovered_from_a_plane_wave() {
        // ψ = e^{iq·x} with q = k·√((E − V₀)/E) solves (Δ + E − V₀)ψ = 0
        let e = 25.0;
        let v0 = 0.3;
        let k = spectral_domain::lambda_to_k(
            spectral_domain::SpectralPoint::new(C64::new(2.0, 1.0)).unwrap(),
            spectral_domain::Energy::new(e).unwrap(),
        );
        let s = ((e - v0) / e as f64).sqrt();
        let grid = XGrid { origin: [-0.5, -0.5], step: 0.01, nx: 11, ny: 11 };
        let mu: Vec<C64> = grid
            .points()
            .iter()
            .map(|&x| (C64::new(0.0, 1.0) * (s - 1.0) * k.dot(x)).exp())
            .collect();
        let est = recover_potential(&grid, &[mu], &[k]);
        for idx in 0..grid.len() {
            assert_eq!(est.valid[idx], grid.is_interior(idx));
            if est.valid[idx] {
                assert!((est.v_hat[idx] - v0).abs() < 1e-3, "{}", est.v_hat[idx]);
                assert!(est.v_hat_imag[idx].abs() < 1e-3);
            }
        }
    }

    #[test]
    fn unit_mu_gives_zero_potential() {
        let grid = XGrid { origin: [0.0, 0.0], step: 0.1, nx: 5, ny: 4 };
        let k = ComplexMomentum { k1: C64::new(5.0, 0.0), k2: C64::new(0.0, 0.0) };
        let est = recover_potential(&grid, &vec![vec![C64::new(1.0, 0.0); 20]; 2], &[k, k]);
        assert!(est.v_hat.iter().chain(&est.v_hat_imag).all(|v| *v == 0.0));
        assert_eq!(est.valid.iter().filter(|v| **v).count(), 3 * 2);
    }

    #[test]
    fn vanishing_mu_is_excluded() {
        let grid = XGrid { origin: [0.0, 0.0], step: 0.1, nx: 4, ny: 4 };
        let k = ComplexMomentum { k1: C64::new(5.0, 0.0), k2: C64::new(0.0, 0.0) };
        let mut mu = vec![C64::new(1.0, 0.0); 16];
        mu[5] = C64::new(0.0, 0.0);
        let est = recover_potential(&grid, &[mu], &[k]);
        assert!(est.excluded.contains(&5) && est.excluded.contains(&6));
        assert!(!est.valid[5]);
    }

    #[test]
    fn lattice_subgrid_reuses_lattice_nodes() {
        let lat = Lattice { nx: 8, ny: 6, h: 0.25, origin: [-1.0, -0.75] };
        let g = XGrid::from_lattice(&lat, 2);
        assert_eq!((g.nx, g.ny), (4, 3));
        assert_eq!(g.point(g.nx + 1), lat.node(2 * lat.nx + 2));
    }
}
