//! The area Cauchy transform T[f](λ) = −(1/π)∫ f(η)/(η − λ) dA(η) for
//! densities that are constant on the cells of the exterior λ-grid.
//!
//! On grid nodes the operator is applied by ring-pair circular convolutions:
//! rotating cell (t', j') back to angle 0 gives
//! T[1_{t',j'}](λ_{t,j}) = e^{−iθ_{j'}}·m_{t,t'}(j − j'), with m tabulated once.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use spectral_domain::ExteriorGrid;

use crate::cell::cell_cauchy;
use crate::C64;

pub struct CauchyPlane {
    pub grid: ExteriorGrid,
    rings: usize,
    nt: usize,
    /// FFT of m_{t,t'}, index (t·rings + t')·nt + k, pre-scaled by 1/nt.
    khat: Vec<C64>,
    /// e^{−iθ_j}.
    unphase: Vec<C64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CauchyPlane {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CauchyPlane({} rings × {})", self.rings, self.nt)
    }
}

/// Dense rows T[1_c](λ_i) for a fixed set of off-grid targets.
#[derive(Debug, Clone)]
pub struct TargetRows {
    pub targets: Vec<C64>,
    pub cells: usize,
    pub data: Vec<C64>,
}

impl TargetRows {
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cells..(i + 1) * self.cells]
    }

    /// T[f] at every target.
    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        (0..self.targets.len()).map(|i| self.row(i).iter().zip(f).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

impl CauchyPlane {
    pub fn new(grid: ExteriorGrid) -> Self {
        let rings = grid.ring_count();
        let nt = grid.n_theta();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(nt);
        let inv = planner.plan_fft_inverse(nt);
        let scale = 1.0 / nt as f64;
        let pairs: Vec<(usize, usize)> = (0..rings).flat_map(|t| (0..rings).map(move |s| (t, s))).collect();
        let blocks: Vec<Vec<C64>> = pairs
            .par_iter()
            .map(|&(t, s)| {
                let cell = grid.cell(grid.index(s, 0));
                let mut m: Vec<C64> = (0..nt).map(|d| cell_cauchy(&cell, grid.node(grid.index(t, d))) * scale).collect();
                fwd.process(&mut m);
                m
            })
            .collect();
        let khat = blocks.concat();
        let unphase = (0..nt).map(|j| C64::from_polar(1.0, -grid.angle(j))).collect();
        Self { grid, rings, nt, khat, unphase, fwd, inv }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// out = T[f] at the grid nodes.
    pub fn apply(&self, f: &[C64], out: &mut [C64]) {
        let (r, nt) = (self.rings, self.nt);
        assert_eq!(f.len(), r * nt);
        let mut g: Vec<C64> = f.iter().enumerate().map(|(k, z)| z * self.unphase[k % nt]).collect();
        for ring in g.chunks_mut(nt) {
            self.fwd.process(ring);
        }
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (t, acc) in out.chunks_mut(nt).enumerate() {
            for s in 0..r {
                let k = &self.khat[(t * r + s) * nt..(t * r + s + 1) * nt];
                let src = &g[s * nt..(s + 1) * nt];
                for ((a, kk), x) in acc.iter_mut().zip(k).zip(src) {
                    *a += kk * x;
                }
            }
            self.inv.process(acc);
        }
    }

    /// Row T[1_c](λ) over all cells, for any λ ≠ 0.
    pub fn row(&self, lambda: C64) -> Vec<C64> {
        (0..self.len()).map(|c| cell_cauchy(&self.grid.cell(c), lambda)).collect()
    }

    pub fn rows(&self, targets: &[C64]) -> TargetRows {
        let data: Vec<Vec<C64>> = targets.par_iter().map(|&z| self.row(z)).collect();
        TargetRows { targets: targets.to_vec(), cells: self.len(), data: data.concat() }
    }
}
