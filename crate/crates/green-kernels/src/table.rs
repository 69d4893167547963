//! Dense g tables over (x-sample, contour-node) pairs.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use spectral_domain::{Energy, SpectralContour};

use crate::faddeev::green_faddeev_g;
use crate::{GreenError, C64};

#[derive(Debug, Clone)]
pub struct KernelTable {
    pub points: Vec<[f64; 2]>,
    pub lambdas: Vec<C64>,
    /// g(x_i, λ_j), row-major over (x-index, node-index).
    pub values: Vec<C64>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    layout: &'static str,
    rows: usize,
    cols: usize,
    energy: f64,
    points: &'a [[f64; 2]],
    lambdas: Vec<[f64; 2]>,
}

impl KernelTable {
    /// Built as a parallel map over rows; the finished table is read-only.
    pub fn build(points: &[[f64; 2]], contour: &SpectralContour) -> Result<Self, GreenError> {
        let e: Energy = contour.spec.energy;
        let lambdas = contour.lambdas();
        let rows: Result<Vec<Vec<C64>>, GreenError> = points
            .par_iter()
            .map(|&x| (0..lambdas.len()).map(|j| green_faddeev_g(x, contour.point(j), e)).collect())
            .collect();
        let values = rows?.concat();
        Ok(Self { points: points.to_vec(), lambdas, values })
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.lambdas.len() + j]
    }

    /// Writes `name.bin` (interleaved re/im f64) and `name.json`; returns the
    /// SHA-256 of the binary payload.
    pub fn dump(&self, dir: &Path, name: &str, energy: Energy) -> Result<String, GreenError> {
        let meta = Sidecar {
            layout: "row-major complex f64 pairs, rows = x samples, cols = contour nodes",
            rows: self.points.len(),
            cols: self.lambdas.len(),
            energy: energy.value(),
            points: &self.points,
            lambdas: self.lambdas.iter().map(|l| [l.re, l.im]).collect(),
        };
        scatter_numerics::tables::write_c64(&dir.join(name), &self.values, &meta).map_err(|e| GreenError::Table(e.to_string()))
    }
}
