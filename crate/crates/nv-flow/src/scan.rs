//! Tabulation of det A(x,s,t) and its near-zero set.
//!
//! For every s the forward data of s·v are computed once; the (s,t) slices
//! are then independent. A cell is flagged when |det A| < threshold.
//! Flagged cells are grouped into 4-connected regions in x, and every pair
//! of x-neighbours across which Re det A or Im det A changes sign is
//! reported: such a pair encloses a zero of that component.

use forward_scattering::{build_dataset, DatasetSpec, ScatteringDataset};
use potential_lab::PotentialFamily;
use rayon::prelude::*;
use rh_reconstruct::{assemble_system, default_probes, fredholm_det, RhSetup, XGrid};
use serde::{Deserialize, Serialize};

use crate::evolve::evolve_data_capped;
use crate::{NvError, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub threshold: f64,
    /// Cap on the h-phase exponent.
    pub phase_cap: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { threshold: 1e-3, phase_cap: crate::DEFAULT_PHASE_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Re,
    Im,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignChange {
    pub a: usize,
    pub b: usize,
    pub part: Part,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedRegion {
    /// x indices of the region.
    pub cells: Vec<usize>,
    /// Sign changes with at least one end in the region.
    pub certificates: Vec<SignChange>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceReport {
    pub s: f64,
    pub t: f64,
    /// det A at every x of the grid; `None` where the cell failed.
    pub det: Vec<Option<C64>>,
    pub errors: Vec<(usize, String)>,
    pub flagged: Vec<usize>,
    pub regions: Vec<FlaggedRegion>,
    pub sign_changes: Vec<SignChange>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZeroSetReport {
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub x_grid: XGrid,
    pub options: ScanOptions,
    /// Row-major over (s, t).
    pub slices: Vec<SliceReport>,
    /// Errors that voided a whole (s, t) slice.
    pub slice_errors: Vec<(usize, usize, String)>,
    pub flagged_fraction: f64,
    /// The flagged sets at 0.9 and 1.1 times the threshold coincide.
    pub threshold_stable: bool,
}

impl ZeroSetReport {
    pub fn slice(&self, is: usize, it: usize) -> &SliceReport {
        &self.slices[is * self.t_grid.len() + it]
    }

    pub fn flagged_cells(&self) -> usize {
        self.slices.iter().map(|s| s.flagged.len()).sum()
    }
}

fn flagged_at(det: &[Option<C64>], threshold: f64) -> Vec<usize> {
    det.iter().enumerate().filter(|(_, d)| d.is_some_and(|d| d.norm() < threshold)).map(|(i, _)| i).collect()
}

fn neighbours(grid: &XGrid, idx: usize) -> impl Iterator<Item = usize> + '_ {
    let (ix, iy) = (idx % grid.nx, idx / grid.nx);
    [(ix > 0).then(|| idx - 1), (ix + 1 < grid.nx).then(|| idx + 1), (iy > 0).then(|| idx - grid.nx), (iy + 1 < grid.ny).then(|| idx + grid.nx)]
        .into_iter()
        .flatten()
}

pub fn sign_changes(grid: &XGrid, det: &[Option<C64>]) -> Vec<SignChange> {
    let mut out = Vec::new();
    for a in 0..grid.len() {
        for b in neighbours(grid, a).filter(|&b| b > a) {
            let (Some(da), Some(db)) = (det[a], det[b]) else { continue };
            if da.re * db.re < 0.0 {
                out.push(SignChange { a, b, part: Part::Re });
            }
            if da.im * db.im < 0.0 {
                out.push(SignChange { a, b, part: Part::Im });
            }
        }
    }
    out
}

pub fn regions(grid: &XGrid, flagged: &[usize], changes: &[SignChange]) -> Vec<FlaggedRegion> {
    let mut mark = vec![false; grid.len()];
    flagged.iter().for_each(|&i| mark[i] = true);
    let mut seen = vec![false; grid.len()];
    let mut out = Vec::new();
    for &start in flagged {
        if seen[start] {
            continue;
        }
        let mut cells = vec![];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(c) = stack.pop() {
            cells.push(c);
            for n in neighbours(grid, c) {
                if mark[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        cells.sort_unstable();
        let certificates = changes.iter().filter(|c| cells.binary_search(&c.a).is_ok() || cells.binary_search(&c.b).is_ok()).cloned().collect();
        out.push(FlaggedRegion { cells, certificates });
    }
    out
}

/// det A over the x-grid for one dataset; failures are kept per cell.
pub fn det_field(ds: &ScatteringDataset, grid: &XGrid) -> Result<(Vec<Option<C64>>, Vec<(usize, String)>), NvError> {
    let setup = RhSetup::new(ds, default_probes(ds.contour.radius()))?;
    let results: Vec<_> = grid.points().par_iter().map(|&x| assemble_system(&setup, x).map(|sys| fredholm_det(&sys).value)).collect();
    let mut det = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(d) => det.push(Some(d)),
            Err(e) => {
                det.push(None);
                errors.push((i, e.to_string()));
            }
        }
    }
    Ok((det, errors))
}

fn slice(ds: &ScatteringDataset, s: f64, t: f64, grid: &XGrid, opts: &ScanOptions) -> Result<SliceReport, NvError> {
    let ev = evolve_data_capped(ds, t, opts.phase_cap)?;
    let (det, errors) = det_field(&ev.data, grid)?;
    let flagged = flagged_at(&det, opts.threshold);
    let sign_changes = sign_changes(grid, &det);
    let regions = regions(grid, &flagged, &sign_changes);
    Ok(SliceReport { s, t, det, errors, flagged, regions, sign_changes })
}

/// Scan with forward data already computed, one dataset per s.
pub fn scan_datasets(datasets: &[(f64, ScatteringDataset)], t_grid: &[f64], grid: XGrid, opts: ScanOptions) -> ZeroSetReport {
    let jobs: Vec<(usize, usize)> = (0..datasets.len()).flat_map(|is| (0..t_grid.len()).map(move |it| (is, it))).collect();
    let results: Vec<_> = jobs.par_iter().map(|&(is, it)| slice(&datasets[is].1, datasets[is].0, t_grid[it], &grid, &opts)).collect();
    let mut slices = Vec::with_capacity(jobs.len());
    let mut slice_errors = Vec::new();
    for (&(is, it), r) in jobs.iter().zip(results) {
        match r {
            Ok(s) => slices.push(s),
            Err(e) => {
                slice_errors.push((is, it, e.to_string()));
                let n = grid.len();
                slices.push(SliceReport { s: datasets[is].0, t: t_grid[it], det: vec![None; n], errors: vec![], flagged: vec![], regions: vec![], sign_changes: vec![] });
            }
        }
    }
    let total: usize = slices.iter().map(|s| s.det.iter().filter(|d| d.is_some()).count()).sum();
    let flagged: usize = slices.iter().map(|s| s.flagged.len()).sum();
    let threshold_stable = slices.iter().all(|s| flagged_at(&s.det, 0.9 * opts.threshold) == flagged_at(&s.det, 1.1 * opts.threshold));
    ZeroSetReport {
        s_grid: datasets.iter().map(|d| d.0).collect(),
        t_grid: t_grid.to_vec(),
        x_grid: grid,
        options: opts,
        slices,
        slice_errors,
        flagged_fraction: if total == 0 { 0.0 } else { flagged as f64 / total as f64 },
        threshold_stable,
    }
}

/// Full scan: forward data for every s·v, then all (s, t) slices.
pub fn blowup_scan(family: &PotentialFamily, spec: DatasetSpec, s_grid: &[f64], t_grid: &[f64], grid: XGrid, opts: ScanOptions) -> Result<ZeroSetReport, NvError> {
    let datasets = s_grid
        .iter()
        .map(|&s| Ok((s, build_dataset(&family.scale(s)?, spec)?)))
        .collect::<Result<Vec<_>, NvError>>()?;
    Ok(scan_datasets(&datasets, t_grid, grid, opts))
}
