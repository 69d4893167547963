//! Tabulation of f, h, b and u, and their on-disk form.
//!
//! Faddeev solves are only done for λ outside the unit circle. The inner
//! circle follows from ψ(x,k(−1/λ̄)) = conj ψ(x,k(λ)): μ at the mirror node
//! is conj μ, hence b(−1/λ̄) = conj b(λ).

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use green_kernels::green_faddeev_g_ray;
use potential_lab::PotentialGrid;
use rayon::prelude::*;
use scatter_numerics::gmres::GmresOptions;
use scatter_numerics::tables::{file_sha256, read_c64, write_c64};
use serde::{Deserialize, Serialize};
use spectral_domain::{build_contour, lambda_to_k, ComplexMomentum, ContourSpec, Energy, ExteriorGrid, ExteriorGridSpec, SpectralContour, SpectralPoint};

use crate::amplitude::scattering_amplitude_f;
use crate::nystrom::{solve_faddeev_with_g, ClassicalSolver, Lattice, NearField, WaveField};
use crate::{ForwardError, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub contour: ContourSpec,
    pub exterior: ExteriorGridSpec,
    /// Number of equispaced directions for f(k,l); 0 skips f.
    pub f_angles: usize,
    /// Largest admissible |Im(k(λ) − k(σ))·y| in h.
    pub exponent_cap: f64,
    /// Keep μ and ψ⁺ on the lattice for every contour node.
    pub keep_fields: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BuildReport {
    pub faddeev_solves: usize,
    pub classical_solves: usize,
    pub max_residual: f64,
    pub max_cond: f64,
    /// λ values where the condition estimate flagged a (near) exceptional point.
    pub flagged: Vec<[f64; 2]>,
}

#[derive(Debug, Clone)]
pub struct ScatteringDataset {
    pub spec: DatasetSpec,
    pub lattice: Lattice,
    pub contour: SpectralContour,
    pub exterior: ExteriorGrid,
    /// h(λ_i, ς_j), row-major over contour nodes.
    pub h: Vec<C64>,
    /// b at contour nodes.
    pub b_contour: Vec<C64>,
    /// b and u on the exterior grid.
    pub b: Vec<C64>,
    pub u: Vec<C64>,
    pub f_angles: Vec<f64>,
    /// f(k_a, l_b), row-major, k_a = √E(cos θ_a, sin θ_a).
    pub f: Vec<C64>,
    /// μ at contour nodes (lattice order), if kept.
    pub mu_contour: Option<Vec<Vec<C64>>>,
    /// ψ⁺ at contour nodes, if kept.
    pub psi_plus_contour: Option<Vec<Vec<C64>>>,
    pub report: BuildReport,
}

impl ScatteringDataset {
    pub fn energy(&self) -> Energy {
        self.spec.contour.energy
    }

    pub fn h_at(&self, i: usize, j: usize) -> C64 {
        self.h[i * self.contour.len() + j]
    }
}

/// One direction: which contour node (if any) and which exterior column.
struct Ray {
    phi: f64,
    contour_node: Option<usize>,
    ext_col: Option<usize>,
}

fn rays(contour: &SpectralContour, ext: &ExteriorGrid) -> Vec<Ray> {
    let n = contour.per_circle();
    let nt = ext.n_theta();
    let mut map: BTreeMap<(usize, usize), Ray> = BTreeMap::new();
    // key: angle as a reduced fraction j/m
    fn key(j: usize, m: usize) -> (usize, usize) {
        fn gcd(a: usize, b: usize) -> usize {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        let g = gcd(j, m).max(1);
        (j / g, m / g)
    }
    for j in 0..n {
        map.entry(key(j, n)).or_insert(Ray { phi: TAU * j as f64 / n as f64, contour_node: None, ext_col: None }).contour_node = Some(j);
    }
    for j in 0..nt {
        map.entry(key(j, nt)).or_insert(Ray { phi: TAU * j as f64 / nt as f64, contour_node: None, ext_col: None }).ext_col = Some(j);
    }
    map.into_values().collect()
}

struct RayResult {
    contour: Option<(usize, WaveField)>,
    ext: Vec<(usize, WaveField)>,
}

fn solve_ray(v: &PotentialGrid, ray: &Ray, contour: &SpectralContour, ext: &ExteriorGrid, near: &NearField, opts: &GmresOptions) -> Result<RayResult, ForwardError> {
    let e = contour.spec.energy;
    let lat = Lattice::of(v);
    let mut taus = Vec::new();
    if ray.contour_node.is_some() {
        taus.push(contour.radius());
    }
    if ray.ext_col.is_some() {
        taus.extend_from_slice(&ext.radii[..ext.n_rings()]);
    }
    let offsets = lat.offsets();
    let m = taus.len();
    let table: Vec<Vec<C64>> = if v.is_zero() {
        vec![vec![C64::new(0.0, 0.0); m]; offsets.len()]
    } else {
        offsets
            .iter()
            .map(|&(di, dj)| green_faddeev_g_ray(lat.offset(di, dj), ray.phi, true, &taus, e))
            .collect::<Result<_, _>>()?
    };
    let mut out = RayResult { contour: None, ext: Vec::new() };
    for (t, tau) in taus.iter().enumerate() {
        let lambda = SpectralPoint::new(C64::from_polar(*tau, ray.phi)).expect("nonzero");
        let g: Vec<C64> = table.iter().map(|row| row[t]).collect();
        let field = solve_faddeev_with_g(v, lambda, e, &g, near, opts)?;
        match (ray.contour_node, ray.ext_col) {
            (Some(j), _) if t == 0 => out.contour = Some((j, field)),
            (c, Some(col)) => {
                let ring = if c.is_some() { t - 1 } else { t };
                out.ext.push((ext.index(ring, col), field));
            }
            _ => unreachable!("every radius belongs to the contour or the grid"),
        }
    }
    Ok(out)
}

fn conj_field(f: &WaveField, lambda: C64) -> WaveField {
    WaveField {
        kind: f.kind,
        k: ComplexMomentum { k1: -f.k.k1.conj(), k2: -f.k.k2.conj() },
        lambda: Some(lambda),
        values: f.values.iter().map(|z| z.conj()).collect(),
        density: f.density.iter().map(|z| z.conj()).collect(),
        residual: f.residual,
        iterations: f.iterations,
        cond_estimate: f.cond_estimate,
        flagged: f.flagged,
    }
}

/// (2π)^{-2}h²Σ_y e^{i(k_i−k_j)·y}w_i(y) for all contour pairs.
fn h_matrix(lat: &Lattice, fields: &[WaveField], ks: &[ComplexMomentum], cap: f64) -> Result<Vec<C64>, ForwardError> {
    let m = fields.len();
    let support: Vec<usize> = (0..lat.len()).filter(|&n| fields.iter().any(|f| f.density[n].norm() != 0.0)).collect();
    let i = C64::new(0.0, 1.0);
    let pos: Vec<Vec<C64>> = ks.iter().map(|k| support.iter().map(|&n| (i * k.dot(lat.node(n))).exp()).collect()).collect();
    let neg: Vec<Vec<C64>> = pos.iter().map(|row| row.iter().map(|z| 1.0 / z).collect()).collect();
    let mut worst: f64 = 0.0;
    for a in ks {
        for b in ks {
            let d = [a.k1.im - b.k1.im, a.k2.im - b.k2.im];
            for &n in &support {
                let y = lat.node(n);
                worst = worst.max((d[0] * y[0] + d[1] * y[1]).abs());
            }
        }
    }
    if worst > cap {
        return Err(ForwardError::ExponentCap { exponent: worst, cap });
    }
    let pre = lat.h * lat.h / (TAU * TAU);
    let mut h = vec![C64::new(0.0, 0.0); m * m];
    for r in 0..m {
        let wr: Vec<C64> = support.iter().zip(&pos[r]).map(|(&n, p)| fields[r].density[n] * p).collect();
        for c in 0..m {
            let s: C64 = wr.iter().zip(&neg[c]).map(|(a, b)| a * b).sum();
            h[r * m + c] = s * pre;
        }
    }
    Ok(h)
}

pub fn build_dataset(v: &PotentialGrid, spec: DatasetSpec) -> Result<ScatteringDataset, ForwardError> {
    let e = spec.contour.energy;
    let contour = build_contour(spec.contour);
    let ext = ExteriorGrid::new(spec.exterior).map_err(|e| ForwardError::Spectral(e.to_string()))?;
    if (spec.exterior.c - contour.radius()).abs() > 1e-12 * contour.radius() {
        return Err(ForwardError::Dataset(format!(
            "exterior grid starts at {} but the contour radius is {}",
            spec.exterior.c,
            contour.radius()
        )));
    }
    let lat = Lattice::of(v);
    let near = NearField::new(lat.h, e.sqrt());
    let opts = GmresOptions::default();
    let mut report = BuildReport::default();

    let results: Vec<RayResult> = rays(&contour, &ext)
        .par_iter()
        .map(|r| solve_ray(v, r, &contour, &ext, &near, &opts))
        .collect::<Result<_, _>>()?;

    let n = contour.per_circle();
    let mut outer: Vec<Option<WaveField>> = vec![None; n];
    let mut ext_fields: Vec<Option<WaveField>> = vec![None; ext.len()];
    for r in results {
        if let Some((j, f)) = r.contour {
            outer[j] = Some(f);
        }
        for (idx, f) in r.ext {
            ext_fields[idx] = Some(f);
        }
    }
    let mut fields: Vec<WaveField> = outer.into_iter().map(|f| f.expect("every outer node solved")).collect();
    for j in 0..n {
        let src = contour.mirror_index(n + j);
        fields.push(conj_field(&fields[src], contour.nodes[n + j].lambda));
    }
    for f in &fields[..n] {
        report.faddeev_solves += 1;
        report.max_residual = report.max_residual.max(f.residual);
        report.max_cond = report.max_cond.max(f.cond_estimate);
        if f.flagged {
            let l = f.lambda.unwrap_or_default();
            report.flagged.push([l.re, l.im]);
        }
    }

    let ks: Vec<ComplexMomentum> = contour.nodes.iter().map(|p| lambda_to_k(SpectralPoint::new(p.lambda).expect("nonzero"), e)).collect();
    let h = h_matrix(&lat, &fields, &ks, spec.exponent_cap)?;
    let b_contour: Vec<C64> = (0..contour.len()).map(|i| h[i * contour.len() + contour.mirror_index(i)]).collect();

    // b on the outer rings from the solved fields, inner rings by symmetry
    let mut b = vec![C64::new(0.0, 0.0); ext.len()];
    let half = ext.n_rings() * ext.n_theta();
    for idx in 0..half {
        let f = ext_fields[idx].as_ref().expect("every outer grid node solved");
        report.faddeev_solves += 1;
        report.max_residual = report.max_residual.max(f.residual);
        report.max_cond = report.max_cond.max(f.cond_estimate);
        if f.flagged {
            let l = ext.node(idx);
            report.flagged.push([l.re, l.im]);
        }
        b[idx] = crate::amplitude::faddeev_amplitude_b(&lat, f, e)?;
    }
    for idx in half..ext.len() {
        b[idx] = b[ext.mirror(idx)].conj();
    }
    let u: Vec<C64> = (0..ext.len()).map(|idx| b[idx] / ext.node(idx).conj()).collect();

    let classical = ClassicalSolver::new(v, e);
    let psi_plus = classical.solve_many(&ks)?;
    report.classical_solves += psi_plus.len();
    let f_angles: Vec<f64> = (0..spec.f_angles).map(|a| TAU * a as f64 / spec.f_angles as f64).collect();
    let dirs: Vec<[f64; 2]> = f_angles.iter().map(|t| [e.sqrt() * t.cos(), e.sqrt() * t.sin()]).collect();
    let mut f = Vec::with_capacity(dirs.len() * dirs.len());
    if !dirs.is_empty() {
        let kr: Vec<ComplexMomentum> = dirs.iter().map(|d| ComplexMomentum { k1: C64::new(d[0], 0.0), k2: C64::new(d[1], 0.0) }).collect();
        let psis = classical.solve_many(&kr)?;
        report.classical_solves += psis.len();
        for p in &psis {
            for l in &dirs {
                f.push(scattering_amplitude_f(&lat, p, *l)?);
            }
        }
    }
    for p in &psi_plus {
        report.max_residual = report.max_residual.max(p.residual);
    }

    let (mu_contour, psi_plus_contour) = if spec.keep_fields {
        (Some(fields.into_iter().map(|f| f.values).collect()), Some(psi_plus.into_iter().map(|f| f.values).collect()))
    } else {
        (None, None)
    };
    Ok(ScatteringDataset {
        spec,
        lattice: lat,
        contour,
        exterior: ext,
        h,
        b_contour,
        b,
        u,
        f_angles,
        f,
        mu_contour,
        psi_plus_contour,
        report,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableEntry {
    file: String,
    sha256: String,
    rows: usize,
    cols: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Manifest {
    energy: f64,
    rho: f64,
    contour_radius: f64,
    spec: DatasetSpec,
    lattice: Lattice,
    f_angles: Vec<f64>,
    report: BuildReport,
    tables: BTreeMap<String, TableEntry>,
}

/// Writes manifest.json plus h.bin, b.bin, u.bin, f.bin, b_contour.bin and
/// their sidecars. Returns the manifest checksum.
pub fn write_dataset(ds: &ScatteringDataset, dir: &Path) -> Result<String, ForwardError> {
    fs::create_dir_all(dir)?;
    let m = ds.contour.len();
    let nf = ds.f_angles.len();
    let mut tables = BTreeMap::new();
    let mut put = |name: &str, values: &[C64], rows: usize, cols: usize, layout: &str| -> Result<(), ForwardError> {
        let file = format!("{name}.bin");
        let meta = serde_json::json!({ "rows": rows, "cols": cols, "layout": layout, "dtype": "complex f64 pairs, little endian" });
        let sha = write_c64(&dir.join(&file), values, &meta)?;
        tables.insert(name.to_string(), TableEntry { file, sha256: sha, rows, cols });
        Ok(())
    };
    put("h", &ds.h, m, m, "row-major, rows = λ contour node, cols = ς contour node")?;
    put("b_contour", &ds.b_contour, m, 1, "contour node order")?;
    put("b", &ds.b, ds.exterior.ring_count(), ds.exterior.n_theta(), "row-major, rows = rings (outer outward, then inner inward), cols = angle")?;
    put("u", &ds.u, ds.exterior.ring_count(), ds.exterior.n_theta(), "same as b")?;
    put("f", &ds.f, nf, nf, "row-major, rows = incident direction, cols = outgoing direction")?;
    let manifest = Manifest {
        energy: ds.energy().value(),
        rho: ds.spec.contour.rho,
        contour_radius: ds.contour.radius(),
        spec: ds.spec,
        lattice: ds.lattice,
        f_angles: ds.f_angles.clone(),
        report: ds.report.clone(),
        tables,
    };
    let bytes = serde_json::to_vec_pretty(&manifest)?;
    fs::write(dir.join("manifest.json"), &bytes)?;
    Ok(scatter_numerics::tables::sha256_hex(&bytes))
}

/// Reads a dataset written by [`write_dataset`], verifying every checksum.
pub fn read_dataset(dir: &Path) -> Result<ScatteringDataset, ForwardError> {
    let manifest: Manifest = serde_json::from_slice(&fs::read(dir.join("manifest.json"))?)?;
    let load = |name: &str| -> Result<Vec<C64>, ForwardError> {
        let entry = manifest.tables.get(name).ok_or_else(|| ForwardError::Dataset(format!("manifest lists no table {name}")))?;
        let path = dir.join(&entry.file);
        let found = file_sha256(&path)?;
        if found != entry.sha256 {
            return Err(ForwardError::Checksum { file: entry.file.clone(), expected: entry.sha256.clone(), found });
        }
        let v = read_c64(&path)?;
        if v.len() != entry.rows * entry.cols {
            return Err(ForwardError::Dataset(format!("{} has {} entries, expected {}", entry.file, v.len(), entry.rows * entry.cols)));
        }
        Ok(v)
    };
    let contour = build_contour(manifest.spec.contour);
    let exterior = ExteriorGrid::new(manifest.spec.exterior).map_err(|e| ForwardError::Spectral(e.to_string()))?;
    Ok(ScatteringDataset {
        spec: manifest.spec,
        lattice: manifest.lattice,
        h: load("h")?,
        b_contour: load("b_contour")?,
        b: load("b")?,
        u: load("u")?,
        f: load("f")?,
        f_angles: manifest.f_angles,
        contour,
        exterior,
        mu_contour: None,
        psi_plus_contour: None,
        report: manifest.report,
    })
}

/// Dataset spec with the exterior grid anchored at the contour radius.
pub fn default_spec(e: Energy, rho: f64, nodes_per_circle: usize, n_rings: usize, n_theta: usize) -> Result<DatasetSpec, ForwardError> {
    let contour = ContourSpec::new(e, rho, nodes_per_circle).map_err(|e| ForwardError::Spectral(e.to_string()))?;
    Ok(DatasetSpec {
        contour,
        exterior: ExteriorGridSpec { c: contour.radius(), c_max_factor: 8.0, n_rings, n_theta },
        f_angles: 8,
        exponent_cap: 30.0,
        keep_fields: false,
    })
}
