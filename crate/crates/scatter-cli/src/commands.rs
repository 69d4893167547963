//! The subcommands. Each writes into its output directory and finishes with
//! a `run.json` manifest: command, code version, config snapshot and the
//! SHA-256 of every file written. No timestamps, so identical inputs give
//! identical manifests.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use forward_scattering::{build_dataset, read_dataset, write_dataset, ScatteringDataset};
use green_kernels::calibrate_c0;
use nv_flow::{nv_residual, scan_datasets, ScanOptions, SpectralPlane, ZeroSetReport};
use potential_lab::io::{read_grid, to_csv, write_grid};
use potential_lab::{PotentialFamily, PotentialGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rh_reconstruct::{default_probes, reconstruct_field, ReconstructionField, RhSetup, SweepOptions, XGrid};
use scatter_numerics::tables::{sha256_hex, write_c64, write_f64};
use serde::{Deserialize, Serialize};
use spectral_domain::{apriori_bounds, auto_rho, build_contour, ContourSpec};

use crate::config::RunConfig;
use crate::verify::{self, Check};
use crate::{CliError, C64};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub files: BTreeMap<String, String>,
}

fn finish(out: &Path, command: &str, cfg: &RunConfig, files: BTreeMap<String, String>) -> Result<String, CliError> {
    let m = RunManifest { command: command.into(), version: env!("CARGO_PKG_VERSION").into(), config: cfg.clone(), files };
    let bytes = serde_json::to_vec_pretty(&m)?;
    fs::write(out.join("run.json"), &bytes)?;
    Ok(sha256_hex(&bytes))
}

fn write_text(out: &Path, name: &str, text: &str, files: &mut BTreeMap<String, String>) -> Result<(), CliError> {
    fs::write(out.join(name), text)?;
    files.insert(name.into(), sha256_hex(text.as_bytes()));
    Ok(())
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T, files: &mut BTreeMap<String, String>) -> Result<(), CliError> {
    write_text(out, name, &serde_json::to_string_pretty(value)?, files)
}

fn probes(cfg: &RunConfig, ds: &ScatteringDataset) -> Vec<C64> {
    if cfg.probes.is_empty() {
        default_probes(ds.contour.radius())
    } else {
        cfg.probes.iter().map(|p| C64::new(p[0], p[1])).collect()
    }
}

/// The lattice values at the nodes of a strided sub-grid.
pub fn sub_sample(v: &PotentialGrid, grid: &XGrid, stride: usize) -> Vec<f64> {
    (0..grid.len()).map(|k| v.values[(k / grid.nx) * stride * v.nx + (k % grid.nx) * stride]).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForwardSummary {
    pub rho: f64,
    pub contour_radius: f64,
    pub manifest_sha256: String,
    pub run_sha256: String,
    pub faddeev_solves: usize,
    pub classical_solves: usize,
    pub max_residual: f64,
    pub flagged: Vec<[f64; 2]>,
}

pub fn cmd_forward(cfg: &RunConfig, out: &Path) -> Result<ForwardSummary, CliError> {
    fs::create_dir_all(out)?;
    let v = cfg.build_potential()?;
    let rho = cfg.resolve_rho(&v);
    let ds = build_dataset(&v, cfg.dataset_spec(rho)?)?;
    let mut files = BTreeMap::new();
    files.insert("manifest.json".into(), write_dataset(&ds, out)?);
    files.insert("potential.bin".into(), write_grid(&out.join("potential.bin"), &v)?);
    write_text(out, "potential.csv", &to_csv(&v), &mut files)?;
    let run_sha256 = finish(out, "forward", cfg, files.clone())?;
    Ok(ForwardSummary {
        rho,
        contour_radius: ds.contour.radius(),
        manifest_sha256: files["manifest.json"].clone(),
        run_sha256,
        faddeev_solves: ds.report.faddeev_solves,
        classical_solves: ds.report.classical_solves,
        max_residual: ds.report.max_residual,
        flagged: ds.report.flagged.clone(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetStats {
    pub samples: usize,
    pub min_abs: f64,
    pub max_abs: f64,
    pub max_dev_from_one: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructSummary {
    pub relative_l2_error: Option<f64>,
    pub max_imag: f64,
    pub v_sup: Option<f64>,
    pub det: DetStats,
    pub flagged_points: Vec<[f64; 2]>,
    pub excluded_points: usize,
    pub probe_spread: f64,
    pub max_iterations: usize,
    pub max_residual: f64,
}

pub fn summarize(field: &ReconstructionField, truth: Option<&[f64]>) -> ReconstructSummary {
    let abs: Vec<f64> = field.det_values.iter().map(|d| d.value.norm()).collect();
    ReconstructSummary {
        relative_l2_error: truth.map(|v| field.relative_l2_error(v)),
        max_imag: field.max_imag(),
        v_sup: truth.map(|v| v.iter().fold(0.0f64, |a, b| a.max(b.abs()))),
        det: DetStats {
            samples: abs.len(),
            min_abs: abs.iter().copied().fold(f64::INFINITY, f64::min),
            max_abs: abs.iter().copied().fold(0.0, f64::max),
            max_dev_from_one: field.det_values.iter().map(|d| (d.value - 1.0).norm()).fold(0.0, f64::max),
        },
        flagged_points: field.flagged.iter().map(|&k| field.grid.point(k)).collect(),
        excluded_points: field.estimate.excluded.len(),
        probe_spread: field.estimate.probe_spread,
        max_iterations: field.max_iterations,
        max_residual: field.max_residual,
    }
}

pub fn cmd_reconstruct(cfg: &RunConfig, dataset: &Path, out: &Path) -> Result<ReconstructSummary, CliError> {
    let ds = read_dataset(dataset)?;
    fs::create_dir_all(out)?;
    let setup = RhSetup::new(&ds, probes(cfg, &ds))?;
    let grid = XGrid::from_lattice(&ds.lattice, cfg.stride);
    let field = reconstruct_field(&setup, grid, SweepOptions { tol: cfg.tolerances.jump, det_stride: cfg.det_stride })?;
    let truth_path = dataset.join("potential.bin");
    let truth = if truth_path.exists() { Some(sub_sample(&read_grid(&truth_path)?, &grid, cfg.stride)) } else { None };

    let mut files = BTreeMap::new();
    let side = serde_json::json!({ "nx": grid.nx, "ny": grid.ny, "origin": grid.origin, "step": grid.step, "layout": "row-major, x fastest" });
    files.insert("v_hat.bin".into(), write_f64(&out.join("v_hat.bin"), &field.estimate.v_hat, &side)?);
    files.insert("v_hat_imag.bin".into(), write_f64(&out.join("v_hat_imag.bin"), &field.estimate.v_hat_imag, &side)?);
    let res_side = serde_json::json!({ "nx": grid.nx, "ny": grid.ny, "origin": grid.origin, "step": grid.step, "meaning": "relative residual of the jump solve, NaN where flagged" });
    files.insert("residuals.bin".into(), write_f64(&out.join("residuals.bin"), &field.residuals, &res_side)?);
    let dets: Vec<C64> = field.det_values.iter().map(|d| d.value).collect();
    let det_side = serde_json::json!({ "points": field.det_nodes.iter().map(|&k| grid.point(k)).collect::<Vec<_>>(), "dtype": "complex f64 pairs" });
    files.insert("detA.bin".into(), write_c64(&out.join("detA.bin"), &dets, &det_side)?);

    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["x", "y", "v_hat", "v_hat_imag", "valid", "v"]).map_err(|e| CliError::Io(e.to_string()))?;
    for k in 0..grid.len() {
        let p = grid.point(k);
        let t = truth.as_ref().map(|t| t[k].to_string()).unwrap_or_default();
        w.write_record([p[0].to_string(), p[1].to_string(), field.estimate.v_hat[k].to_string(), field.estimate.v_hat_imag[k].to_string(), field.estimate.valid[k].to_string(), t])
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?).expect("csv is utf-8");
    write_text(out, "v_hat.csv", &text, &mut files)?;

    let summary = summarize(&field, truth.as_deref());
    write_json(out, "summary.json", &summary, &mut files)?;
    finish(out, "reconstruct", cfg, files)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub fn cmd_verify(cfg: &RunConfig, misorient: bool, out: &Path) -> Result<VerifyReport, CliError> {
    fs::create_dir_all(out)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let e = cfg.energy();
    let v = cfg.build_potential()?;
    let rho = cfg.resolve_rho(&v);
    let mut spec = cfg.dataset_spec(rho)?;
    spec.keep_fields = true;
    spec.f_angles = 0;
    let ds = build_dataset(&v, spec)?;
    let tol = &cfg.tolerances;
    let (_, max) = cfg.potential.domain.bounding_box();
    let half = max[0].abs().max(max[1].abs());
    let mut checks = Vec::new();

    let g = verify::FdPair::worst((0..4).flat_map(|_| {
        let (x, l) = (verify::sample_x(&mut rng, half), verify::sample_lambda(&mut rng));
        verify::green_dbar_fd(e, x, l)
    }));
    checks.push(g.check("dbar of the Faddeev Green function", tol.dbar));

    let lambdas = [C64::from_polar(rng.gen_range(1.1..3.0), rng.gen_range(0.0..6.28)), C64::from_polar(rng.gen_range(0.3..0.9), rng.gen_range(0.0..6.28))];
    let mu = verify::FdPair::worst(lambdas.iter().map(|&l| verify::mu_dbar_fd(&v, e, l)));
    checks.push(mu.check("dbar of the Faddeev solution", tol.dbar));

    let nodes: Vec<usize> = (0..4).map(|_| rng.gen_range(0..ds.exterior.len())).collect();
    let ed = verify::e_dbar_fd(&ds, verify::sample_x(&mut rng, half), &nodes);
    checks.push(ed.check("dbar of e", tol.dbar));

    let xs: Vec<usize> = (0..10).map(|_| rng.gen_range(0..ds.lattice.len())).collect();
    let lr = verify::lemma_residual(&ds, &xs, misorient);
    checks.push(Check::below("psi - psi+ against the W h integral", lr, tol.lemma, if misorient { "contour orientation reversed".into() } else { String::new() }));

    let gx: Vec<[f64; 2]> = (0..4).map(|_| verify::sample_x(&mut rng, half)).collect();
    let gt = verify::green_two_path(e, rho, 128, &gx);
    checks.push(Check::below("G - G+ by contour integral vs direct", gt, tol.green_two_path, "128 nodes per circle".into()));

    let (bad, margin) = verify::branch_check(e, rho, 128);
    checks.push(Check::below("branch bound |Im ln w| < pi", bad as f64, 0.5, format!("violations over all node pairs at 128 nodes, margin {margin:.3e}")));

    let dx: Vec<[f64; 2]> = (0..4).map(|_| verify::sample_x(&mut rng, half)).collect();
    let dz = verify::zero_scale_det(&ds, &dx)?;
    checks.push(Check::below("det A = 1 at zero scale", dz, 1e-12, String::new()));

    let interior: Vec<usize> = (0..3)
        .map(|_| {
            let (i, j) = (rng.gen_range(ds.lattice.nx / 4..3 * ds.lattice.nx / 4), rng.gen_range(ds.lattice.ny / 4..3 * ds.lattice.ny / 4));
            j * ds.lattice.nx + i
        })
        .collect();
    let jo = verify::jump_oracle(&ds, &interior)?;
    checks.push(Check::below("jump against forward mu+ - mu", jo.forward, tol.jump_oracle, "relative L2".into()));
    checks.push(Check::below("direct solve against successive approximations", jo.neumann, tol.neumann, "10 steps".into()));

    let passed = checks.iter().all(|c| c.pass);
    let report = VerifyReport { checks, passed };
    let mut files = BTreeMap::new();
    write_json(out, "verify.json", &report, &mut files)?;
    let text: String = report.checks.iter().map(|c| c.line() + "\n").collect();
    write_text(out, "verify.txt", &text, &mut files)?;
    finish(out, "verify", cfg, files)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub s: f64,
    pub t: f64,
    pub relative: f64,
    pub dv_dt_norm: f64,
    pub rhs_norm: f64,
}

/// Candidate v_s(·,t) from the evolved data.
fn candidate(cfg: &RunConfig, ds: &ScatteringDataset, t: f64) -> Result<ReconstructionField, CliError> {
    let ev = nv_flow::evolve_data_capped(ds, t, cfg.nv.phase_cap)?;
    let setup = RhSetup::new(&ev.data, probes(cfg, ds))?;
    Ok(reconstruct_field(&setup, XGrid::from_lattice(&ds.lattice, cfg.stride), SweepOptions { tol: cfg.tolerances.jump, det_stride: 0 })?)
}

pub fn cmd_nv(cfg: &RunConfig, dataset: &Path, out: &Path) -> Result<ZeroSetReport, CliError> {
    let ds = read_dataset(dataset)?;
    fs::create_dir_all(out)?;
    let datasets: Vec<(f64, ScatteringDataset)> = if cfg.nv.s_grid.is_empty() {
        vec![(1.0, ds.clone())]
    } else {
        let fam = PotentialFamily { base: cfg.build_potential()?, s1: f64::INFINITY };
        cfg.nv.s_grid.iter().map(|&s| Ok((s, build_dataset(&fam.scale(s)?, ds.spec)?))).collect::<Result<_, CliError>>()?
    };
    let grid = XGrid::from_lattice(&ds.lattice, cfg.nv.x_stride);
    let report = scan_datasets(&datasets, &cfg.nv.t_grid, grid, ScanOptions { threshold: cfg.nv.threshold, phase_cap: cfg.nv.phase_cap });

    let mut files = BTreeMap::new();
    for (n, sl) in report.slices.iter().enumerate() {
        let (is, it) = (n / cfg.nv.t_grid.len(), n % cfg.nv.t_grid.len());
        let vals: Vec<C64> = sl.det.iter().map(|d| d.unwrap_or(C64::new(f64::NAN, f64::NAN))).collect();
        let name = format!("det_s{is}_t{it}.bin");
        let side = serde_json::json!({ "s": sl.s, "t": sl.t, "nx": grid.nx, "ny": grid.ny, "origin": grid.origin, "step": grid.step, "dtype": "complex f64 pairs, NaN where the cell failed" });
        files.insert(name.clone(), write_c64(&out.join(&name), &vals, &side)?);
    }
    write_json(out, "zero_set.json", &report, &mut files)?;

    if cfg.nv.residual_dt > 0.0 {
        let dt = cfg.nv.residual_dt;
        let mut entries = Vec::new();
        for (s, d) in &datasets {
            for &t in &cfg.nv.t_grid {
                let f: Vec<ReconstructionField> = [t - dt, t, t + dt].iter().map(|&tt| candidate(cfg, d, tt)).collect::<Result<_, _>>()?;
                let g = f[1].grid;
                let plane = SpectralPlane::new(g.nx, g.ny, g.step);
                let r = nv_residual(&plane, &f[0].estimate.v_hat, &f[1].estimate.v_hat, &f[2].estimate.v_hat, dt, ds.energy().value());
                entries.push(ResidualEntry { s: *s, t, relative: r.relative, dv_dt_norm: r.dv_dt_norm, rhs_norm: r.rhs_norm });
            }
        }
        let doc = serde_json::json!({ "label": "candidate NV solution, residual diagnostic only", "entries": entries });
        write_json(out, "nv_residual.json", &doc, &mut files)?;
    }
    finish(out, "nv", cfg, files)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct C0Calibration {
    pub c0: f64,
    pub attained_at: f64,
    pub limit: f64,
    pub q: f64,
    pub rho1: f64,
    pub rho_auto: f64,
}

pub fn cmd_calibrate_c0(cfg: &RunConfig, out: &Path) -> Result<C0Calibration, CliError> {
    fs::create_dir_all(out)?;
    let (c0, at) = calibrate_c0(1e4, 20_000);
    let v = cfg.build_potential()?;
    let q = cfg.q.unwrap_or_else(|| v.sup_norm());
    let b = apriori_bounds(q, &cfg.potential.domain, cfg.energy(), 1.0, c0);
    let cal = C0Calibration { c0, attained_at: at, limit: green_kernels::classical::c0_limit(), q, rho1: b.rho1, rho_auto: auto_rho(b.rho1, cfg.energy(), cfg.rho_floor_fraction) };
    let mut files = BTreeMap::new();
    write_json(out, "c0.json", &cal, &mut files)?;
    finish(out, "calibrate-c0", cfg, files)?;
    Ok(cal)
}

pub fn cmd_contour_dump(cfg: &RunConfig, out: &Path) -> Result<serde_json::Value, CliError> {
    fs::create_dir_all(out)?;
    let v = cfg.build_potential()?;
    let rho = cfg.resolve_rho(&v);
    let c = build_contour(ContourSpec::new(cfg.energy(), rho, cfg.nodes_per_circle).map_err(|e| CliError::Validation(e.to_string()))?);
    let doc = c.to_json();
    let mut files = BTreeMap::new();
    write_json(out, "contour.json", &doc, &mut files)?;
    let mut csv = String::from("re,im,weight_re,weight_im,component\n");
    for n in &c.nodes {
        let comp = serde_json::to_value(n.component)?;
        csv += &format!("{},{},{},{},{}\n", n.lambda.re, n.lambda.im, n.weight.re, n.weight.im, comp.as_str().unwrap_or_default());
    }
    write_text(out, "contour.csv", &csv, &mut files)?;
    finish(out, "contour-dump", cfg, files)?;
    Ok(doc["header"].clone())
}
