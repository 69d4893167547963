//! End-to-end runs of the `scatter` binary on small configurations.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn scatter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scatter")).args(args).output().expect("binary runs")
}

fn small_config(dir: &Path, potential: Value) -> String {
    let cfg = json!({
        "nodes_per_circle": 16,
        "potential": potential,
        "exterior": { "n_rings": 6, "n_theta": 16 },
        "f_angles": 8,
        "stride": 2,
        "det_stride": 2,
        "nv": { "x_stride": 4 }
    });
    let p = dir.join("config.json");
    fs::write(&p, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn zero_potential() -> Value {
    json!({ "domain": { "shape": { "shape": "disk", "center": [0.0, 0.0], "radius": 1.0 } }, "n": 16, "kind": "zero" })
}

fn bump(a: f64) -> Value {
    json!({ "domain": { "shape": { "shape": "disk", "center": [0.0, 0.0], "radius": 1.0 } }, "n": 16, "kind": "bump", "center": [0.1, -0.05], "radius": 0.7, "amplitude": a })
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}\nstdout: {}\nstderr: {}", o.status.code(), String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
}

fn c64_table(p: &Path) -> Vec<f64> {
    let bytes = fs::read(p).unwrap();
    bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect()
}

#[test]
fn zero_potential_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), zero_potential());
    let data = tmp.path().join("data");
    let o = scatter(&["forward", "--config", &cfg, "--out", data.to_str().unwrap()]);
    ok(&o);
    for t in ["h", "b", "u", "f", "b_contour"] {
        let v = c64_table(&data.join(format!("{t}.bin")));
        assert!(!v.is_empty());
        assert!(v.iter().all(|x| *x == 0.0), "{t} not zero");
    }

    let rec = tmp.path().join("rec");
    ok(&scatter(&["reconstruct", "--config", &cfg, "--dataset", data.to_str().unwrap(), "--out", rec.to_str().unwrap()]));
    let s = read_json(&rec.join("summary.json"));
    assert!(s["max_imag"].as_f64().unwrap() <= 1e-12);
    assert!(s["det"]["max_dev_from_one"].as_f64().unwrap() <= 1e-12);
    let rows: Vec<csv::StringRecord> = csv::Reader::from_path(rec.join("v_hat.csv")).unwrap().records().map(|r| r.unwrap()).collect();
    assert!(!rows.is_empty());
    for r in &rows {
        assert!(r[2].parse::<f64>().unwrap().abs() <= 1e-12);
    }
    let m = read_json(&rec.join("run.json"));
    assert_eq!(m["command"], "reconstruct");
    for f in ["v_hat.bin", "v_hat_imag.bin", "residuals.bin", "detA.bin", "v_hat.csv", "summary.json"] {
        assert!(m["files"][f].is_string(), "{f} missing from manifest");
    }
}

#[test]
fn forward_is_reproducible_and_checksummed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), bump(0.2));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&scatter(&["forward", "--config", &cfg, "--out", a.to_str().unwrap()]));
    ok(&scatter(&["forward", "--config", &cfg, "--out", b.to_str().unwrap()]));
    assert_eq!(fs::read(a.join("run.json")).unwrap(), fs::read(b.join("run.json")).unwrap());
    assert_eq!(fs::read(a.join("manifest.json")).unwrap(), fs::read(b.join("manifest.json")).unwrap());

    // flip one byte of a table: reading the dataset must fail validation
    let p = a.join("b.bin");
    let mut bytes = fs::read(&p).unwrap();
    bytes[3] ^= 0x40;
    fs::write(&p, bytes).unwrap();
    let o = scatter(&["reconstruct", "--config", &cfg, "--dataset", a.to_str().unwrap(), "--out", tmp.path().join("r").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("b.bin"));
}

#[test]
fn bad_config_and_missing_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("bad.json");
    fs::write(&p, r#"{"energy": -1}"#).unwrap();
    assert_eq!(scatter(&["contour-dump", "--config", p.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]).status.code(), Some(2));
    fs::write(&p, r#"{"unknown_field": 1}"#).unwrap();
    assert_eq!(scatter(&["contour-dump", "--config", p.to_str().unwrap()]).status.code(), Some(2));
    let o = scatter(&["reconstruct", "--dataset", tmp.path().join("nowhere").to_str().unwrap(), "--out", tmp.path().join("r").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn nv_scan_at_t_zero_matches_the_static_determinant() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), bump(0.2));
    let data = tmp.path().join("data");
    ok(&scatter(&["forward", "--config", &cfg, "--out", data.to_str().unwrap()]));

    let n1 = tmp.path().join("nv1");
    ok(&scatter(&["nv", "--config", &cfg, "--dataset", data.to_str().unwrap(), "--t", "0,0.002", "--out", n1.to_str().unwrap()]));
    let n2 = tmp.path().join("nv2");
    ok(&scatter(&["nv", "--config", &cfg, "--dataset", data.to_str().unwrap(), "--t", "0.002,0", "--out", n2.to_str().unwrap()]));
    assert_eq!(fs::read(n1.join("det_s0_t0.bin")).unwrap(), fs::read(n2.join("det_s0_t1.bin")).unwrap());
    assert_eq!(fs::read(n1.join("det_s0_t1.bin")).unwrap(), fs::read(n2.join("det_s0_t0.bin")).unwrap());

    let z = read_json(&n1.join("zero_set.json"));
    assert_eq!(z["slices"].as_array().unwrap().len(), 2);
    let det = c64_table(&n1.join("det_s0_t0.bin"));
    for pair in det.chunks(2) {
        assert!(pair[0].is_finite() && pair[0].abs() > 1e-3);
        assert!(pair[1].abs() < 1e-8, "det not real at t = 0");
    }
}

#[test]
fn verify_passes_and_its_negative_control_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), bump(0.2));
    let good = tmp.path().join("g");
    ok(&scatter(&["verify", "--config", &cfg, "--out", good.to_str().unwrap()]));
    assert_eq!(read_json(&good.join("verify.json"))["passed"], true);
    let out = tmp.path().join("v");
    let o = scatter(&["verify", "--config", &cfg, "--debug-misorient", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let r = read_json(&out.join("verify.json"));
    assert_eq!(r["passed"], false);
    let lemma = r["checks"].as_array().unwrap().iter().find(|c| c["name"].as_str().unwrap().starts_with("psi - psi+")).unwrap();
    assert_eq!(lemma["pass"], false);
}

#[test]
fn contour_dump_and_c0() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), bump(0.2));
    let out = tmp.path().join("c");
    ok(&scatter(&["contour-dump", "--config", &cfg, "--out", out.to_str().unwrap()]));
    let rows = csv::Reader::from_path(out.join("contour.csv")).unwrap().records().count();
    assert_eq!(rows, 32);
    ok(&scatter(&["calibrate-c0", "--config", &cfg, "--out", out.to_str().unwrap()]));
    let c = read_json(&out.join("c0.json"));
    let (c0, limit) = (c["c0"].as_f64().unwrap(), c["limit"].as_f64().unwrap());
    assert!(c0 >= limit * 0.99 && c0 < 2.0 * limit);
}
