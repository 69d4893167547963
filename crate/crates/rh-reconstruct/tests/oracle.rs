use forward_scattering::{build_dataset, default_spec, solve_faddeev, ScatteringDataset};
use potential_lab::{make_bump, DomainDescriptor, PotentialGrid};
use rh_reconstruct::{
    assemble_system, default_probes, fredholm_det, neumann, reconstruct_field, reconstruct_mu, solve_jump, solve_point, RhSetup,
    SweepOptions, XGrid, C64,
};
use spectral_domain::{lambda_to_k, Energy, SpectralPoint};

fn energy() -> Energy {
    Energy::new(25.0).unwrap()
}

fn bump(n: usize, a: f64) -> PotentialGrid {
    make_bump(DomainDescriptor::unit_disk(), n, [0.15, -0.1], 0.8, a).unwrap()
}

fn dataset(v: &PotentialGrid, nodes: usize, rings: usize, theta: usize, keep: bool) -> ScatteringDataset {
    let mut spec = default_spec(energy(), 1.0, nodes, rings, theta).unwrap();
    spec.keep_fields = keep;
    spec.f_angles = 0;
    build_dataset(v, spec).unwrap()
}

/// μ⁺ − μ at the contour nodes for lattice node n.
fn forward_jump(ds: &ScatteringDataset, n: usize) -> Vec<C64> {
    let x = ds.lattice.node(n);
    let mu = ds.mu_contour.as_ref().unwrap();
    let pp = ds.psi_plus_contour.as_ref().unwrap();
    (0..ds.contour.len())
        .map(|i| {
            let k = lambda_to_k(ds.contour.point(i), energy());
            pp[i][n] * (-C64::new(0.0, 1.0) * k.dot(x)).exp() - mu[i][n]
        })
        .collect()
}

fn rel(a: &[C64], b: &[C64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let s: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (d / s).sqrt()
}

fn sub_values(v: &PotentialGrid, grid: &XGrid, stride: usize) -> Vec<f64> {
    (0..grid.len()).map(|k| v.values[(k / grid.nx) * stride * v.nx + (k % grid.nx) * stride]).collect()
}

#[test]
fn zero_data_collapse_end_to_end() {
    let v = PotentialGrid::zeros(DomainDescriptor::unit_disk(), 12).unwrap();
    let ds = dataset(&v, 16, 4, 16, false);
    let setup = RhSetup::new(&ds, default_probes(ds.contour.radius())).unwrap();
    assert!(setup.data_vanish());
    for x in [[0.0, 0.0], [0.7, -0.4]] {
        let sys = assemble_system(&setup, x).unwrap();
        assert!(sys.i_vec.iter().chain(&sys.a1).chain(&sys.a2).all(|z| *z == C64::new(0.0, 0.0)));
        let jump = solve_jump(&sys).unwrap();
        assert!(jump.k.iter().all(|z| *z == C64::new(0.0, 0.0)));
        assert_eq!(jump.det.value, C64::new(1.0, 0.0));
        for p in 0..4 {
            assert_eq!(reconstruct_mu(&sys, &jump, p), C64::new(1.0, 0.0));
        }
    }
    let grid = XGrid::from_lattice(&ds.lattice, 2);
    let field = reconstruct_field(&setup, grid, SweepOptions { tol: 1e-10, det_stride: 2 }).unwrap();
    assert!(field.estimate.v_hat.iter().all(|v| *v == 0.0));
    assert!(field.det_values.iter().all(|d| d.value == C64::new(1.0, 0.0)));
}

#[test]
fn jump_matches_the_forward_solver_and_successive_approximations() {
    let v = bump(16, 0.1);
    let ds = dataset(&v, 32, 12, 32, true);
    let setup = RhSetup::new(&ds, default_probes(ds.contour.radius())).unwrap();
    for n in [100, 136, 200] {
        let x = ds.lattice.node(n);
        let sys = assemble_system(&setup, x).unwrap();
        let jump = solve_jump(&sys).unwrap();
        assert!(jump.conjugation_defect < 1e-12);
        let kf = forward_jump(&ds, n);
        let e = rel(&jump.k, &kf);
        assert!(e < 1e-2, "K against μ⁺ − μ at {x:?}: {e:e}");
        let kn = neumann(&sys, 10);
        assert!(rel(&kn, &jump.k) < 1e-8);
        let pt = solve_point(&setup, x, 1e-12).unwrap();
        assert!(rel(&pt.k, &jump.k) < 1e-9);
        for (p, &lp) in setup.ctx.probes.iter().enumerate() {
            let mu = reconstruct_mu(&sys, &jump, p);
            assert!((mu - pt.mu_probes[p]).norm() < 1e-10);
            let f = solve_faddeev(&v, SpectralPoint::new(lp).unwrap(), energy()).unwrap().values[n];
            assert!((mu - f).norm() < 1e-3 * f.norm(), "probe {lp}: {mu} {f}");
        }
    }
}

#[test]
fn kernels_scale_with_h_and_vary_continuously_in_x() {
    let v = bump(12, 0.2);
    let mut ds = dataset(&v, 16, 6, 16, false);
    let setup = RhSetup::new(&ds, default_probes(ds.contour.radius())).unwrap();
    let x = [0.1, 0.2];
    let full = assemble_system(&setup, x).unwrap();
    ds.h.iter_mut().for_each(|z| *z *= 0.5);
    let half = assemble_system(&RhSetup::new(&ds, default_probes(ds.contour.radius())).unwrap(), x).unwrap();
    let (f, h) = (full.l2_norms(), half.l2_norms());
    assert!((f.0 / h.0 - 2.0).abs() < 1e-9 && (f.1 / h.1 - 2.0).abs() < 1e-9, "{f:?} {h:?}");
    let diff = |d: f64| {
        let s = assemble_system(&setup, [x[0] + d, x[1]]).unwrap();
        s.a1.iter().zip(&full.a1).chain(s.a2.iter().zip(&full.a2)).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    };
    let (d1, d2, d3) = (diff(0.1), diff(0.05), diff(0.025));
    assert!(d2 < 0.6 * d1 && d3 < 0.6 * d2, "{d1} {d2} {d3}");
}

#[test]
fn determinant_is_one_at_zero_scale_and_continuous_in_scale() {
    let base = bump(12, 1.0);
    let x = [0.2, -0.1];
    let det_at = |s: f64| {
        let ds = dataset(&base.scaled(s), 16, 6, 16, false);
        let setup = RhSetup::new(&ds, default_probes(ds.contour.radius())).unwrap();
        fredholm_det(&assemble_system(&setup, x).unwrap()).value
    };
    assert_eq!(det_at(0.0), C64::new(1.0, 0.0));
    let (d0, d1, d2) = (det_at(0.1), det_at(0.15), det_at(0.125));
    assert!((d1 - d0).norm() > (d2 - d0).norm());
    assert!((d0 - 1.0).norm() > 0.0 && (d1 - 1.0).norm() > (d0 - 1.0).norm());
}

#[test]
fn closed_loop_on_a_small_bump() {
    let v = bump(16, 0.1);
    let ds = dataset(&v, 32, 12, 32, false);
    let setup = RhSetup::new(&ds, default_probes(ds.contour.radius())).unwrap();
    let grid = XGrid::from_lattice(&ds.lattice, 1);
    let field = reconstruct_field(&setup, grid, SweepOptions { tol: 1e-10, det_stride: 5 }).unwrap();
    let err = field.relative_l2_error(&sub_values(&v, &grid, 1));
    assert!(err < 0.1, "{err}");
    assert!(field.max_imag() < 0.05 * v.sup_norm());
    assert!(field.flagged.is_empty());
    // probe invariance
    assert!(field.estimate.probe_spread < 0.2 * v.sup_norm(), "{}", field.estimate.probe_spread);
    for d in &field.det_values {
        assert!((d.value - 1.0).norm() < 1e-2 && !d.near_cut);
    }
}
