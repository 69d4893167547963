//! Identity checks shared by `scatter verify` and the acceptance runner.
//! Every check reports its measured residual; failing is a report entry,
//! not an error.

use std::f64::consts::PI;

use dbar_machinery::{r_from_u, CauchyPlane, DbarSolver};
use forward_scattering::{faddeev_amplitude_b, solve_faddeev, Lattice, ScatteringDataset};
use green_kernels::faddeev::phase;
use green_kernels::wkernel::branch_sweep;
use green_kernels::{green_diff_contour, green_difference, green_faddeev, HeavisideMode, WMatrix};
use potential_lab::PotentialGrid;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rh_reconstruct::{assemble_system, default_probes, fredholm_det, neumann, solve_jump, RhSetup};
use serde::{Deserialize, Serialize};
use spectral_domain::{build_contour, lambda_to_k, ContourSpec, Energy, SpectralContour, SpectralPoint};

use crate::C64;

/// Relative floor below which a finite-difference error is rounding noise.
const FD_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn below(name: &str, residual: f64, tolerance: f64, detail: String) -> Self {
        Self { name: name.into(), residual, tolerance, pass: residual < tolerance, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: residual {:.3e} (tolerance {:.1e}) {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.residual, self.tolerance, self.detail)
    }
}

/// Errors at steps 2h and h, relative to the size of the exact value.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FdPair {
    pub coarse: f64,
    pub fine: f64,
}

impl FdPair {
    pub fn worst(pairs: impl IntoIterator<Item = FdPair>) -> FdPair {
        pairs.into_iter().fold(FdPair { coarse: 0.0, fine: 0.0 }, |a, b| if b.fine > a.fine { b } else { a })
    }

    /// At least first order under halving, unless already at rounding level.
    pub fn decreases(&self) -> bool {
        self.fine <= 0.55 * self.coarse || self.coarse < FD_FLOOR
    }

    pub fn check(&self, name: &str, tol: f64) -> Check {
        let mut c = Check::below(name, self.fine, tol, format!("step 2e-3 → 1e-3: {:.3e} → {:.3e}", self.coarse, self.fine));
        c.pass &= self.decreases();
        c
    }
}

fn lam(z: C64) -> SpectralPoint {
    SpectralPoint::new(z).expect("sample points are nonzero")
}

fn dbar_fd<F: Fn(C64) -> C64>(f: F, l: C64, h: f64) -> (C64, C64) {
    let dx = (f(l + h) - f(l - h)) / (2.0 * h);
    let dy = (f(l + C64::new(0.0, h)) - f(l - C64::new(0.0, h))) / (2.0 * h);
    let i = C64::new(0.0, 1.0);
    ((dx + i * dy) * 0.5, (dx - i * dy) * 0.5)
}

fn sgn(l: C64) -> f64 {
    if l.norm() > 1.0 {
        1.0
    } else {
        -1.0
    }
}

/// Random λ off the unit circle and inside the annuli where G is smooth.
pub fn sample_lambda(rng: &mut ChaCha8Rng) -> C64 {
    let r = if rng.gen_bool(0.5) { rng.gen_range(1.1..4.0) } else { rng.gen_range(0.25..0.9) };
    C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn sample_x(rng: &mut ChaCha8Rng, half_width: f64) -> [f64; 2] {
    loop {
        let x = [rng.gen_range(-half_width..half_width), rng.gen_range(-half_width..half_width)];
        if x[0].hypot(x[1]) > 0.05 {
            return x;
        }
    }
}

/// ∂G/∂λ̄ = sgn/(4πλ̄)·e^{i(√E/2)(−z̄/λ̄ − zλ̄)} and ∂G/∂λ = sgn/(4πλ)·e^{i(√E/2)(λz̄ + z/λ)}.
pub fn green_dbar_fd(e: Energy, x: [f64; 2], l: C64) -> [FdPair; 2] {
    let g = |z: C64| green_faddeev(x, lam(z), e).expect("off the unit circle");
    let z = C64::new(x[0], x[1]);
    let i = C64::new(0.0, 1.0);
    let want_bar = sgn(l) / (4.0 * PI * l.conj()) * (i * phase(e.sqrt(), z, -1.0 / l.conj())).exp();
    let want = sgn(l) / (4.0 * PI * l) * (i * phase(e.sqrt(), z, l)).exp();
    let scale = want.norm().max(want_bar.norm());
    let (b1, d1) = dbar_fd(g, l, 2e-3);
    let (b2, d2) = dbar_fd(g, l, 1e-3);
    [
        FdPair { coarse: (b1 - want_bar).norm() / scale, fine: (b2 - want_bar).norm() / scale },
        FdPair { coarse: (d1 - want).norm() / scale, fine: (d2 - want).norm() / scale },
    ]
}

/// ∂μ/∂λ̄ = π·sgn(|λ|²−1)·(b/λ̄)·e^{−2i Re k·x}·conj μ over the lattice.
pub fn mu_dbar_fd(v: &PotentialGrid, e: Energy, l: C64) -> FdPair {
    let lat = Lattice::of(v);
    let mu = |z: C64| solve_faddeev(v, lam(z), e).expect("Faddeev solve");
    let m0 = mu(l);
    let b = faddeev_amplitude_b(&lat, &m0, e).expect("amplitude");
    let k = lambda_to_k(lam(l), e);
    let err = |h: f64| {
        let (px, mx) = (mu(l + h).values, mu(l - h).values);
        let (py, my) = (mu(l + C64::new(0.0, h)).values, mu(l - C64::new(0.0, h)).values);
        let (mut worst, mut scale) = (0.0f64, 0.0f64);
        for n in 0..lat.len() {
            let dbar = 0.5 * ((px[n] - mx[n]) / (2.0 * h) + C64::new(0.0, 1.0) * (py[n] - my[n]) / (2.0 * h));
            let x = lat.node(n);
            let ph = C64::from_polar(1.0, -2.0 * (k.k1.re * x[0] + k.k2.re * x[1]));
            let rhs = PI * sgn(l) * b / l.conj() * ph * m0.values[n].conj();
            worst = worst.max((dbar - rhs).norm());
            scale = scale.max(rhs.norm());
        }
        if scale == 0.0 {
            worst
        } else {
            worst / scale
        }
    };
    FdPair { coarse: err(2e-3), fine: err(1e-3) }
}

/// ∂e/∂λ̄ = r·ē at exterior-grid nodes, e from the data u of `ds` at x.
pub fn e_dbar_fd(ds: &ScatteringDataset, x: [f64; 2], nodes: &[usize]) -> FdPair {
    let g = &ds.exterior;
    let plane = CauchyPlane::new(g.clone());
    let r = r_from_u(g, &ds.u, ds.energy(), x);
    let solver = DbarSolver::new(&plane, &r);
    let e = solver.solve_e().expect("dbar solve");
    let err = |h: f64| {
        let mut worst = 0.0f64;
        for &idx in nodes {
            let l = g.node(idx);
            let pts = [l + h, l - h, l + C64::new(0.0, h), l - C64::new(0.0, h)];
            let v = e.extend(&plane.rows(&pts), &[C64::new(1.0, 0.0); 4]);
            let dbar = 0.5 * ((v[0] - v[1]) / (2.0 * h) + C64::new(0.0, 1.0) * (v[2] - v[3]) / (2.0 * h));
            let want = r.values[idx] * e.values[idx].conj();
            worst = worst.max((dbar - want).norm() / (1.0 + want.norm()));
        }
        worst
    };
    FdPair { coarse: err(2e-3), fine: err(1e-3) }
}

/// max over node pairs and x of |ψ − ψ⁺ − ∫W h ψ⁺| / max|ψ⁺|; needs the
/// kept contour fields. `misorient` reverses the contour used for W.
pub fn lemma_residual(ds: &ScatteringDataset, xs: &[usize], misorient: bool) -> f64 {
    let e = ds.energy();
    let contour = if misorient { ds.contour.misoriented() } else { ds.contour.clone() };
    let w = WMatrix::build(&contour, HeavisideMode::Exact).expect("W on the contour");
    let mu = ds.mu_contour.as_ref().expect("dataset built with keep_fields");
    let pp = ds.psi_plus_contour.as_ref().expect("dataset built with keep_fields");
    let lat = ds.lattice;
    let m = contour.len();
    let scale = pp.iter().flat_map(|f| xs.iter().map(move |&n| f[n].norm())).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for i in 0..m {
        let k = lambda_to_k(contour.point(i), e);
        for &n in xs {
            let psi = mu[i][n] * (C64::new(0.0, 1.0) * k.dot(lat.node(n))).exp();
            let int: C64 = (0..m).map(|j| w.get(i, j) * ds.h_at(i, j) * pp[j][n]).sum();
            worst = worst.max((psi - pp[i][n] - int).norm());
        }
    }
    worst / scale
}

/// G − G⁺ through the contour integral of W against the direct evaluation,
/// worst relative error.
pub fn green_two_path(e: Energy, rho: f64, nodes: usize, xs: &[[f64; 2]]) -> f64 {
    let c = contour(e, rho, nodes);
    let n = c.per_circle();
    let mut worst = 0.0f64;
    for idx in [0, 5, n / 3, n + 2, n + n / 2 + 1] {
        let l = c.point(idx);
        for &x in xs {
            let a = green_diff_contour(x, l, &c).expect("on the contour");
            let b = green_difference(x, l, e).expect("off the unit circle");
            worst = worst.max((a - b).norm() / b.norm());
        }
    }
    worst
}

pub fn contour(e: Energy, rho: f64, nodes: usize) -> SpectralContour {
    build_contour(ContourSpec::new(e, rho, nodes).expect("valid contour"))
}

/// (violations, smallest margin to ±π) of Im ln wᵢ over all node pairs.
pub fn branch_check(e: Energy, rho: f64, nodes: usize) -> (usize, f64) {
    branch_sweep(&contour(e, rho, nodes))
}

/// μ⁺ − μ at the contour nodes for lattice node n, from the kept fields.
pub fn forward_jump(ds: &ScatteringDataset, n: usize) -> Vec<C64> {
    let e = ds.energy();
    let x = ds.lattice.node(n);
    let mu = ds.mu_contour.as_ref().expect("dataset built with keep_fields");
    let pp = ds.psi_plus_contour.as_ref().expect("dataset built with keep_fields");
    (0..ds.contour.len())
        .map(|i| {
            let k = lambda_to_k(ds.contour.point(i), e);
            pp[i][n] * (-C64::new(0.0, 1.0) * k.dot(x)).exp() - mu[i][n]
        })
        .collect()
}

fn rel(a: &[C64], b: &[C64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let s: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if s == 0.0 {
        d.sqrt()
    } else {
        (d / s).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct JumpOracle {
    /// Relative L² distance of the solved K to the forward μ⁺ − μ.
    pub forward: f64,
    /// Sup distance of the direct solve to ten successive approximations.
    pub neumann: f64,
}

pub fn jump_oracle(ds: &ScatteringDataset, lattice_nodes: &[usize]) -> Result<JumpOracle, rh_reconstruct::RhError> {
    let setup = RhSetup::new(ds, default_probes(ds.contour.radius()))?;
    let mut out = JumpOracle { forward: 0.0, neumann: 0.0 };
    for &n in lattice_nodes {
        let sys = assemble_system(&setup, ds.lattice.node(n))?;
        let jump = solve_jump(&sys)?;
        out.forward = out.forward.max(rel(&jump.k, &forward_jump(ds, n)));
        let kn = neumann(&sys, 10);
        out.neumann = out.neumann.max(jump.k.iter().zip(&kn).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    }
    Ok(out)
}

/// max |det A(x) − 1| for the data of 0·v, i.e. with every table zeroed.
pub fn zero_scale_det(ds: &ScatteringDataset, xs: &[[f64; 2]]) -> Result<f64, rh_reconstruct::RhError> {
    let mut z = ds.clone();
    let zero = C64::new(0.0, 0.0);
    for t in [&mut z.h, &mut z.b, &mut z.u, &mut z.b_contour, &mut z.f] {
        t.iter_mut().for_each(|v| *v = zero);
    }
    let setup = RhSetup::new(&z, default_probes(z.contour.radius()))?;
    let mut worst = 0.0f64;
    for &x in xs {
        worst = worst.max((fredholm_det(&assemble_system(&setup, x)?).value - 1.0).norm());
    }
    Ok(worst)
}
