//! Solving K + A₁K + A₂K̄ = I.

use faer::complex_native::c64;
use faer::prelude::SpSolver;
use faer::Mat;
use scatter_numerics::gmres::{block_gmres, GmresOptions};

use crate::det::{fredholm_det, FredholmDet};
use crate::system::{matvec, RHSystem, RhSetup};
use crate::{RhError, C64};

/// Smallest/largest singular value ratio below which Id + A is treated as
/// singular at this x.
pub const SINGULAR_RATIO: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct JumpSolution {
    pub k: Vec<C64>,
    pub det: FredholmDet,
    /// σ_max/σ_min of the doubled Id + A.
    pub cond: f64,
    /// max |K − conj(K̄ block)| before symmetrisation.
    pub conjugation_defect: f64,
}

fn to_faer(a: &[C64], n: usize, shift: f64) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| {
        let z = a[i * n + j];
        c64::new(z.re + if i == j { shift } else { 0.0 }, z.im)
    })
}

/// Dense LU of the doubled 2m × 2m system.
pub fn solve_jump(sys: &RHSystem) -> Result<JumpSolution, RhError> {
    let m = sys.m;
    let n = 2 * m;
    let mat = to_faer(&sys.doubled(), n, 1.0);
    let sv = mat.singular_values();
    let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
    if smin < SINGULAR_RATIO * smax {
        return Err(RhError::Singular { x: sys.x, ratio: smin / smax });
    }
    let rhs = Mat::from_fn(n, 1, |i, _| {
        let z = if i < m { sys.i_vec[i] } else { sys.i_vec[i - m].conj() };
        c64::new(z.re, z.im)
    });
    let sol = mat.partial_piv_lu().solve(&rhs);
    let top: Vec<C64> = (0..m).map(|i| C64::new(sol.read(i, 0).re, sol.read(i, 0).im)).collect();
    let bot: Vec<C64> = (0..m).map(|i| C64::new(sol.read(m + i, 0).re, sol.read(m + i, 0).im)).collect();
    let conjugation_defect = top.iter().zip(&bot).map(|(a, b)| (a - b.conj()).norm()).fold(0.0, f64::max);
    let k = top.iter().zip(&bot).map(|(a, b)| 0.5 * (a + b.conj())).collect();
    Ok(JumpSolution { k, det: fredholm_det(sys), cond: smax / smin, conjugation_defect })
}

/// Successive approximations K_{n+1} = I − A₁K_n − A₂K̄_n from K₀ = 0.
pub fn neumann(sys: &RHSystem, steps: usize) -> Vec<C64> {
    let mut k = vec![C64::new(0.0, 0.0); sys.m];
    for _ in 0..steps {
        let ak = sys.apply(&k);
        k = sys.i_vec.iter().zip(ak).map(|(i, a)| i - a).collect();
    }
    k
}

/// K and μ' at the probes for one x, without forming A₁, A₂.
#[derive(Debug, Clone)]
pub struct PointSolution {
    pub x: [f64; 2],
    pub k: Vec<C64>,
    pub mu_probes: Vec<C64>,
    pub iterations: usize,
    pub residual: f64,
    pub r0: f64,
}

/// The map K ↦ K + R_w Φ_K is only real-linear, so GMRES runs on its
/// complexification over ℝ^{2m} ∋ (Re K, Im K): real vectors stay real and
/// each column costs one dbar solve per real part.
pub fn solve_point(setup: &RhSetup, x: [f64; 2], tol: f64) -> Result<PointSolution, RhError> {
    let m = setup.nodes();
    let rw = setup.r_weighted(x)?;
    let sol = setup.dbar(x)?;
    let i_vec: Vec<C64> = matvec(&rw, m, &sol.e_trace.contour).into_iter().map(|z| -z).collect();
    let zero = C64::new(0.0, 0.0);
    if i_vec.iter().all(|z| *z == zero) {
        return Ok(PointSolution { x, k: vec![zero; m], mu_probes: sol.e_trace.probes.clone(), iterations: 0, residual: 0.0, r0: sol.r0 });
    }
    let pack = |k: &[C64]| -> Vec<C64> { k.iter().map(|z| C64::new(z.re, 0.0)).chain(k.iter().map(|z| C64::new(z.im, 0.0))).collect() };
    let failure = std::cell::RefCell::new(None);
    let apply = |xs: &[C64], outs: &mut [C64], cols: usize| {
        // real parts and (nonzero) imaginary parts of every column, as K vectors
        let mut ks = Vec::new();
        let mut slots = Vec::new();
        for c in 0..cols {
            let x = &xs[c * 2 * m..(c + 1) * 2 * m];
            for part in 0..2 {
                let get = |z: &C64| if part == 0 { z.re } else { z.im };
                if part == 1 && x.iter().all(|z| z.im == 0.0) {
                    continue;
                }
                ks.extend((0..m).map(|j| C64::new(get(&x[j]), get(&x[m + j]))));
                slots.push((c, part));
            }
        }
        let phis = match sol.phi(&ks, slots.len()) {
            Ok(p) => p,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                outs.iter_mut().for_each(|o| *o = zero);
                return;
            }
        };
        outs.iter_mut().for_each(|o| *o = zero);
        for (s, (&(c, part), phi)) in slots.iter().zip(&phis).enumerate() {
            let k = &ks[s * m..(s + 1) * m];
            let w: Vec<C64> = k.iter().zip(matvec(&rw, m, &phi.contour)).map(|(a, b)| a + b).collect();
            let unit = if part == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
            let o = &mut outs[c * 2 * m..(c + 1) * 2 * m];
            for j in 0..m {
                o[j] += unit * w[j].re;
                o[m + j] += unit * w[j].im;
            }
        }
    };
    let opts = GmresOptions { tol, restart: 40, max_iter: 200 };
    let out = block_gmres(apply, &pack(&i_vec), 1, None, &opts).pop().expect("one column");
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    if !out.converged {
        return Err(RhError::NotConverged { x, residual: out.rel_residual });
    }
    let k: Vec<C64> = (0..m).map(|j| C64::new(out.x[j].re, out.x[m + j].re)).collect();
    let phi = sol.phi(&k, 1)?.pop().expect("one column");
    let mu_probes = sol.e_trace.probes.iter().zip(&phi.probes).map(|(a, b)| a + b).collect();
    Ok(PointSolution { x, k, mu_probes, iterations: out.iterations, residual: out.rel_residual, r0: sol.r0 })
}
