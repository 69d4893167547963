//! Assembly of I, A₁, A₂ at one x.
//!
//! The generalised Cauchy integral Φ_K (boundary values from inside Λ) is
//! real-linear in K: Φ_K = P₁K + P₂K̄. Columns of P₁, P₂ come from the two
//! unit data e_j and i·e_j:
//! P₁e_j = (Φ(e_j) − iΦ(ie_j))/2, P₂e_j = (Φ(e_j) + iΦ(ie_j))/2.
//! With R_w the quadrature-weighted R, the system is
//! K + R_w(P₁K + P₂K̄) = I = −R_w e, so A₁ = R_w P₁ and A₂ = R_w P₂ carry
//! the contour quadrature in their entries.

use dbar_machinery::{r_from_u, DbarContext, DbarSolution};
use forward_scattering::ScatteringDataset;
use green_kernels::{HeavisideMode, WMatrix};
use spectral_domain::{lambda_to_k, ComplexMomentum, Energy, SpectralPoint};

use crate::{RhError, C64};

/// Unit solves per block; bounds the Krylov memory of the dbar solver.
const BLOCK: usize = 16;

/// Everything that does not depend on x.
pub struct RhSetup {
    pub ctx: DbarContext,
    pub energy: Energy,
    pub u: Vec<C64>,
    /// W(λ_i,ς_j)·h(λ_i,ς_j), row-major, W with its quadrature weight.
    pub wh: Vec<C64>,
    pub ks: Vec<ComplexMomentum>,
    pub probe_ks: Vec<ComplexMomentum>,
    pub exponent_cap: f64,
}

impl std::fmt::Debug for RhSetup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RhSetup({:?})", self.ctx)
    }
}

impl RhSetup {
    pub fn new(ds: &ScatteringDataset, probes: Vec<C64>) -> Result<Self, RhError> {
        let e = ds.energy();
        let w = WMatrix::build(&ds.contour, HeavisideMode::Exact).map_err(|e| RhError::Kernel(e.to_string()))?;
        let m = ds.contour.len();
        let wh = (0..m * m).map(|ij| w.get(ij / m, ij % m) * ds.h[ij]).collect();
        let ks = ds.contour.nodes.iter().map(|p| lambda_to_k(SpectralPoint::new(p.lambda).expect("nonzero"), e)).collect();
        let probe_ks = probes.iter().map(|&p| lambda_to_k(SpectralPoint::new(p).expect("probes are nonzero"), e)).collect();
        let ctx = DbarContext::new(ds.exterior.clone(), ds.contour.clone(), probes);
        Ok(Self { ctx, energy: e, u: ds.u.clone(), wh, ks, probe_ks, exponent_cap: ds.spec.exponent_cap })
    }

    pub fn nodes(&self) -> usize {
        self.ks.len()
    }

    pub fn data_vanish(&self) -> bool {
        let z = C64::new(0.0, 0.0);
        self.wh.iter().all(|v| *v == z) && self.u.iter().all(|v| *v == z)
    }

    /// R_w(x) = e^{i(k_j−k_i)·x}·W_ij h_ij.
    pub fn r_weighted(&self, x: [f64; 2]) -> Result<Vec<C64>, RhError> {
        let m = self.nodes();
        let kx: Vec<C64> = self.ks.iter().map(|k| k.dot(x)).collect();
        let mut out = vec![C64::new(0.0, 0.0); m * m];
        for i in 0..m {
            for j in 0..m {
                let wh = self.wh[i * m + j];
                if wh == C64::new(0.0, 0.0) {
                    continue;
                }
                let ex = C64::new(0.0, 1.0) * (kx[j] - kx[i]);
                if ex.re > self.exponent_cap {
                    return Err(RhError::ExponentCap { exponent: ex.re, cap: self.exponent_cap });
                }
                out[i * m + j] = ex.exp() * wh;
            }
        }
        Ok(out)
    }

    pub fn dbar(&self, x: [f64; 2]) -> Result<DbarSolution<'_>, RhError> {
        let r = r_from_u(&self.ctx.plane.grid, &self.u, self.energy, x);
        Ok(self.ctx.solve(&r)?)
    }
}

pub(crate) fn matvec(a: &[C64], cols: usize, v: &[C64]) -> Vec<C64> {
    a.chunks(cols).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn matmul(a: &[C64], b: &[C64], n: usize, k: usize, m: usize) -> Vec<C64> {
    // (n×k)(k×m)
    let mut out = vec![C64::new(0.0, 0.0); n * m];
    for i in 0..n {
        for l in 0..k {
            let a_il = a[i * k + l];
            if a_il == C64::new(0.0, 0.0) {
                continue;
            }
            let row = &b[l * m..(l + 1) * m];
            out[i * m..(i + 1) * m].iter_mut().zip(row).for_each(|(o, b)| *o += a_il * b);
        }
    }
    out
}

/// The assembled system at one x, with the probe maps for μ'.
#[derive(Debug, Clone)]
pub struct RHSystem {
    pub x: [f64; 2],
    pub m: usize,
    pub i_vec: Vec<C64>,
    /// m × m, row-major.
    pub a1: Vec<C64>,
    pub a2: Vec<C64>,
    /// μ' at probe p is e_p + Σ_j q1[p][j]K_j + q2[p][j]K̄_j.
    pub q1: Vec<C64>,
    pub q2: Vec<C64>,
    pub e_probes: Vec<C64>,
    pub e_contour: Vec<C64>,
    pub r0: f64,
}

impl RHSystem {
    /// The doubled operator A acting on (K, K̄), 2m × 2m row-major.
    pub fn doubled(&self) -> Vec<C64> {
        let m = self.m;
        let mut a = vec![C64::new(0.0, 0.0); 4 * m * m];
        for i in 0..m {
            for j in 0..m {
                let (a1, a2) = (self.a1[i * m + j], self.a2[i * m + j]);
                a[i * 2 * m + j] = a1;
                a[i * 2 * m + m + j] = a2;
                a[(m + i) * 2 * m + j] = a2.conj();
                a[(m + i) * 2 * m + m + j] = a1.conj();
            }
        }
        a
    }

    /// A(K) = A₁K + A₂K̄.
    pub fn apply(&self, k: &[C64]) -> Vec<C64> {
        let kc: Vec<C64> = k.iter().map(|z| z.conj()).collect();
        matvec(&self.a1, self.m, k).iter().zip(matvec(&self.a2, self.m, &kc)).map(|(a, b)| a + b).collect()
    }

    pub fn l2_norms(&self) -> (f64, f64) {
        let n = |a: &[C64]| a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (n(&self.a1), n(&self.a2))
    }
}

pub fn assemble_system(setup: &RhSetup, x: [f64; 2]) -> Result<RHSystem, RhError> {
    let m = setup.nodes();
    let np = setup.ctx.probes.len();
    let rw = setup.r_weighted(x)?;
    let sol = setup.dbar(x)?;
    let i_vec: Vec<C64> = matvec(&rw, m, &sol.e_trace.contour).into_iter().map(|z| -z).collect();
    let zero = C64::new(0.0, 0.0);
    let mut p1 = vec![zero; m * m];
    let mut p2 = vec![zero; m * m];
    let mut q1 = vec![zero; np * m];
    let mut q2 = vec![zero; np * m];
    if rw.iter().any(|z| *z != zero) {
        let i = C64::new(0.0, 1.0);
        let cols: Vec<(usize, C64)> = (0..m).flat_map(|j| [(j, C64::new(1.0, 0.0)), (j, i)]).collect();
        for chunk in cols.chunks(2 * BLOCK) {
            let mut ks = vec![zero; m * chunk.len()];
            for (c, &(j, s)) in chunk.iter().enumerate() {
                ks[c * m + j] = s;
            }
            let traces = sol.phi(&ks, chunk.len())?;
            for pair in chunk.chunks(2).zip(traces.chunks(2)) {
                let j = pair.0[0].0;
                let (re, im) = (&pair.1[0], &pair.1[1]);
                for row in 0..m {
                    p1[row * m + j] = 0.5 * (re.contour[row] - i * im.contour[row]);
                    p2[row * m + j] = 0.5 * (re.contour[row] + i * im.contour[row]);
                }
                for p in 0..np {
                    q1[p * m + j] = 0.5 * (re.probes[p] - i * im.probes[p]);
                    q2[p * m + j] = 0.5 * (re.probes[p] + i * im.probes[p]);
                }
            }
        }
    }
    Ok(RHSystem {
        x,
        m,
        i_vec,
        a1: matmul(&rw, &p1, m, m, m),
        a2: matmul(&rw, &p2, m, m, m),
        q1,
        q2,
        e_probes: sol.e_trace.probes.clone(),
        e_contour: sol.e_trace.contour.clone(),
        r0: sol.r0,
    })
}
