//! The real-linear equation Φ − T[r·Φ̄] = S on the grid nodes.
//!
//! Conjugation is not complex-linear, so the unknown is doubled to (Φ, Ψ)
//! with Ψ standing for Φ̄:
//!
//! ```text
//! Φ − T[r Ψ]        = S
//! Ψ − conj T[r Φ̄']  = S̄      (Φ̄' read as conj of Φ)
//! ```
//!
//! which is complex-linear in (Φ, Ψ); consistent data (S, S̄) yield Ψ = Φ̄.
//! Off the grid the solution extends by Φ(λ) = S(λ) + T[rΦ̄](λ).

use scatter_numerics::gmres::{block_gmres, GmresOptions};

use crate::plane::{CauchyPlane, TargetRows};
use crate::rcoef::RCoefficient;
use crate::{DbarError, C64};

pub struct DbarSolver<'a> {
    pub plane: &'a CauchyPlane,
    pub r: &'a RCoefficient,
    pub opts: GmresOptions,
    /// r₀ with p = 3, reported with failures.
    pub r0: f64,
}

/// Solution of one real-linear equation: values at the grid nodes and the
/// density r·Φ̄ that extends it off the grid.
#[derive(Debug, Clone)]
pub struct GridSolution {
    pub values: Vec<C64>,
    pub density: Vec<C64>,
    pub iterations: usize,
    pub residual: f64,
}

impl GridSolution {
    /// Φ at off-grid targets, given S there.
    pub fn extend(&self, rows: &TargetRows, rhs: &[C64]) -> Vec<C64> {
        rows.apply(&self.density).iter().zip(rhs).map(|(a, b)| a + b).collect()
    }
}

impl<'a> DbarSolver<'a> {
    pub fn new(plane: &'a CauchyPlane, r: &'a RCoefficient) -> Self {
        let r0 = r.r0(&plane.grid, crate::NORM_P);
        Self { plane, r, opts: GmresOptions { tol: 1e-13, restart: 40, max_iter: 400 }, r0 }
    }

    fn apply_doubled(&self, xs: &[C64], outs: &mut [C64], m: usize) {
        let n = self.plane.len();
        let r = &self.r.values;
        let mut tmp = vec![C64::new(0.0, 0.0); n];
        let mut res = vec![C64::new(0.0, 0.0); n];
        for c in 0..m {
            let x = &xs[c * 2 * n..(c + 1) * 2 * n];
            let (phi, psi) = x.split_at(n);
            let o = &mut outs[c * 2 * n..(c + 1) * 2 * n];
            // Φ − T[rΨ]
            for k in 0..n {
                tmp[k] = r[k] * psi[k];
            }
            self.plane.apply(&tmp, &mut res);
            for k in 0..n {
                o[k] = phi[k] - res[k];
            }
            // Ψ − conj T[r·conj Φ]
            for k in 0..n {
                tmp[k] = r[k] * phi[k].conj();
            }
            self.plane.apply(&tmp, &mut res);
            for k in 0..n {
                o[n + k] = psi[k] - res[k].conj();
            }
        }
    }

    /// Solves for m right-hand sides S (grid values, column-major N × m).
    pub fn solve(&self, rhs: &[C64], m: usize) -> Result<Vec<GridSolution>, DbarError> {
        let n = self.plane.len();
        assert_eq!(rhs.len(), n * m);
        if self.r.is_zero() {
            return Ok((0..m)
                .map(|c| GridSolution {
                    values: rhs[c * n..(c + 1) * n].to_vec(),
                    density: vec![C64::new(0.0, 0.0); n],
                    iterations: 0,
                    residual: 0.0,
                })
                .collect());
        }
        let mut b = Vec::with_capacity(2 * n * m);
        for c in 0..m {
            let s = &rhs[c * n..(c + 1) * n];
            b.extend_from_slice(s);
            b.extend(s.iter().map(|z| z.conj()));
        }
        let outs = block_gmres(|x, o, k| self.apply_doubled(x, o, k), &b, m, None, &self.opts);
        outs.into_iter()
            .map(|o| {
                if !o.converged {
                    return Err(DbarError::NotConverged { residual: o.rel_residual, r0: self.r0 });
                }
                let values = o.x[..n].to_vec();
                let density = values.iter().zip(&self.r.values).map(|(v, r)| r * v.conj()).collect();
                Ok(GridSolution { values, density, iterations: o.iterations, residual: o.rel_residual })
            })
            .collect()
    }

    /// e = 1 + T[r ē].
    pub fn solve_e(&self) -> Result<GridSolution, DbarError> {
        let n = self.plane.len();
        Ok(self.solve(&vec![C64::new(1.0, 0.0); n], 1)?.pop().expect("one column"))
    }
}
