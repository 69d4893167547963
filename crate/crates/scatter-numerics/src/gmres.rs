//! Restarted GMRES for complex systems given only as a matrix-free operator.
//!
//! Two drivers share the same Arnoldi/Givens core: [`gmres`] for a single
//! right-hand side and [`block_gmres`], which runs independent Krylov
//! processes in lockstep so that the operator is applied to a whole block of
//! vectors at once (useful when one application is a batched FFT or matmul).

use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    /// Relative residual target ‖b − Ax‖ / ‖b‖.
    pub tol: f64,
    /// Krylov dimension before restart.
    pub restart: usize,
    /// Upper bound on the total number of operator applications per column.
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { tol: 1e-12, restart: 60, max_iter: 600 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    pub rel_residual: f64,
    pub converged: bool,
    /// Ratio of extreme |R_ii| of the triangularized Hessenberg matrix,
    /// maximized over restart cycles. A cheap lower-bound proxy for the
    /// condition number of the operator on the explored Krylov space.
    pub cond_estimate: f64,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    // conj(a) . b
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// One column's Arnoldi state within a restart cycle.
struct Cycle {
    basis: Vec<Vec<C64>>,
    h: Vec<Vec<C64>>, // column j holds H[0..=j+1, j]
    cs: Vec<f64>,
    sn: Vec<C64>,
    g: Vec<C64>,
    rdiag_min: f64,
    rdiag_max: f64,
}

impl Cycle {
    fn start(r: Vec<C64>, beta: f64) -> Self {
        let v0: Vec<C64> = r.into_iter().map(|z| z / beta).collect();
        Self {
            basis: vec![v0],
            h: Vec::new(),
            cs: Vec::new(),
            sn: Vec::new(),
            g: vec![C64::new(beta, 0.0)],
            rdiag_min: f64::INFINITY,
            rdiag_max: 0.0,
        }
    }

    /// Orthogonalizes `w = A v_j` against the basis, appends the new column
    /// and returns the updated residual estimate |g_{j+1}|.
    fn extend(&mut self, mut w: Vec<C64>) -> f64 {
        let j = self.h.len();
        let mut hcol = vec![C64::new(0.0, 0.0); j + 2];
        // modified Gram-Schmidt with one reorthogonalization pass
        for _pass in 0..2 {
            for (i, v) in self.basis.iter().enumerate() {
                let c = dot(v, &w);
                hcol[i] += c;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= c * vk;
                }
            }
        }
        let hn = norm(&w);
        hcol[j + 1] = C64::new(hn, 0.0);
        // apply previous rotations
        for i in 0..j {
            let (c, s) = (self.cs[i], self.sn[i]);
            let a = hcol[i];
            let b = hcol[i + 1];
            hcol[i] = a * c + s * b;
            hcol[i + 1] = -s.conj() * a + b * c;
        }
        // new rotation zeroing hcol[j+1]
        let a = hcol[j];
        let b = hcol[j + 1];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 {
            (1.0, C64::new(0.0, 0.0))
        } else if a.norm() == 0.0 {
            (0.0, b.conj() / b.norm())
        } else {
            let c = a.norm() / r;
            let s = (a / a.norm()) * b.conj() / r;
            (c, s)
        };
        hcol[j] = a * c + s * b;
        hcol[j + 1] = C64::new(0.0, 0.0);
        self.cs.push(c);
        self.sn.push(s);
        let gj = self.g[j];
        self.g[j] = gj * c;
        self.g.push(-s.conj() * gj);
        let d = hcol[j].norm();
        self.rdiag_min = self.rdiag_min.min(d);
        self.rdiag_max = self.rdiag_max.max(d);
        self.h.push(hcol);
        if hn > 0.0 {
            self.basis.push(w.into_iter().map(|z| z / hn).collect());
        } else {
            // happy breakdown: keep a zero vector so indices stay aligned
            self.basis.push(vec![C64::new(0.0, 0.0); self.basis[0].len()]);
        }
        self.g[j + 1].norm()
    }

    /// Back-substitution, then x += V y.
    fn update(&self, x: &mut [C64]) {
        let m = self.h.len();
        let mut y = vec![C64::new(0.0, 0.0); m];
        for i in (0..m).rev() {
            let mut acc = self.g[i];
            for k in (i + 1)..m {
                acc -= self.h[k][i] * y[k];
            }
            let d = self.h[i][i];
            y[i] = if d.norm() == 0.0 { C64::new(0.0, 0.0) } else { acc / d };
        }
        for (k, yk) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&self.basis[k]) {
                *xi += yk * vi;
            }
        }
    }

    fn cond(&self) -> f64 {
        if self.rdiag_min == 0.0 {
            f64::INFINITY
        } else if self.rdiag_max == 0.0 {
            1.0
        } else {
            self.rdiag_max / self.rdiag_min
        }
    }
}

/// Solves `A x = b` where `apply(v, out)` writes `A v` into `out`.
pub fn gmres<F>(mut apply: F, b: &[C64], x0: Option<&[C64]>, opts: &GmresOptions) -> GmresOutcome
where
    F: FnMut(&[C64], &mut [C64]),
{
    let mut out = block_gmres(
        |vs: &[C64], outs: &mut [C64], _m: usize| apply(vs, outs),
        b,
        1,
        x0,
        opts,
    );
    out.pop().expect("one column")
}

/// Lockstep GMRES for `m` right-hand sides stored column-major in `b`
/// (`b.len() == n * m`). `apply(vs, outs, k)` must apply the operator to `k`
/// column-major vectors. Columns converge independently; converged columns
/// leave the active block.
pub fn block_gmres<F>(
    mut apply: F,
    b: &[C64],
    m: usize,
    x0: Option<&[C64]>,
    opts: &GmresOptions,
) -> Vec<GmresOutcome>
where
    F: FnMut(&[C64], &mut [C64], usize),
{
    assert!(m > 0 && b.len() % m == 0, "block shape mismatch");
    let n = b.len() / m;
    let zero = C64::new(0.0, 0.0);
    let mut xs: Vec<Vec<C64>> = (0..m)
        .map(|c| match x0 {
            Some(x) => x[c * n..(c + 1) * n].to_vec(),
            None => vec![zero; n],
        })
        .collect();
    let bnorm: Vec<f64> = (0..m).map(|c| norm(&b[c * n..(c + 1) * n])).collect();
    let mut iters = vec![0usize; m];
    let mut relres = vec![0.0f64; m];
    let mut converged = vec![false; m];
    let mut cond = vec![1.0f64; m];
    let mut active: Vec<usize> = Vec::new();
    for c in 0..m {
        if bnorm[c] == 0.0 {
            xs[c].iter_mut().for_each(|z| *z = zero);
            converged[c] = true;
        } else {
            active.push(c);
        }
    }

    let mut inbuf: Vec<C64> = Vec::new();
    let mut outbuf: Vec<C64> = Vec::new();
    let mut residuals = |cols: &[usize], xs: &Vec<Vec<C64>>, apply: &mut F| -> Vec<Vec<C64>> {
        inbuf.clear();
        for &c in cols {
            inbuf.extend_from_slice(&xs[c]);
        }
        outbuf.clear();
        outbuf.resize(inbuf.len(), zero);
        apply(&inbuf, &mut outbuf, cols.len());
        cols.iter()
            .enumerate()
            .map(|(k, &c)| {
                b[c * n..(c + 1) * n]
                    .iter()
                    .zip(&outbuf[k * n..(k + 1) * n])
                    .map(|(bi, ai)| bi - ai)
                    .collect()
            })
            .collect()
    };

    let mut blk_in: Vec<C64> = Vec::new();
    let mut blk_out: Vec<C64> = Vec::new();
    while !active.is_empty() {
        let rs = residuals(&active, &xs, &mut apply);
        let mut cycles: Vec<(usize, Cycle)> = Vec::new();
        for (c, r) in active.iter().copied().zip(rs) {
            let beta = norm(&r);
            relres[c] = beta / bnorm[c];
            if relres[c] <= opts.tol {
                converged[c] = true;
            } else if iters[c] >= opts.max_iter {
                // give up on this column
            } else {
                cycles.push((c, Cycle::start(r, beta)));
            }
        }
        if cycles.is_empty() {
            break;
        }
        let mut live: Vec<usize> = (0..cycles.len()).collect();
        for _step in 0..opts.restart {
            if live.is_empty() {
                break;
            }
            blk_in.clear();
            for &k in &live {
                let cyc = &cycles[k].1;
                blk_in.extend_from_slice(cyc.basis.last().expect("basis"));
            }
            blk_out.clear();
            blk_out.resize(blk_in.len(), zero);
            apply(&blk_in, &mut blk_out, live.len());
            let mut next = Vec::with_capacity(live.len());
            for (slot, &k) in live.iter().enumerate() {
                let (c, cyc) = &mut cycles[k];
                let w = blk_out[slot * n..(slot + 1) * n].to_vec();
                let est = cyc.extend(w);
                iters[*c] += 1;
                if est / bnorm[*c] > opts.tol * 0.5 && iters[*c] < opts.max_iter {
                    next.push(k);
                }
            }
            live = next;
        }
        for (c, cyc) in &cycles {
            cyc.update(&mut xs[*c]);
            cond[*c] = cond[*c].max(cyc.cond());
        }
        active = cycles.iter().map(|(c, _)| *c).collect();
    }

    (0..m)
        .map(|c| GmresOutcome {
            x: std::mem::take(&mut xs[c]),
            iterations: iters[c],
            rel_residual: relres[c],
            converged: converged[c],
            cond_estimate: cond[c],
        })
        .collect()
}
