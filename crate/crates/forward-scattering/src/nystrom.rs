//! Nyström discretization of ψ = e^{ikx} + ∫G(x−y)v(y)ψ(y)dy on the
//! cell-centred potential lattice.
//!
//! The kernel weight for offset o = x − y is h²G(o), except on cells close to
//! the origin, where the log singularity of G⁺ makes the midpoint rule
//! inaccurate. There the exact cell integral of Re G⁺ replaces h²·Re G⁺(o), and the
//! smooth remainder G − G⁺ keeps its midpoint value (its value at o = 0 is
//! the limit i/4 + |ln|λ||/2π). Classical and Faddeev weights thus differ by
//! h²(G − G⁺)(o) at every offset.

use green_kernels::classical::{cell_integral_classical, green_classical_r};
use green_kernels::faddeev::phase;
use green_kernels::{diagonal_difference, green_faddeev_g};
use potential_lab::PotentialGrid;
use rayon::prelude::*;
use scatter_numerics::gmres::{block_gmres, gmres, GmresOptions, GmresOutcome};
use serde::{Deserialize, Serialize};
use spectral_domain::{lambda_to_k, ComplexMomentum, Energy, SpectralPoint};

use crate::conv::Conv2d;
use crate::{ForwardError, C64};

/// Offsets (in cells) within this radius receive the exact-cell correction.
pub const NEAR_RADIUS: i64 = 3;
/// Condition estimates above this flag a solve as (nearly) exceptional.
pub const EXCEPTIONAL_COND: f64 = 1e12;

/// Lattice geometry shared by all fields on one potential grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: [f64; 2],
}

impl Lattice {
    pub fn of(v: &PotentialGrid) -> Self {
        Self { nx: v.nx, ny: v.ny, h: v.spacing, origin: v.origin }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, idx: usize) -> [f64; 2] {
        let (i, j) = (idx % self.nx, idx / self.nx);
        [self.origin[0] + (i as f64 + 0.5) * self.h, self.origin[1] + (j as f64 + 0.5) * self.h]
    }

    pub fn nodes(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    pub fn offset(&self, di: i64, dj: i64) -> [f64; 2] {
        [di as f64 * self.h, dj as f64 * self.h]
    }

    /// All offsets (di, dj), |di| < nx, |dj| < ny, except (0, 0).
    pub fn offsets(&self) -> Vec<(i64, i64)> {
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        let mut v = Vec::with_capacity(((2 * nx - 1) * (2 * ny - 1)) as usize);
        for dj in -(ny - 1)..ny {
            for di in -(nx - 1)..nx {
                if (di, dj) != (0, 0) {
                    v.push((di, dj));
                }
            }
        }
        v
    }
}

/// Exact-cell corrections near the origin, applied to the log-singular real
/// part of G⁺ only. Correcting the smooth imaginary part as well would buy
/// nothing in order and would break the exact discrete counterpart of
/// G(x,k(−1/λ̄)) = conj G(x,k(λ)).
#[derive(Debug, Clone)]
pub struct NearField {
    pub diag: C64,
    entries: Vec<((i64, i64), C64)>,
}

impl NearField {
    pub fn new(h: f64, sqrt_e: f64) -> Self {
        let mut entries = Vec::new();
        for dj in -NEAR_RADIUS..=NEAR_RADIUS {
            for di in -NEAR_RADIUS..=NEAR_RADIUS {
                if (di, dj) == (0, 0) || di * di + dj * dj > NEAR_RADIUS * NEAR_RADIUS {
                    continue;
                }
                let o = [di as f64 * h, dj as f64 * h];
                let w = cell_integral_classical(o, h, sqrt_e);
                let d = w - green_classical_r(o[0].hypot(o[1]), sqrt_e) * (h * h);
                entries.push(((di, dj), C64::new(d.re, 0.0)));
            }
        }
        // Im G⁺ = −J₀/4 is smooth and keeps its midpoint value h²·(−1/4)
        let d = cell_integral_classical([0.0, 0.0], h, sqrt_e);
        Self { diag: C64::new(d.re, -0.25 * h * h), entries }
    }

    pub fn get(&self, di: i64, dj: i64) -> Option<C64> {
        if di * di + dj * dj > NEAR_RADIUS * NEAR_RADIUS {
            return None;
        }
        self.entries.iter().find(|(o, _)| *o == (di, dj)).map(|(_, c)| *c)
    }

    pub fn iter(&self) -> impl Iterator<Item = &((i64, i64), C64)> {
        self.entries.iter()
    }
}

/// Kernel weights for the classical equation: h²G⁺(o) corrected near 0.
pub fn classical_weights<'a>(lat: &'a Lattice, near: &'a NearField, sqrt_e: f64) -> impl Fn(i64, i64) -> C64 + 'a {
    move |di, dj| {
        if (di, dj) == (0, 0) {
            return near.diag;
        }
        let o = lat.offset(di, dj);
        let base = green_classical_r(o[0].hypot(o[1]), sqrt_e) * (lat.h * lat.h);
        base + near.get(di, dj).unwrap_or_default()
    }
}

/// μ-form weights K(o) = e^{−ik·o}·(Faddeev weight of ψ) from g values on
/// all nonzero offsets.
pub fn faddeev_weights(lat: &Lattice, near: &NearField, lambda: SpectralPoint, g: &[C64], sqrt_e: f64) -> Vec<C64> {
    let offsets = lat.offsets();
    assert_eq!(offsets.len(), g.len());
    let (nx, ny) = (lat.nx as i64, lat.ny as i64);
    let w2 = 2 * nx - 1;
    let mut out = vec![C64::new(0.0, 0.0); (w2 * (2 * ny - 1)) as usize];
    let hh = lat.h * lat.h;
    let i = C64::new(0.0, 1.0);
    for (&(di, dj), gv) in offsets.iter().zip(g) {
        let mut k = gv * hh;
        if let Some(c) = near.get(di, dj) {
            let o = lat.offset(di, dj);
            k += c * (-i * phase(sqrt_e, C64::new(o[0], o[1]), lambda.value())).exp();
        }
        out[((dj + ny - 1) * w2 + di + nx - 1) as usize] = k;
    }
    out[((ny - 1) * w2 + nx - 1) as usize] = near.diag + diagonal_difference(lambda) * hh;
    out
}

/// g(o, λ) on all nonzero lattice offsets, pointwise.
pub fn faddeev_g_offsets(lat: &Lattice, lambda: SpectralPoint, e: Energy) -> Result<Vec<C64>, ForwardError> {
    lat.offsets()
        .par_iter()
        .map(|&(di, dj)| green_faddeev_g(lat.offset(di, dj), lambda, e).map_err(ForwardError::from))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// ψ⁺ of the outgoing Lippmann-Schwinger equation.
    Classical,
    /// μ = e^{−ikx}ψ of the Faddeev equation.
    Faddeev,
}

/// A solved field on the full lattice.
#[derive(Debug, Clone)]
pub struct WaveField {
    pub kind: FieldKind,
    pub k: ComplexMomentum,
    /// λ with k = k(λ), when the field was solved through λ.
    pub lambda: Option<C64>,
    /// ψ⁺ (classical) or μ (Faddeev) at every lattice node.
    pub values: Vec<C64>,
    /// The density v·ψ⁺ or v·μ.
    pub density: Vec<C64>,
    pub residual: f64,
    pub iterations: usize,
    pub cond_estimate: f64,
    /// Condition estimate above [`EXCEPTIONAL_COND`].
    pub flagged: bool,
}

fn plane_wave(lat: &Lattice, k: &ComplexMomentum) -> Vec<C64> {
    let i = C64::new(0.0, 1.0);
    (0..lat.len()).map(|n| (i * k.dot(lat.node(n))).exp()).collect()
}

fn finish(
    kind: FieldKind,
    k: ComplexMomentum,
    lambda: Option<C64>,
    out: GmresOutcome,
    base: Vec<C64>,
    conv: &Conv2d,
) -> Result<WaveField, ForwardError> {
    if !out.converged {
        return Err(ForwardError::NotConverged { residual: out.rel_residual, cond: out.cond_estimate });
    }
    let mut values = vec![C64::new(0.0, 0.0); base.len()];
    conv.apply(&out.x, &mut values);
    values.iter_mut().zip(&base).for_each(|(z, b)| *z += b);
    Ok(WaveField {
        kind,
        k,
        lambda,
        values,
        density: out.x,
        residual: out.rel_residual,
        iterations: out.iterations,
        cond_estimate: out.cond_estimate,
        flagged: out.cond_estimate > EXCEPTIONAL_COND,
    })
}

/// The operator w ↦ w − v·(K ∗ w) on the lattice.
fn operator<'a>(conv: &'a Conv2d, v: &'a [f64]) -> impl FnMut(&[C64], &mut [C64], usize) + 'a {
    let n = v.len();
    move |xs: &[C64], outs: &mut [C64], m: usize| {
        for c in 0..m {
            let (x, o) = (&xs[c * n..(c + 1) * n], &mut outs[c * n..(c + 1) * n]);
            conv.apply(x, o);
            for t in 0..n {
                o[t] = x[t] - o[t] * v[t];
            }
        }
    }
}

/// Solver for the outgoing equation at one potential; many momenta share the
/// same operator.
pub struct ClassicalSolver<'a> {
    pub v: &'a PotentialGrid,
    pub lat: Lattice,
    pub energy: Energy,
    conv: Conv2d,
    pub opts: GmresOptions,
}

impl<'a> ClassicalSolver<'a> {
    pub fn new(v: &'a PotentialGrid, energy: Energy) -> Self {
        let lat = Lattice::of(v);
        let near = NearField::new(lat.h, energy.sqrt());
        let conv = Conv2d::new(lat.nx, lat.ny, classical_weights(&lat, &near, energy.sqrt()));
        Self { v, lat, energy, conv, opts: GmresOptions::default() }
    }

    /// ψ⁺(·,k) for any k with k·k = E (complex k gives the holomorphic
    /// continuation in k).
    pub fn solve(&self, k: ComplexMomentum) -> Result<WaveField, ForwardError> {
        Ok(self.solve_many(&[k])?.pop().expect("one field"))
    }

    pub fn solve_lambda(&self, lambda: SpectralPoint) -> Result<WaveField, ForwardError> {
        let mut f = self.solve(lambda_to_k(lambda, self.energy))?;
        f.lambda = Some(lambda.value());
        Ok(f)
    }

    pub fn solve_many(&self, ks: &[ComplexMomentum]) -> Result<Vec<WaveField>, ForwardError> {
        for k in ks {
            check_shell(k, self.energy)?;
        }
        let n = self.lat.len();
        let bases: Vec<Vec<C64>> = ks.iter().map(|k| plane_wave(&self.lat, k)).collect();
        let mut rhs = Vec::with_capacity(n * ks.len());
        for b in &bases {
            rhs.extend(b.iter().zip(&self.v.values).map(|(z, v)| z * *v));
        }
        let outs = if self.v.is_zero() {
            (0..ks.len()).map(|_| trivial(n)).collect()
        } else {
            block_gmres(operator(&self.conv, &self.v.values), &rhs, ks.len(), None, &self.opts)
        };
        outs.into_iter()
            .zip(bases)
            .zip(ks)
            .map(|((o, b), k)| finish(FieldKind::Classical, *k, None, o, b, &self.conv))
            .collect()
    }
}

fn trivial(n: usize) -> GmresOutcome {
    GmresOutcome { x: vec![C64::new(0.0, 0.0); n], iterations: 0, rel_residual: 0.0, converged: true, cond_estimate: 1.0 }
}

fn check_shell(k: &ComplexMomentum, e: Energy) -> Result<(), ForwardError> {
    let dev = (k.square() - e.value()).norm();
    if dev > 1e-9 * (e.value() + k.k1.norm_sqr() + k.k2.norm_sqr()) {
        return Err(ForwardError::OffShell(dev));
    }
    Ok(())
}

/// μ(·,k(λ)) given precomputed g values on all nonzero offsets
/// (see [`faddeev_g_offsets`]).
pub fn solve_faddeev_with_g(v: &PotentialGrid, lambda: SpectralPoint, e: Energy, g: &[C64], near: &NearField, opts: &GmresOptions) -> Result<WaveField, ForwardError> {
    let lat = Lattice::of(v);
    let k = lambda_to_k(lambda, e);
    let table = faddeev_weights(&lat, near, lambda, g, e.sqrt());
    let (nx, ny) = (lat.nx as i64, lat.ny as i64);
    let w2 = 2 * nx - 1;
    let conv = Conv2d::new(lat.nx, lat.ny, |di, dj| table[((dj + ny - 1) * w2 + di + nx - 1) as usize]);
    let n = lat.len();
    let ones = vec![C64::new(1.0, 0.0); n];
    let out = if v.is_zero() {
        trivial(n)
    } else {
        let rhs: Vec<C64> = v.values.iter().map(|&x| C64::new(x, 0.0)).collect();
        let mut op = operator(&conv, &v.values);
        gmres(|x, o| op(x, o, 1), &rhs, None, opts)
    };
    finish(FieldKind::Faddeev, k, Some(lambda.value()), out, ones, &conv)
}

/// μ(·,k(λ)) solving the Faddeev equation μ = 1 + ∫g(x−y,k)v(y)μ(y)dy.
pub fn solve_faddeev(v: &PotentialGrid, lambda: SpectralPoint, e: Energy) -> Result<WaveField, ForwardError> {
    let lat = Lattice::of(v);
    let near = NearField::new(lat.h, e.sqrt());
    let g = if v.is_zero() { vec![C64::new(0.0, 0.0); lat.offsets().len()] } else { faddeev_g_offsets(&lat, lambda, e)? };
    solve_faddeev_with_g(v, lambda, e, &g, &near, &GmresOptions::default())
}

/// ψ⁺(·,k) for real k with k² = E.
pub fn solve_classical(v: &PotentialGrid, k: [f64; 2], e: Energy) -> Result<WaveField, ForwardError> {
    let km = ComplexMomentum { k1: C64::new(k[0], 0.0), k2: C64::new(k[1], 0.0) };
    ClassicalSolver::new(v, e).solve(km)
}

#[cfg(test)]
mod tests {
    use super::*;
    use potential_lab::{make_bump, DomainDescriptor};

    #[test]
    fn near_field_is_symmetric() {
        let nf = NearField::new(0.05, 5.0);
        for &((di, dj), c) in nf.iter() {
            for (a, b) in [(-di, dj), (di, -dj), (dj, di)] {
                assert!((nf.get(a, b).unwrap() - c).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_potential_gives_plane_waves_and_unit_mu() {
        let e = Energy::new(25.0).unwrap();
        let v = PotentialGrid::zeros(DomainDescriptor::unit_disk(), 16).unwrap();
        let psi = solve_classical(&v, [3.0, 4.0], e).unwrap();
        let lat = Lattice::of(&v);
        for (n, z) in psi.values.iter().enumerate() {
            let x = lat.node(n);
            assert_eq!(*z, C64::from_polar(1.0, 3.0 * x[0] + 4.0 * x[1]));
        }
        let mu = solve_faddeev(&v, SpectralPoint::new(C64::new(1.5, 0.5)).unwrap(), e).unwrap();
        assert!(mu.values.iter().all(|z| *z == C64::new(1.0, 0.0)));
    }

    #[test]
    fn classical_residual_small_for_bump() {
        let e = Energy::new(25.0).unwrap();
        let v = make_bump(DomainDescriptor::unit_disk(), 24, [0.1, 0.0], 0.8, 2.0).unwrap();
        let f = solve_classical(&v, [5.0, 0.0], e).unwrap();
        assert!(f.converged_ok());
    }

    impl WaveField {
        fn converged_ok(&self) -> bool {
            self.residual < 1e-11 && !self.flagged
        }
    }
}
