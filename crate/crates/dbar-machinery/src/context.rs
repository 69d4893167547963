//! Geometry shared by every x: the plane operator, contour Cauchy weights at
//! the grid nodes, at the contour (limit from inside Λ) and at probe points,
//! and the plane-transform rows for contour and probe targets.
//!
//! The generalised Cauchy integral
//! Φ_K(λ) = (1/2πi)∫Ω₁(λ,ζ)K(ζ)dζ − (1/2πi)∫Ω₂(λ,ζ)K̄(ζ)dζ̄
//! is evaluated without forming Ω₁, Ω₂: by construction of X₁, X₂ it is the
//! solution of Φ − T[rΦ̄] = C[K] with C[K] the plain Cauchy integral of K.

use spectral_domain::{ExteriorGrid, SpectralContour};

use crate::contour_cauchy::{Approach, ContourCauchy};
use crate::plane::{CauchyPlane, TargetRows};
use crate::rcoef::RCoefficient;
use crate::solve::{DbarSolver, GridSolution};
use crate::{DbarError, C64};

pub struct DbarContext {
    pub plane: CauchyPlane,
    pub contour: SpectralContour,
    pub cauchy: ContourCauchy,
    pub probes: Vec<C64>,
    /// N × 2n, row-major.
    grid_cauchy: Vec<C64>,
    /// 2n × 2n, boundary values from inside Λ.
    contour_cauchy: Vec<C64>,
    /// probes × 2n.
    probe_cauchy: Vec<C64>,
    pub contour_rows: TargetRows,
    pub probe_rows: TargetRows,
}

impl std::fmt::Debug for DbarContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DbarContext({:?}, {} contour nodes, {} probes)", self.plane, self.contour.len(), self.probes.len())
    }
}

fn matvec(mat: &[C64], cols: usize, v: &[C64]) -> Vec<C64> {
    mat.chunks(cols).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

impl DbarContext {
    pub fn new(grid: ExteriorGrid, contour: SpectralContour, probes: Vec<C64>) -> Self {
        let plane = CauchyPlane::new(grid);
        let cauchy = ContourCauchy::new(&contour);
        let grid_cauchy = cauchy.matrix(&plane.grid.nodes(), Approach::Off);
        let lambdas = contour.lambdas();
        let contour_cauchy = cauchy.matrix(&lambdas, Approach::FromInside);
        let probe_cauchy = cauchy.matrix(&probes, Approach::Off);
        let contour_rows = plane.rows(&lambdas);
        let probe_rows = plane.rows(&probes);
        Self { plane, contour, cauchy, probes, grid_cauchy, contour_cauchy, probe_cauchy, contour_rows, probe_rows }
    }

    pub fn nodes(&self) -> usize {
        self.contour.len()
    }

    pub fn solve(&self, r: &RCoefficient) -> Result<DbarSolution<'_>, DbarError> {
        DbarSolution::new(self, r)
    }
}

/// Values of a plane solution on ∂Λ (from inside Λ) and at the probes.
#[derive(Debug, Clone)]
pub struct TraceValues {
    pub contour: Vec<C64>,
    pub probes: Vec<C64>,
}

/// Everything that depends on x through r: e, and the map K ↦ Φ_K.
pub struct DbarSolution<'a> {
    pub ctx: &'a DbarContext,
    pub r: RCoefficient,
    pub r0: f64,
    pub e: GridSolution,
    pub e_trace: TraceValues,
}

impl<'a> DbarSolution<'a> {
    fn new(ctx: &'a DbarContext, r: &RCoefficient) -> Result<Self, DbarError> {
        let solver = DbarSolver::new(&ctx.plane, r);
        let e = solver.solve_e()?;
        let ones_c = vec![C64::new(1.0, 0.0); ctx.contour.len()];
        let ones_p = vec![C64::new(1.0, 0.0); ctx.probes.len()];
        let e_trace = TraceValues { contour: e.extend(&ctx.contour_rows, &ones_c), probes: e.extend(&ctx.probe_rows, &ones_p) };
        Ok(Self { ctx, r: r.clone(), r0: solver.r0, e, e_trace })
    }

    pub fn solver(&self) -> DbarSolver<'_> {
        DbarSolver::new(&self.ctx.plane, &self.r)
    }

    /// Φ_K on ∂Λ (inside limit) and at the probes, for m data vectors K
    /// (each of length 2n, column-major).
    pub fn phi(&self, ks: &[C64], m: usize) -> Result<Vec<TraceValues>, DbarError> {
        let nc = self.ctx.contour.len();
        assert_eq!(ks.len(), nc * m);
        let mut rhs = Vec::with_capacity(self.ctx.plane.len() * m);
        for c in 0..m {
            rhs.extend(matvec(&self.ctx.grid_cauchy, nc, &ks[c * nc..(c + 1) * nc]));
        }
        let sols = self.solver().solve(&rhs, m)?;
        Ok(sols
            .iter()
            .enumerate()
            .map(|(c, s)| {
                let k = &ks[c * nc..(c + 1) * nc];
                TraceValues {
                    contour: s.extend(&self.ctx.contour_rows, &matvec(&self.ctx.contour_cauchy, nc, k)),
                    probes: s.extend(&self.ctx.probe_rows, &matvec(&self.ctx.probe_cauchy, nc, k)),
                }
            })
            .collect())
    }
}
