//! The dbar side of the reconstruction: the coefficient r(x,λ), the plane
//! Cauchy transform on the exterior λ-grid, and the real-linear equations
//!
//! * e = 1 − (1/π)∫ r ē/(ζ−λ),
//! * X_j + (1/π)∫ r X̄_j/(η−λ) = 1/(2(ζ−λ)) or 1/(2i(ζ−λ)),
//!
//! with Ω₁ = X₁ + iX₂, Ω₂ = X₁ − iX₂. The plane integrals run over the
//! grid, i.e. over 1/C_max ≤ |λ| ≤ C_max outside Λ; r is taken as zero
//! beyond.

pub mod cell;
pub mod context;
pub mod contour_cauchy;
pub mod plane;
pub mod rcoef;
pub mod solve;
pub mod xfield;

pub use cell::cell_cauchy;
pub use context::{DbarContext, DbarSolution, TraceValues};
pub use contour_cauchy::{Approach, ContourCauchy};
pub use plane::{CauchyPlane, TargetRows};
pub use rcoef::{build_r, r_from_u, RCoefficient};
pub use solve::{DbarSolver, GridSolution};
pub use xfield::{omega1, omega1_boundary_limit, omega2, solve_x, x_rhs, Which, XField};

pub use scatter_numerics::C64;

/// Exponent p of the L_{p,2} norms.
pub const NORM_P: f64 = 3.0;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum DbarError {
    #[error("dbar solve did not converge: residual {residual:e} with r0 = {r0:e}")]
    NotConverged { residual: f64, r0: f64 },
    #[error("boundary-limit extrapolation did not settle: tail {tail:?}")]
    Extrapolation { tail: Vec<f64> },
}
