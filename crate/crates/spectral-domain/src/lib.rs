//! The energy sphere Σ_E = {k ∈ ℂ² : k·k = E} parameterized by λ ∈ ℂ∖0,
//! the annulus Λ_{E,ρ} where |Im k| < ρ, its two-circle boundary and the
//! polar λ-grid that covers the complement of Λ.

mod bounds;
mod contour;
mod momentum;
mod plane;

pub use bounds::{apriori_bounds, auto_rho, bounds_from_i1, i1_domain, AprioriBounds};
pub use contour::{build_contour, chi_indicator, contour_radius, Component, ContourNode, ContourSpec, SpectralContour};
pub use momentum::{k_to_lambda, lambda_to_k, ComplexMomentum, Energy, SpectralPoint};
pub use plane::{Cell, ExteriorGrid, ExteriorGridSpec};

pub use scatter_numerics::C64;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SpectralError {
    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error("spectral parameter must be nonzero")]
    ZeroLambda,
    #[error("momentum is off the energy sphere: |k·k − E| = {0:e}")]
    OffShell(f64),
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
