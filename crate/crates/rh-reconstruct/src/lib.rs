//! From scattering data to the potential: for each x the jump K = μ⁺ − μ on
//! ∂Λ solves a second-kind system built from R(x,λ,ζ) = e^{i(k(ζ)−k(λ))x}W h
//! and the generalised Cauchy integral of the dbar side; μ' at a probe λ far
//! from Λ then gives v̂ = (Δμ' + 2ik·∇μ')/μ'.

pub mod det;
pub mod jump;
pub mod recover;
pub mod system;

pub use det::{fredholm_det, unwrap_log_path, FredholmDet};
pub use jump::{neumann, solve_jump, solve_point, JumpSolution, PointSolution};
pub use recover::{recover_potential, reconstruct_field, reconstruct_mu, default_probes, PotentialEstimate, ReconstructionField, SweepOptions, XGrid};
pub use system::{assemble_system, RhSetup, RHSystem};

pub use scatter_numerics::C64;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum RhError {
    #[error(transparent)]
    Dbar(#[from] dbar_machinery::DbarError),
    #[error("phase factor e^{exponent} in R exceeds the cap e^{cap}")]
    ExponentCap { exponent: f64, cap: f64 },
    #[error("jump system is singular at x = {x:?}: smallest singular value ratio {ratio:e}")]
    Singular { x: [f64; 2], ratio: f64 },
    #[error("jump iteration did not converge at x = {x:?}: residual {residual:e}")]
    NotConverged { x: [f64; 2], residual: f64 },
    #[error("kernel tables: {0}")]
    Kernel(String),
}
