//! Green's functions of −Δ − E in the plane and the boundary kernel W.
//!
//! * [`classical`]: G⁺(x) = −(i/4)H₀⁽¹⁾(√E|x|), exact cell integrals and c₀.
//! * [`faddeev`]: G(x,k(λ)) and g = G·e^{−ik(λ)x} for |λ| ≠ 1.
//! * [`wkernel`]: W(λ,ς) on ∂Λ, its product-quadrature node matrix and the
//!   contour representation of G − G⁺.

pub mod bessel;
pub mod classical;
pub mod faddeev;
pub mod table;
pub mod wkernel;

pub use classical::{calibrate_c0, cell_integral_classical, green_classical};
pub use faddeev::{diagonal_difference, green_difference, green_faddeev, green_faddeev_g, green_faddeev_g_ray};
pub use wkernel::{green_diff_contour, w_kernel, HeavisideMode, WMatrix};

pub use scatter_numerics::C64;

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum GreenError {
    #[error("Green's function is singular at x = 0")]
    SingularArgument,
    #[error("λ = {0} lies on the unit circle, where g is undefined")]
    UnitCircle(C64),
    #[error("λ = {0} is not on the contour")]
    NotOnContour(C64),
    #[error("logarithmic singularity of W at coincident or mirrored points")]
    CoincidentPoints,
    #[error("branch condition |Im ln w{which}| < π violated (margin {margin:e})")]
    BranchViolation { which: u8, margin: f64 },
    #[error("ray radii must be increasing and exceed 1")]
    InvalidRay,
    #[error("kernel table: {0}")]
    Table(String),
}
