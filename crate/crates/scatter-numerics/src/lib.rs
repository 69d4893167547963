//! Small numerical toolbox shared across the scattering crates.
//!
//! Nothing here knows about scattering theory: Gauss-Legendre rules,
//! a restarted complex GMRES (single and lockstep-blocked) and a flat
//! little-endian table format with JSON sidecars and SHA-256 checksums.

pub mod gmres;
pub mod quadrature;
pub mod tables;

pub use num_complex::Complex64 as C64;

/// Imaginary unit, handy in formula-heavy code.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };
