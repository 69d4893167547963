//! Real, bounded, compactly supported potentials on a uniform Cartesian grid.
//!
//! Grid nodes sit at cell centres of an `nx × ny` subdivision of the domain's
//! bounding box, so the midpoint rule `h² Σ v_ij` is the natural quadrature
//! and the grid never samples the boundary of the box itself.

mod domain;
mod grid;
pub mod io;

pub use domain::{compute_l, DomainDescriptor, Shape};
pub use grid::{make_bump, PotentialFamily, PotentialGrid, PotentialKind, PotentialSpec};

#[derive(Debug, thiserror::Error)]
pub enum PotentialError {
    #[error("potential support (centre {center:?}, radius {radius}) leaves the domain")]
    SupportViolation { center: [f64; 2], radius: f64 },
    #[error("scaling parameter {s} outside the admissible interval (-{s1}, {s1})")]
    ScaleOutOfRange { s: f64, s1: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Table(#[from] scatter_numerics::tables::TableError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed sidecar: {0}")]
    Sidecar(String),
}
