//! Forward problem at fixed energy: the outgoing solutions ψ⁺, the Faddeev
//! solutions μ for complex momenta, and the scattering data
//!
//! * f(k,l) = (2π)^{-2}∫e^{−ily}v ψ⁺(y,k)dy for real k, l,
//! * h(k,l) = (2π)^{-2}∫e^{−ily}v ψ(y,k)dy on the contour,
//! * b(k) = h(k,−k̄) and u(λ) = χ(λ)b(λ)/λ̄ on the exterior λ-grid.

pub mod amplitude;
pub mod conv;
pub mod dataset;
pub mod nystrom;

pub use amplitude::{born_amplitude, faddeev_amplitude_b, faddeev_amplitude_h, scattering_amplitude_f};
pub use dataset::{build_dataset, default_spec, read_dataset, write_dataset, BuildReport, DatasetSpec, ScatteringDataset};
pub use nystrom::{solve_classical, solve_faddeev, ClassicalSolver, FieldKind, Lattice, WaveField};

pub use scatter_numerics::C64;

#[derive(Debug, thiserror::Error)]
pub enum ForwardError {
    #[error("momentum is off the energy shell: |k·k − E| = {0:e}")]
    OffShell(f64),
    #[error("linear solve did not converge: residual {residual:e}, condition estimate {cond:e}")]
    NotConverged { residual: f64, cond: f64 },
    #[error("exponent {exponent:.3} exceeds the cap {cap}")]
    ExponentCap { exponent: f64, cap: f64 },
    #[error("expected a {0} field")]
    WrongField(&'static str),
    #[error(transparent)]
    Green(#[from] green_kernels::GreenError),
    #[error("spectral: {0}")]
    Spectral(String),
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("checksum mismatch for {file}: manifest {expected}, found {found}")]
    Checksum { file: String, expected: String, found: String },
    #[error(transparent)]
    Table(#[from] scatter_numerics::tables::TableError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
