//! Experimental: Novikov-Veselov time dependence through the scattering
//! data. The data evolve by explicit phases, the reconstruction is re-run at
//! each time, and zeros of det A(x,s,t) are mapped as candidate blow-up
//! points. A potential reconstructed from evolved data is a candidate
//! solution only; `residual` measures how well it satisfies the equation.

pub mod evolve;
pub mod residual;
pub mod scan;

pub use evolve::{b_phase, evolve_data, evolve_data_capped, f_phase, h_exponent, EvolvedDataset, PhaseReport, DEFAULT_PHASE_CAP};
pub use residual::{nv_residual, NvResidual, SpectralPlane};
pub use scan::{blowup_scan, det_field, regions, scan_datasets, sign_changes, FlaggedRegion, Part, ScanOptions, SignChange, SliceReport, ZeroSetReport};

pub use scatter_numerics::C64;

#[derive(Debug, thiserror::Error)]
pub enum NvError {
    #[error("time must be finite, got {0}")]
    InvalidTime(f64),
    #[error("h phase at t = {t}: exponent {max_exponent:.3} exceeds the cap {cap} for {rejected} node pairs")]
    PhaseCap { t: f64, max_exponent: f64, cap: f64, rejected: usize },
    #[error(transparent)]
    Forward(#[from] forward_scattering::ForwardError),
    #[error(transparent)]
    Rh(#[from] rh_reconstruct::RhError),
    #[error(transparent)]
    Potential(#[from] potential_lab::PotentialError),
}
