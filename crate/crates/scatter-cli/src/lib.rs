//! Orchestration behind the `scatter` binary: configuration, the
//! subcommands, persistence, and the identity checks.

pub mod commands;
pub mod config;
pub mod verify;

pub use config::RunConfig;
pub use scatter_numerics::C64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("validation: {0}")]
    Validation(String),
    #[error("numerical: {0}")]
    Numerical(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    /// 2 validation, 3 numerical, 4 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<scatter_numerics::tables::TableError> for CliError {
    fn from(e: scatter_numerics::tables::TableError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<forward_scattering::ForwardError> for CliError {
    fn from(e: forward_scattering::ForwardError) -> Self {
        use forward_scattering::ForwardError as F;
        match e {
            F::Io(_) | F::Table(_) => CliError::Io(e.to_string()),
            F::Checksum { .. } | F::Dataset(_) | F::Json(_) | F::Spectral(_) | F::OffShell(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<rh_reconstruct::RhError> for CliError {
    fn from(e: rh_reconstruct::RhError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<nv_flow::NvError> for CliError {
    fn from(e: nv_flow::NvError) -> Self {
        match e {
            nv_flow::NvError::InvalidTime(_) => CliError::Validation(e.to_string()),
            nv_flow::NvError::Forward(f) => f.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<potential_lab::PotentialError> for CliError {
    fn from(e: potential_lab::PotentialError) -> Self {
        use potential_lab::PotentialError as P;
        match e {
            P::Io(_) | P::Table(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
