//! Run configuration: one JSON document, every field optional with the
//! defaults below.

use forward_scattering::{default_spec, DatasetSpec};
use potential_lab::{DomainDescriptor, PotentialGrid, PotentialKind, PotentialSpec};
use serde::{Deserialize, Serialize};
use spectral_domain::{apriori_bounds, auto_rho, Energy};

use crate::CliError;

/// Smallest accepted resolutions.
pub const MIN_LATTICE: usize = 8;
pub const MIN_NODES: usize = 8;
pub const MIN_THETA: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rho {
    Value(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExteriorConfig {
    pub n_rings: usize,
    pub n_theta: usize,
    /// Outer edge of the λ-grid in units of the contour radius.
    pub c_max_factor: f64,
}

impl Default for ExteriorConfig {
    fn default() -> Self {
        Self { n_rings: 24, n_theta: 64, c_max_factor: 8.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative residual of the matrix-free jump solve.
    pub jump: f64,
    /// Lemma relation between ψ and ψ⁺ (max over nodes, relative).
    pub lemma: f64,
    /// Finite-difference dbar identities at step 1e-3.
    pub dbar: f64,
    /// Two-path contour representation of G − G⁺.
    pub green_two_path: f64,
    /// Jump against the forward μ⁺ − μ, relative L².
    pub jump_oracle: f64,
    /// Direct against successive approximations.
    pub neumann: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { jump: 1e-10, lemma: 1e-3, dbar: 1e-3, green_two_path: 1e-3, jump_oracle: 1e-2, neumann: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NvConfig {
    pub t_grid: Vec<f64>,
    /// Scales of the potential; empty means the dataset as given (s = 1).
    pub s_grid: Vec<f64>,
    pub threshold: f64,
    /// Lattice stride of the x-grid of the scan.
    pub x_stride: usize,
    pub phase_cap: f64,
    /// Step of the centred t-difference for the residual; 0 skips it.
    pub residual_dt: f64,
}

impl Default for NvConfig {
    fn default() -> Self {
        Self { t_grid: vec![0.0], s_grid: vec![], threshold: 1e-3, x_stride: 8, phase_cap: nv_flow::DEFAULT_PHASE_CAP, residual_dt: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub energy: f64,
    pub rho: Rho,
    /// Sup-norm bound q for the a-priori bounds; defaults to ‖v‖∞.
    pub q: Option<f64>,
    /// Kernel constant of the decay bound of G⁺.
    pub c0: f64,
    /// Lower bound of the automatic ρ as a fraction of √E.
    pub rho_floor_fraction: f64,
    pub nodes_per_circle: usize,
    pub potential: PotentialSpec,
    pub exterior: ExteriorConfig,
    pub f_angles: usize,
    /// Probe points λ for μ'; empty means 4C·{1, i, −1, −i}.
    pub probes: Vec<[f64; 2]>,
    /// Lattice stride of the reconstruction grid.
    pub stride: usize,
    /// Stride, within the reconstruction grid, of the det A samples.
    pub det_stride: usize,
    pub exponent_cap: f64,
    pub tolerances: Tolerances,
    pub nv: NvConfig,
    /// Seed for the sampled checks of `verify`.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            energy: 25.0,
            rho: Rho::Auto(AutoTag::Auto),
            q: None,
            c0: 1.0,
            rho_floor_fraction: 0.2,
            nodes_per_circle: 64,
            potential: PotentialSpec {
                domain: DomainDescriptor::unit_disk(),
                n: 64,
                kind: PotentialKind::Bump { center: [0.15, -0.1], radius: 0.8, amplitude: 0.1 },
            },
            exterior: ExteriorConfig::default(),
            f_angles: 16,
            probes: vec![],
            stride: 2,
            det_stride: 4,
            exponent_cap: 30.0,
            tolerances: Tolerances::default(),
            nv: NvConfig::default(),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: Self = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        if !(self.energy > 0.0 && self.energy.is_finite()) {
            return bad(format!("energy must be positive, got {}", self.energy));
        }
        if let Rho::Value(r) = self.rho {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("rho must be positive, got {r}"));
            }
        }
        if self.nodes_per_circle < MIN_NODES || self.nodes_per_circle % 2 != 0 {
            return bad(format!("nodes_per_circle must be even and at least {MIN_NODES}"));
        }
        if self.potential.n < MIN_LATTICE {
            return bad(format!("potential.n must be at least {MIN_LATTICE}"));
        }
        if self.exterior.n_rings < 1 || self.exterior.n_theta < MIN_THETA || !(self.exterior.c_max_factor > 1.0) {
            return bad(format!("exterior grid needs n_rings ≥ 1, n_theta ≥ {MIN_THETA} and c_max_factor > 1"));
        }
        if self.stride < 1 || self.nv.x_stride < 1 {
            return bad("strides must be at least 1".into());
        }
        if self.probes.iter().any(|p| p[0] == 0.0 && p[1] == 0.0) {
            return bad("probe λ = 0 is not admissible".into());
        }
        if !(self.nv.threshold > 0.0) || self.nv.t_grid.iter().chain(&self.nv.s_grid).any(|t| !t.is_finite()) {
            return bad("nv: threshold must be positive and grids finite".into());
        }
        Ok(())
    }

    pub fn energy(&self) -> Energy {
        Energy::new(self.energy).expect("validated")
    }

    pub fn build_potential(&self) -> Result<PotentialGrid, CliError> {
        self.potential.build().map_err(|e| CliError::Validation(e.to_string()))
    }

    /// ρ with "auto" resolved: 1.05·ρ₁(q, D, E) from the configured c₀, but
    /// at least `rho_floor_fraction`·√E.
    pub fn resolve_rho(&self, v: &PotentialGrid) -> f64 {
        match self.rho {
            Rho::Value(r) => r,
            Rho::Auto(_) => {
                let q = self.q.unwrap_or_else(|| v.sup_norm());
                let b = apriori_bounds(q, &self.potential.domain, self.energy(), 1.0, self.c0);
                auto_rho(b.rho1, self.energy(), self.rho_floor_fraction)
            }
        }
    }

    pub fn dataset_spec(&self, rho: f64) -> Result<DatasetSpec, CliError> {
        let mut s = default_spec(self.energy(), rho, self.nodes_per_circle, self.exterior.n_rings, self.exterior.n_theta)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        s.exterior.c_max_factor = self.exterior.c_max_factor;
        s.f_angles = self.f_angles;
        s.exponent_cap = self.exponent_cap;
        Ok(s)
    }
}
