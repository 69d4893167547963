use std::f64::consts::PI;

use forward_scattering::ScatteringDataset;
use serde::{Deserialize, Serialize};
use spectral_domain::{lambda_to_k, Energy, ExteriorGrid, SpectralPoint};

use crate::C64;

/// r(x,λ) = π·sgn(|λ|²−1)·e^{−2i Re k(λ)·x}·u(λ) on the exterior grid.
///
/// The factor π·sgn is what differentiating the Faddeev equation in λ̄
/// produces (∂̄μ = r·μ̄); it is checked against finite differences of the
/// forward solver. |r| = π|u| for every x.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RCoefficient {
    pub x: [f64; 2],
    pub values: Vec<C64>,
}

pub fn r_from_u(grid: &ExteriorGrid, u: &[C64], e: Energy, x: [f64; 2]) -> RCoefficient {
    assert_eq!(u.len(), grid.len());
    let values = (0..grid.len())
        .map(|idx| {
            let l = grid.node(idx);
            let k = lambda_to_k(SpectralPoint::new(l).expect("grid nodes are nonzero"), e);
            let sg = if l.norm() > 1.0 { PI } else { -PI };
            let phase = -2.0 * (k.k1.re * x[0] + k.k2.re * x[1]);
            u[idx] * C64::from_polar(sg, phase)
        })
        .collect();
    RCoefficient { x, values }
}

pub fn build_r(ds: &ScatteringDataset, x: [f64; 2]) -> RCoefficient {
    r_from_u(&ds.exterior, &ds.u, ds.energy(), x)
}

impl RCoefficient {
    /// r₀ = ‖r(x,·)‖_{L_{p,2}}, independent of x.
    pub fn r0(&self, grid: &ExteriorGrid, p: f64) -> f64 {
        grid.lp2_norm(&self.values, p)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| *z == C64::new(0.0, 0.0))
    }
}
