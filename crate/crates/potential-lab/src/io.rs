//! Grid persistence: `name.bin` (row-major little-endian f64) plus a JSON
//! sidecar `name.json` with `{nx, ny, spacing, origin, domain, q}`.

use std::fmt::Write as _;
use std::path::Path;

use scatter_numerics::tables;
use serde::{Deserialize, Serialize};

use crate::{DomainDescriptor, PotentialError, PotentialGrid};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSidecar {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
    pub origin: [f64; 2],
    pub domain: DomainDescriptor,
    pub q: f64,
}

/// Writes the grid and returns the SHA-256 of the binary payload.
pub fn write_grid(path: &Path, grid: &PotentialGrid) -> Result<String, PotentialError> {
    let side = GridSidecar {
        nx: grid.nx,
        ny: grid.ny,
        spacing: grid.spacing,
        origin: grid.origin,
        domain: grid.domain,
        q: grid.sup_norm(),
    };
    Ok(tables::write_f64(path, &grid.values, &side)?)
}

pub fn read_grid(path: &Path) -> Result<PotentialGrid, PotentialError> {
    let values = tables::read_f64(path)?;
    let side: GridSidecar = serde_json::from_value(tables::read_sidecar(path)?)
        .map_err(|e| PotentialError::Sidecar(e.to_string()))?;
    if side.nx * side.ny != values.len() {
        return Err(PotentialError::Sidecar(format!(
            "sidecar says {}x{} but table has {} values",
            side.nx,
            side.ny,
            values.len()
        )));
    }
    Ok(PotentialGrid {
        domain: side.domain,
        nx: side.nx,
        ny: side.ny,
        spacing: side.spacing,
        origin: side.origin,
        values,
    })
}

/// `x,y,v` rows for external plotting.
pub fn to_csv(grid: &PotentialGrid) -> String {
    let mut s = String::from("x,y,v\n");
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let p = grid.node(i, j);
            let _ = writeln!(s, "{},{},{}", p[0], p[1], grid.value(i, j));
        }
    }
    s
}
