//! X₁, X₂ for a single contour node ζ, and Ω₁ = X₁ + iX₂, Ω₂ = X₁ − iX₂.

use serde::{Deserialize, Serialize};

use crate::plane::CauchyPlane;
use crate::solve::{DbarSolver, GridSolution};
use crate::{DbarError, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    One,
    Two,
}

#[derive(Debug, Clone)]
pub struct XField {
    pub zeta: C64,
    pub which: Which,
    pub sol: GridSolution,
}

/// Unperturbed right-hand side 1/(2(ζ−λ)) or 1/(2i(ζ−λ)).
pub fn x_rhs(zeta: C64, which: Which, lambda: C64) -> C64 {
    let d = 2.0 * (zeta - lambda);
    match which {
        Which::One => 1.0 / d,
        Which::Two => 1.0 / (C64::new(0.0, 1.0) * d),
    }
}

pub fn solve_x(solver: &DbarSolver, zeta: C64, which: Which) -> Result<XField, DbarError> {
    let rhs: Vec<C64> = solver.plane.grid.nodes().iter().map(|&l| x_rhs(zeta, which, l)).collect();
    let sol = solver.solve(&rhs, 1)?.pop().expect("one column");
    Ok(XField { zeta, which, sol })
}

impl XField {
    /// X at any λ ≠ ζ, λ ≠ 0.
    pub fn at(&self, plane: &CauchyPlane, lambda: C64) -> C64 {
        let row = plane.row(lambda);
        x_rhs(self.zeta, self.which, lambda) + row.iter().zip(&self.sol.density).map(|(a, b)| a * b).sum::<C64>()
    }
}

pub fn omega1(x1: &XField, x2: &XField, plane: &CauchyPlane, lambda: C64) -> C64 {
    x1.at(plane, lambda) + C64::new(0.0, 1.0) * x2.at(plane, lambda)
}

pub fn omega2(x1: &XField, x2: &XField, plane: &CauchyPlane, lambda: C64) -> C64 {
    x1.at(plane, lambda) - C64::new(0.0, 1.0) * x2.at(plane, lambda)
}

/// Ω₁(λ'(1 − 0(|λ'| − 1)), ζ): values at λ'(1 − ε(|λ'| − 1)) for
/// ε = 2⁻³, …, 2⁻⁶, extrapolated to ε = 0 by a Richardson table in ε.
/// Fails when the successive extrapolants do not settle.
pub fn omega1_boundary_limit(x1: &XField, x2: &XField, plane: &CauchyPlane, lambda_prime: C64) -> Result<C64, DbarError> {
    let eps: Vec<f64> = (3..=6).map(|k| 0.5f64.powi(k)).collect();
    let r = lambda_prime.norm();
    let vals: Vec<C64> = eps.iter().map(|e| omega1(x1, x2, plane, lambda_prime * (1.0 - e * (r - 1.0)))).collect();
    // Neville table for a polynomial in ε evaluated at 0
    let mut t = vals.clone();
    let mut diag = vec![t[t.len() - 1]];
    for level in 1..t.len() {
        for i in (level..t.len()).rev() {
            let (a, b) = (eps[i - level], eps[i]);
            t[i] = (t[i] * a - t[i - 1] * b) / (a - b);
        }
        diag.push(t[t.len() - 1]);
    }
    let tail: Vec<f64> = diag.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let scale = vals.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let last = tail[tail.len() - 1];
    if last > 1e-2 * scale && last > tail[0] {
        return Err(DbarError::Extrapolation { tail });
    }
    Ok(diag[diag.len() - 1])
}
