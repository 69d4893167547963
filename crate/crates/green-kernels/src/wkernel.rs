//! The kernel W(λ,ς) on the two-circle boundary ∂Λ.
//!
//! W = (i/2)(s/ς)[ln w₁ − ln w₂] + H, s = sgn(|λ|²−1),
//!   w₁ = (ς − λ)/(ς − λ/|λ|),  w₂ = (−1/ς − λ̄)/(−1/ς − λ̄/|λ|),
//! and H the Heaviside-weighted Cauchy integral over the unit circle, which
//! reduces to a Cauchy integral over the half circle α ∈ (φ−π, φ) for |λ| > 1
//! and α ∈ (φ, φ+π) for |λ| < 1, φ = arg λ.
//!
//! The ln w₂ term carries the factor −1/ς: it arises from the conjugate
//! Cauchy integral through ς ↦ −1/ς̄, under which (1/ς̄)dς̄ becomes −dς/ς and
//! the orientation of ∂Λ flips. With this factor the contour integral of W
//! against plane waves reproduces G − G⁺ (checked in the tests).
//!
//! ln w₁ blows up logarithmically at ς = λ and ln w₂ at ς = −1/λ̄; both lie on
//! a contour circle. [`WMatrix`] integrates these with a product rule.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use spectral_domain::{SpectralContour, SpectralPoint};

use crate::faddeev::phase;
use crate::{GreenError, C64};

/// How the unit-circle Heaviside term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeavisideMode {
    /// Closed form of the half-circle Cauchy integral.
    Exact,
    /// Trapezoidal rule on n unit-circle nodes, θ(0) = 1/2.
    Discrete(usize),
}

fn sgn(l: C64) -> f64 {
    if l.norm_sqr() > 1.0 {
        1.0
    } else {
        -1.0
    }
}

/// Principal log with the branch condition |Im ln w| < π enforced.
/// Returns the log and the margin π − |arg w|.
fn checked_ln(w: C64, which: u8) -> Result<(C64, f64), GreenError> {
    if w.norm() < 1e-12 || !w.is_finite() {
        return Err(GreenError::CoincidentPoints);
    }
    let arg = w.arg();
    let margin = PI - arg.abs();
    if w.re < 0.0 && w.im.abs() <= 1e-14 * w.norm() {
        return Err(GreenError::BranchViolation { which, margin });
    }
    Ok((C64::new(w.norm().ln(), arg), margin))
}

pub fn w1(lambda: C64, sigma: C64) -> C64 {
    (sigma - lambda) / (sigma - lambda / lambda.norm())
}

pub fn w2(lambda: C64, sigma: C64) -> C64 {
    let a = -1.0 / sigma;
    (a - lambda.conj()) / (a - lambda.conj() / lambda.norm())
}

/// ∫_{|η|=1} θ[s·i(|λ|η/λ − λ/(|λ|η))] / (2(ς − η)) |dη| in closed form.
pub fn heaviside_term(lambda: C64, sigma: C64) -> C64 {
    let phi = lambda.arg();
    let (a, b) = if sgn(lambda) > 0.0 { (phi - PI, phi) } else { (phi, phi + PI) };
    let one = C64::new(1.0, 0.0);
    let r = sigma.norm();
    let half = C64::new(0.0, 0.5);
    if r > 1.0 {
        // (1/(2ς))[π + iΔ ln(1 − e^{iα}/ς)]
        let d = (one - C64::from_polar(1.0, b) / sigma).ln() - (one - C64::from_polar(1.0, a) / sigma).ln();
        (C64::new(PI, 0.0) + C64::new(0.0, 1.0) * d) / (2.0 * sigma)
    } else {
        // (i/(2ς))Δ ln(1 − ς e^{−iα})
        let d = (one - sigma * C64::from_polar(1.0, -b)).ln() - (one - sigma * C64::from_polar(1.0, -a)).ln();
        half * d / sigma
    }
}

/// The same integral by the trapezoidal rule on n equispaced unit-circle nodes.
pub fn heaviside_term_discrete(lambda: C64, sigma: C64, n: usize) -> C64 {
    let phi = lambda.arg();
    let s = sgn(lambda);
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        let alpha = TAU * j as f64 / n as f64;
        // s·i(e^{i(α−φ)} − e^{−i(α−φ)}) = −2s·sin(α−φ)
        let arg = -2.0 * s * (alpha - phi).sin();
        let theta = if arg.abs() < 1e-14 {
            0.5
        } else if arg > 0.0 {
            1.0
        } else {
            0.0
        };
        if theta > 0.0 {
            acc += theta / (2.0 * (sigma - C64::from_polar(1.0, alpha)));
        }
    }
    acc * (TAU / n as f64)
}

/// Pointwise W(λ,ς) with the branch margin min(π − |arg w₁|, π − |arg w₂|).
/// Fails on the log singularities ς = λ and ς = −1/λ̄.
pub fn w_kernel_checked(lambda: SpectralPoint, sigma: SpectralPoint, mode: HeavisideMode) -> Result<(C64, f64), GreenError> {
    let (l, s) = (lambda.value(), sigma.value());
    if (l.norm() - 1.0).abs() < 1e-12 || (s.norm() - 1.0).abs() < 1e-12 {
        return Err(GreenError::UnitCircle(if (l.norm() - 1.0).abs() < 1e-12 { l } else { s }));
    }
    let (ln1, m1) = checked_ln(w1(l, s), 1)?;
    let (ln2, m2) = checked_ln(w2(l, s), 2)?;
    let h = match mode {
        HeavisideMode::Exact => heaviside_term(l, s),
        HeavisideMode::Discrete(n) => heaviside_term_discrete(l, s, n),
    };
    let v = C64::new(0.0, 0.5 * sgn(l)) * (ln1 - ln2) / s + h;
    Ok((v, m1.min(m2)))
}

pub fn w_kernel(lambda: SpectralPoint, sigma: SpectralPoint, mode: HeavisideMode) -> Result<C64, GreenError> {
    w_kernel_checked(lambda, sigma, mode).map(|(v, _)| v)
}

/// Product weights for ∫₀^{2π} ln(1 − e^{∓i(t−s)})F(t)dt ≈ Σ_j q(t_j − s)F(t_j)
/// with F replaced by its trigonometric interpolant on n equispaced nodes
/// (Nyquist mode split evenly). `minus` selects ln(1 − e^{−iτ}).
fn log_weight(tau: f64, n: usize, minus: bool) -> C64 {
    let half = n / 2;
    let step = C64::from_polar(1.0, if minus { -tau } else { tau });
    let mut p = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for m in 1..=half {
        p *= step;
        let c = if m == half { 0.5 } else { 1.0 };
        acc += p * (c / m as f64);
    }
    -acc * (TAU / n as f64)
}

/// Quadrature weights ω_j(λ) with ∫_{∂Λ} W(λ,ς)F(ς)dς ≈ Σ_j ω_j F(ς_j) for
/// smooth F, λ anywhere on ∂Λ (not necessarily a node).
pub fn w_row(lambda: C64, contour: &SpectralContour, mode: HeavisideMode) -> Result<(Vec<C64>, f64), GreenError> {
    let n = contour.per_circle();
    let c = contour.radius();
    let lr = lambda.norm();
    if ((lr - c).abs() > 1e-9 * c) && ((lr - 1.0 / c).abs() > 1e-9 / c) {
        return Err(GreenError::NotOnContour(lambda));
    }
    let outer_l = lr > 1.0;
    let s_ang = lambda.arg();
    let l0 = lambda / lr;
    let sg = if outer_l { 1.0 } else { -1.0 };
    let scale = n as f64 / TAU;
    let mut row = Vec::with_capacity(2 * n);
    let mut margin = PI;
    for (j, node) in contour.nodes.iter().enumerate() {
        let sigma = node.lambda;
        let outer_s = j < n;
        let t = contour.angle(j);
        let tau = t - s_ang;
        let a = -1.0 / sigma;
        let one = C64::new(1.0, 0.0);
        let lnlr = C64::new(lr.ln(), 0.0);
        let (ln1, ln2);
        if outer_l == outer_s {
            // ln w₁ singular at ς = λ
            ln1 = if outer_l {
                -(one - l0 / sigma).ln() + log_weight(tau, n, true) * scale
            } else {
                lnlr - (one - sigma / l0).ln() + log_weight(tau, n, false) * scale
            };
            let (v, m) = checked_ln(w2(lambda, sigma), 2)?;
            margin = margin.min(m);
            ln2 = v;
        } else {
            // ln w₂ singular at ς = −1/λ̄
            ln2 = if outer_l {
                -(one - l0.conj() / a).ln() + log_weight(tau - PI, n, false) * scale
            } else {
                lnlr - (one - a / l0.conj()).ln() + log_weight(tau - PI, n, true) * scale
            };
            let (v, m) = checked_ln(w1(lambda, sigma), 1)?;
            margin = margin.min(m);
            ln1 = v;
        }
        let h = match mode {
            HeavisideMode::Exact => heaviside_term(lambda, sigma),
            HeavisideMode::Discrete(m) => heaviside_term_discrete(lambda, sigma, m),
        };
        let w = C64::new(0.0, 0.5 * sg) * (ln1 - ln2) / sigma + h;
        row.push(w * node.weight);
    }
    Ok((row, margin))
}

/// Node matrix ω_ij with ∫_{∂Λ} W(λ_i,ς)F(ς)dς ≈ Σ_j ω_ij F(ς_j), row-major
/// over 2n × 2n contour nodes.
#[derive(Debug, Clone)]
pub struct WMatrix {
    pub size: usize,
    pub omega: Vec<C64>,
    /// Smallest π − |arg wᵢ| over all non-singular node pairs.
    pub branch_margin: f64,
}

impl WMatrix {
    pub fn build(contour: &SpectralContour, mode: HeavisideMode) -> Result<Self, GreenError> {
        let m = contour.len();
        let mut omega = Vec::with_capacity(m * m);
        let mut margin = PI;
        for node in &contour.nodes {
            let (row, mg) = w_row(node.lambda, contour, mode)?;
            margin = margin.min(mg);
            omega.extend(row);
        }
        Ok(Self { size: m, omega, branch_margin: margin })
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.omega[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.omega[i * self.size..(i + 1) * self.size]
    }
}

/// Pointwise branch sweep over all node pairs except the singular ones.
/// Returns (violations, smallest margin).
pub fn branch_sweep(contour: &SpectralContour) -> (usize, f64) {
    let mut bad = 0;
    let mut margin = PI;
    for (i, a) in contour.nodes.iter().enumerate() {
        for (j, b) in contour.nodes.iter().enumerate() {
            let mirror = contour.mirror_index(i) == j;
            for (which, w) in [(1u8, w1(a.lambda, b.lambda)), (2u8, w2(a.lambda, b.lambda))] {
                if (which == 1 && i == j) || (which == 2 && mirror) {
                    continue;
                }
                match checked_ln(w, which) {
                    Ok((_, m)) => margin = margin.min(m),
                    Err(_) => bad += 1,
                }
            }
        }
    }
    (bad, margin)
}

/// (2π)^{-2}∫_{∂Λ} W(λ,ς)e^{i(√E/2)(ςz̄ + z/ς)}dς, which equals
/// G(x,k(λ)) − G⁺(x) for λ on ∂Λ.
pub fn green_diff_contour(x: [f64; 2], lambda: SpectralPoint, contour: &SpectralContour) -> Result<C64, GreenError> {
    let (row, _) = w_row(lambda.value(), contour, HeavisideMode::Exact)?;
    let sqrt_e = contour.spec.energy.sqrt();
    let z = C64::new(x[0], x[1]);
    let i = C64::new(0.0, 1.0);
    let s: C64 = row
        .iter()
        .zip(&contour.nodes)
        .map(|(w, n)| w * (i * phase(sqrt_e, z, n.lambda)).exp())
        .sum();
    Ok(s / (TAU * TAU))
}

/// Unit-circle limit (πi/(2π)²)∫_T e^{i(√E/2)(ςz̄ + z/ς)}θ[…]|dς| by the
/// trapezoidal rule with n nodes, θ(0) = 1/2; `outer` selects the side.
pub fn unit_circle_limit_trapezoid(x: [f64; 2], phi: f64, outer: bool, sqrt_e: f64, n: usize) -> C64 {
    let z = C64::new(x[0], x[1]);
    let s = if outer { 1.0 } else { -1.0 };
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        let alpha = TAU * j as f64 / n as f64;
        let arg = -2.0 * s * (alpha - phi).sin();
        let theta = if arg.abs() < 1e-14 {
            0.5
        } else if arg > 0.0 {
            1.0
        } else {
            0.0
        };
        acc += (C64::new(0.0, 1.0) * phase(sqrt_e, z, C64::from_polar(1.0, alpha))).exp() * theta;
    }
    acc * C64::new(0.0, PI / (TAU * TAU)) * (TAU / n as f64)
}
