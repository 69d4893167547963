use serde::{Deserialize, Serialize};

use crate::{SpectralError, C64};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Energy(f64);

impl Energy {
    pub fn new(e: f64) -> Result<Self, SpectralError> {
        if e > 0.0 && e.is_finite() {
            Ok(Self(e))
        } else {
            Err(SpectralError::NonPositiveEnergy(e))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn sqrt(self) -> f64 {
        self.0.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpectralPoint(C64);

impl SpectralPoint {
    pub fn new(lambda: C64) -> Result<Self, SpectralError> {
        if lambda.norm() > 0.0 && lambda.is_finite() {
            Ok(Self(lambda))
        } else {
            Err(SpectralError::ZeroLambda)
        }
    }

    pub fn value(self) -> C64 {
        self.0
    }

    /// The inversion λ ↦ −1/λ̄, under which k ↦ −k̄.
    pub fn mirror(self) -> Self {
        Self(-1.0 / self.0.conj())
    }
}

/// k = (k₁, k₂) ∈ ℂ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexMomentum {
    pub k1: C64,
    pub k2: C64,
}

impl ComplexMomentum {
    /// k·k (bilinear, no conjugation).
    pub fn square(&self) -> C64 {
        self.k1 * self.k1 + self.k2 * self.k2
    }

    /// k·x for real x.
    pub fn dot(&self, x: [f64; 2]) -> C64 {
        self.k1 * x[0] + self.k2 * x[1]
    }

    pub fn re(&self) -> [f64; 2] {
        [self.k1.re, self.k2.re]
    }

    pub fn im(&self) -> [f64; 2] {
        [self.k1.im, self.k2.im]
    }

    pub fn conj(&self) -> Self {
        Self { k1: self.k1.conj(), k2: self.k2.conj() }
    }
}

impl std::ops::Neg for ComplexMomentum {
    type Output = Self;
    fn neg(self) -> Self {
        Self { k1: -self.k1, k2: -self.k2 }
    }
}

/// k₁ = (λ + 1/λ)√E/2, k₂ = (1/λ − λ)i√E/2.
pub fn lambda_to_k(lambda: SpectralPoint, e: Energy) -> ComplexMomentum {
    let l = lambda.value();
    let inv = 1.0 / l;
    let h = 0.5 * e.sqrt();
    ComplexMomentum {
        k1: (l + inv) * h,
        k2: (inv - l) * C64::new(0.0, h),
    }
}

/// λ = (k₁ + ik₂)/√E, after checking k·k = E to relative tolerance `tol`.
pub fn k_to_lambda(k: ComplexMomentum, e: Energy, tol: f64) -> Result<SpectralPoint, SpectralError> {
    let dev = (k.square() - e.value()).norm();
    let scale = e.value() + k.k1.norm_sqr() + k.k2.norm_sqr();
    if dev > tol * scale {
        return Err(SpectralError::OffShell(dev));
    }
    SpectralPoint::new((k.k1 + C64::new(0.0, 1.0) * k.k2) / e.sqrt())
}
