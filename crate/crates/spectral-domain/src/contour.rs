use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Energy, SpectralError, SpectralPoint, C64};

/// Outer radius C = ρ/√E + √((ρ/√E)² + 1); the inner circle has radius 1/C.
pub fn contour_radius(e: Energy, rho: f64) -> f64 {
    let t = rho / e.sqrt();
    t + (t * t + 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub energy: Energy,
    pub rho: f64,
    pub nodes_per_circle: usize,
}

impl ContourSpec {
    pub fn new(energy: Energy, rho: f64, nodes_per_circle: usize) -> Result<Self, SpectralError> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(SpectralError::InvalidContour(format!("rho must be positive, got {rho}")));
        }
        if nodes_per_circle < 8 || nodes_per_circle % 2 != 0 {
            return Err(SpectralError::InvalidContour(format!(
                "nodes_per_circle must be even and at least 8, got {nodes_per_circle}"
            )));
        }
        Ok(Self { energy, rho, nodes_per_circle })
    }

    pub fn radius(&self) -> f64 {
        contour_radius(self.energy, self.rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Outer,
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourNode {
    #[serde(with = "pair")]
    pub lambda: C64,
    /// dλ including orientation: trapezoidal weight times the unit tangent.
    #[serde(with = "pair")]
    pub weight: C64,
    pub component: Component,
}

mod pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::C64;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

/// Outer circle |λ| = C counterclockwise, then inner circle |λ| = 1/C
/// clockwise. Node j of either circle sits at angle 2πj/n, so the mirror
/// λ ↦ −1/λ̄ sends outer node j to inner node j + n/2 (mod n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralContour {
    pub spec: ContourSpec,
    pub nodes: Vec<ContourNode>,
}

pub fn build_contour(spec: ContourSpec) -> SpectralContour {
    let n = spec.nodes_per_circle;
    let c = spec.radius();
    let dt = 2.0 * PI / n as f64;
    let mut nodes = Vec::with_capacity(2 * n);
    for (radius, sign, component) in [(c, 1.0, Component::Outer), (1.0 / c, -1.0, Component::Inner)] {
        for j in 0..n {
            let lambda = C64::from_polar(radius, j as f64 * dt);
            nodes.push(ContourNode {
                lambda,
                weight: C64::new(0.0, sign * dt) * lambda,
                component,
            });
        }
    }
    SpectralContour { spec, nodes }
}

impl SpectralContour {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn per_circle(&self) -> usize {
        self.spec.nodes_per_circle
    }

    pub fn radius(&self) -> f64 {
        self.spec.radius()
    }

    pub fn lambdas(&self) -> Vec<C64> {
        self.nodes.iter().map(|n| n.lambda).collect()
    }

    pub fn weights(&self) -> Vec<C64> {
        self.nodes.iter().map(|n| n.weight).collect()
    }

    pub fn point(&self, idx: usize) -> SpectralPoint {
        SpectralPoint::new(self.nodes[idx].lambda).expect("contour nodes are nonzero")
    }

    /// Index of the node at −1/λ̄.
    pub fn mirror_index(&self, idx: usize) -> usize {
        let n = self.per_circle();
        let j = (idx % n + n / 2) % n;
        if idx < n {
            n + j
        } else {
            j
        }
    }

    /// Node angle θ_j of the node.
    pub fn angle(&self, idx: usize) -> f64 {
        2.0 * PI * (idx % self.per_circle()) as f64 / self.per_circle() as f64
    }

    /// Same nodes with both circles traversed the wrong way round. Only for
    /// negative controls of orientation-sensitive identities.
    pub fn misoriented(&self) -> Self {
        let mut out = self.clone();
        out.nodes.iter_mut().for_each(|n| n.weight = -n.weight);
        out
    }

    /// Contour dump: header plus node list.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "header": {
                "E": self.spec.energy.value(),
                "rho": self.spec.rho,
                "C": self.radius(),
                "nodes_per_circle": self.per_circle(),
            },
            "nodes": self.nodes,
        })
    }
}

/// χ = 1 iff (√E/2)·||λ| − 1/|λ|| ≥ ρ, i.e. λ lies outside the open annulus Λ.
/// Boundary points count as outside; the comparison carries a relative slack
/// of a few ulps so that nodes placed exactly on ∂Λ are classified as such.
pub fn chi_indicator(lambda: SpectralPoint, spec: &ContourSpec) -> bool {
    let r = lambda.value().norm();
    // |r − 1/r| is invariant under r ↦ 1/r; evaluate on the ≥ 1 side
    let s = if r >= 1.0 { r } else { 1.0 / r };
    0.5 * spec.energy.sqrt() * (s - 1.0 / s) >= spec.rho * (1.0 - 1e-13)
}
