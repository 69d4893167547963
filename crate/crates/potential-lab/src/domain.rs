use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    Disk { center: [f64; 2], radius: f64 },
    Rectangle { min: [f64; 2], max: [f64; 2] },
}

/// The open bounded set D that contains the support of every potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainDescriptor {
    pub shape: Shape,
}

impl DomainDescriptor {
    pub fn disk(center: [f64; 2], radius: f64) -> Self {
        assert!(radius > 0.0, "disk radius must be positive");
        Self { shape: Shape::Disk { center, radius } }
    }

    pub fn rectangle(min: [f64; 2], max: [f64; 2]) -> Self {
        assert!(max[0] > min[0] && max[1] > min[1], "degenerate rectangle");
        Self { shape: Shape::Rectangle { min, max } }
    }

    pub fn unit_disk() -> Self {
        Self::disk([0.0, 0.0], 1.0)
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match self.shape {
            Shape::Disk { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Shape::Rectangle { min, max } => (min, max),
        }
    }

    /// Closed-set membership.
    pub fn contains(&self, x: [f64; 2]) -> bool {
        match self.shape {
            Shape::Disk { center, radius } => {
                (x[0] - center[0]).hypot(x[1] - center[1]) <= radius
            }
            Shape::Rectangle { min, max } => {
                x[0] >= min[0] && x[0] <= max[0] && x[1] >= min[1] && x[1] <= max[1]
            }
        }
    }

    /// True when the closed disk of radius `r` about `c` lies in the closure of D.
    pub fn contains_disk(&self, c: [f64; 2], r: f64) -> bool {
        match self.shape {
            Shape::Disk { center, radius } => {
                (c[0] - center[0]).hypot(c[1] - center[1]) + r <= radius * (1.0 + 1e-12)
            }
            Shape::Rectangle { min, max } => {
                c[0] - r >= min[0] && c[0] + r <= max[0] && c[1] - r >= min[1] && c[1] + r <= max[1]
            }
        }
    }

    pub fn area(&self) -> f64 {
        match self.shape {
            Shape::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            Shape::Rectangle { min, max } => (max[0] - min[0]) * (max[1] - min[1]),
        }
    }

    /// Distance from an interior point `x` to ∂D along the unit direction `(c, s)`.
    /// Both shapes are convex, so the ray leaves D exactly once.
    pub fn ray_exit(&self, x: [f64; 2], dir: [f64; 2]) -> f64 {
        match self.shape {
            Shape::Disk { center, radius } => {
                let p = [x[0] - center[0], x[1] - center[1]];
                let b = p[0] * dir[0] + p[1] * dir[1];
                let c = p[0] * p[0] + p[1] * p[1] - radius * radius;
                let disc = (b * b - c).max(0.0);
                (-b + disc.sqrt()).max(0.0)
            }
            Shape::Rectangle { min, max } => {
                let mut t = f64::INFINITY;
                for a in 0..2 {
                    if dir[a] > 0.0 {
                        t = t.min((max[a] - x[a]) / dir[a]);
                    } else if dir[a] < 0.0 {
                        t = t.min((min[a] - x[a]) / dir[a]);
                    }
                }
                t.max(0.0)
            }
        }
    }

    /// L = max over ∂D of |x|.
    pub fn l_max(&self) -> f64 {
        compute_l(self)
    }
}

/// L = max_{x ∈ ∂D} |x|: |centre| + radius for a disk, farthest corner for a rectangle.
pub fn compute_l(domain: &DomainDescriptor) -> f64 {
    match domain.shape {
        Shape::Disk { center, radius } => center[0].hypot(center[1]) + radius,
        Shape::Rectangle { min, max } => {
            let xs = [min[0], max[0]];
            let ys = [min[1], max[1]];
            let mut best = 0.0f64;
            for x in xs {
                for y in ys {
                    best = best.max(x.hypot(y));
                }
            }
            best
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_for_reference_domains() {
        assert_eq!(compute_l(&DomainDescriptor::unit_disk()), 1.0);
        assert_eq!(compute_l(&DomainDescriptor::disk([1.0, 0.0], 1.0)), 2.0);
        let r = DomainDescriptor::rectangle([-1.0, -1.0], [2.0, 1.0]);
        assert!((compute_l(&r) - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ray_exit_from_centre_is_radius() {
        let d = DomainDescriptor::disk([0.5, -0.2], 2.0);
        for k in 0..8 {
            let a = k as f64 * 0.7;
            let t = d.ray_exit([0.5, -0.2], [a.cos(), a.sin()]);
            assert!((t - 2.0).abs() < 1e-14);
        }
        let r = DomainDescriptor::rectangle([-1.0, -1.0], [1.0, 1.0]);
        assert!((r.ray_exit([0.0, 0.0], [1.0, 0.0]) - 1.0).abs() < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.ray_exit([0.0, 0.0], [s, s]) - 2f64.sqrt()).abs() < 1e-14);
    }
}
