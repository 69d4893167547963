use potential_lab::{make_bump, DomainDescriptor, PotentialFamily, PotentialGrid};
use proptest::prelude::*;
use scatter_numerics::quadrature::GaussLegendre;

fn radial_bump_integral(radius: f64) -> f64 {
    // 2π ∫_0^R r exp(1 − 1/(1 − r²/R²)) dr, the integrand is flat near r = R
    let gl = GaussLegendre::new(40);
    let val: f64 = gl.integrate_composite(0.0, radius, 64, |r| {
        let t = r * r / (radius * radius);
        if t >= 1.0 {
            0.0
        } else {
            r * (1.0 - 1.0 / (1.0 - t)).exp()
        }
    });
    2.0 * std::f64::consts::PI * val
}

#[test]
fn bump_mass_matches_radial_quadrature() {
    let radius = 0.8;
    let exact = radial_bump_integral(radius);
    let g = make_bump(DomainDescriptor::unit_disk(), 400, [0.0, 0.0], radius, 1.0).unwrap();
    assert!((g.integral() - exact).abs() < 1e-6, "{} vs {}", g.integral(), exact);
}

#[test]
fn off_centre_bump_in_rectangle() {
    let d = DomainDescriptor::rectangle([-1.0, -0.5], [2.0, 1.5]);
    let g = make_bump(d, 300, [0.6, 0.4], 0.9, 1.0).unwrap();
    assert!((g.integral() - radial_bump_integral(0.9)).abs() < 1e-6);
    assert!(g.vanishes_outside_domain());
}

fn random_grid(vals: &[f64]) -> PotentialGrid {
    let mut g = PotentialGrid::zeros(DomainDescriptor::rectangle([0.0, 0.0], [1.0, 1.0]), 6).unwrap();
    g.values.copy_from_slice(vals);
    g
}

proptest! {
    #[test]
    fn scaling_is_linear(vals in prop::collection::vec(-3.0f64..3.0, 36), a in -0.4f64..0.4, b in -0.4f64..0.4) {
        let fam = PotentialFamily::new(random_grid(&vals), 10.0);
        prop_assume!(fam.s1 > 1.0);
        let lhs = fam.scale(a + b).unwrap();
        let pa = fam.scale(a).unwrap();
        let pb = fam.scale(b).unwrap();
        for k in 0..36 {
            prop_assert!((lhs.values[k] - pa.values[k] - pb.values[k]).abs() <= 1e-14 * (1.0 + vals[k].abs()));
        }
    }

    #[test]
    fn sup_norm_scales_by_abs_s(vals in prop::collection::vec(-3.0f64..3.0, 36), s in -5.0f64..5.0) {
        let g = random_grid(&vals);
        let scaled = g.scaled(s);
        prop_assert!((scaled.sup_norm() - s.abs() * g.sup_norm()).abs() <= 1e-14 * g.sup_norm().max(1.0) * s.abs().max(1.0));
    }
}
