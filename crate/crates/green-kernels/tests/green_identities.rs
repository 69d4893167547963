use std::f64::consts::{PI, TAU};

use green_kernels::faddeev::{phase, unit_circle_limit};
use green_kernels::wkernel::{branch_sweep, unit_circle_limit_trapezoid, w_kernel_checked};
use green_kernels::{diagonal_difference, green_classical, green_diff_contour, green_difference, green_faddeev, green_faddeev_g, HeavisideMode, C64};
use proptest::prelude::*;
use scatter_numerics::quadrature::GaussLegendre;
use spectral_domain::{build_contour, lambda_to_k, ContourSpec, Energy, SpectralContour, SpectralPoint};

fn e25() -> Energy {
    Energy::new(25.0).unwrap()
}

fn lam(z: C64) -> SpectralPoint {
    SpectralPoint::new(z).unwrap()
}

fn contour(n: usize) -> SpectralContour {
    build_contour(ContourSpec::new(e25(), 1.0, n).unwrap())
}

fn adaptive<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, whole: C64, tol: f64, depth: u32) -> C64 {
    let gl = GaussLegendre::cached(20);
    let m = 0.5 * (a + b);
    let left = gl.integrate(a, m, f);
    let right = gl.integrate(m, b, f);
    if depth == 0 || (left + right - whole).norm() < tol {
        left + right
    } else {
        adaptive(f, a, m, left, 0.5 * tol, depth - 1) + adaptive(f, m, b, right, 0.5 * tol, depth - 1)
    }
}

fn integrate<F: Fn(f64) -> C64>(f: F, a: f64, b: f64) -> C64 {
    let whole = GaussLegendre::cached(20).integrate(a, b, &f);
    adaptive(&f, a, b, whole, 1e-13, 40)
}

/// G(x,k) from its Fourier representation −(2π)^{-2}∫e^{iξx}/(ξ² + 2kξ)dξ · e^{ikx}.
/// Axes along Re k and Im k; the ξ₂ integral is done by residues, the ξ₁
/// integral numerically. Needs x·Im k ≠ 0.
fn green_fourier(x: [f64; 2], l: C64) -> C64 {
    let e = 25.0f64;
    let se = e.sqrt();
    let k = lambda_to_k(lam(l), e25());
    let (kr, ki) = (k.re(), k.im());
    let a = kr[0].hypot(kr[1]);
    let b = ki[0].hypot(ki[1]);
    let e1 = [kr[0] / a, kr[1] / a];
    let e2 = [ki[0] / b, ki[1] / b];
    let y1 = x[0] * e1[0] + x[1] * e1[1];
    let y2 = x[0] * e2[0] + x[1] * e2[1];
    let i = C64::new(0.0, 1.0);
    let inner = |x1: f64| -> C64 {
        let s1 = x1 + a;
        if s1.abs() < se {
            let beta = (e - s1 * s1).sqrt();
            if y2 > 0.0 {
                return C64::new(0.0, 0.0);
            }
            return C64::new(TAU * (b * y2).exp() * (beta * y2).sin() / beta, 0.0);
        }
        let g = (s1 * s1 - e).sqrt();
        if y2 > 0.0 {
            return if g > b { C64::new(PI * ((b - g) * y2).exp() / g, 0.0) } else { C64::new(0.0, 0.0) };
        }
        let beta = C64::new(0.0, g);
        let pp = C64::new(0.0, -b) + beta;
        let pm = C64::new(0.0, -b) - beta;
        let mut val = (i * pm * y2).exp() / (-2.0 * beta);
        if g < b {
            val += (i * pp * y2).exp() / (2.0 * beta);
        }
        -i * TAU * val
    };
    let f = |s: f64| (i * s * y1).exp() * inner(s);
    let big = 60.0 / y2.abs() + 4.0 * a + 10.0;
    let cut = (e + b * b).sqrt();
    let mut pts = vec![-big, big, -a - se, -a + se, 0.0, -2.0 * a, -a - cut, -a + cut];
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup_by(|p, q| (*p - *q).abs() < 1e-12);
    let mut tot = C64::new(0.0, 0.0);
    for w in pts.windows(2) {
        tot += integrate(f, w[0], w[1]);
    }
    let g = -tot / (TAU * TAU);
    g * (i * k.dot(x)).exp()
}

#[test]
fn faddeev_green_matches_fourier_oracle() {
    for l in [C64::from_polar(1.5, 0.3), C64::from_polar(2.7, 2.1), C64::from_polar(0.6, -1.0), C64::from_polar(0.3, 2.5)] {
        for x in [[0.4, 0.7], [-0.9, 0.35], [0.2, -0.5]] {
            let a = green_faddeev(x, lam(l), e25()).unwrap();
            let b = green_fourier(x, l);
            assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()), "λ={l} x={x:?}: {a} vs {b}");
        }
    }
}

#[test]
fn zero_energy_limit_behaviour_of_classical_kernel() {
    // small-|x| log coefficient from a two-radius fit
    let e = e25();
    let (r1, r2) = (1e-5, 2e-5);
    let g1 = green_classical([r1, 0.0], e).unwrap().re;
    let g2 = green_classical([r2, 0.0], e).unwrap().re;
    let slope = (g2 - g1) / (r2 / r1).ln();
    assert!((slope - 1.0 / TAU).abs() < 1e-4, "{slope}");
}

#[test]
fn classical_decay_bound_on_rays() {
    let c0 = green_kernels::classical::c0_limit();
    for e in [1.0, 25.0, 400.0] {
        let en = Energy::new(e).unwrap();
        for k in 1..400 {
            let r = 0.01 * k as f64;
            for t in [0.0, 1.0, 2.5] {
                let g = green_classical([r * f64::cos(t), r * f64::sin(t)], en).unwrap();
                assert!(g.norm() <= c0 * r.powf(-0.5) * e.powf(-0.25) * (1.0 + 1e-12));
            }
        }
    }
}

fn fd_dbar(x: [f64; 2], l: C64, h: f64) -> (C64, C64) {
    let g = |z: C64| green_faddeev(x, lam(z), e25()).unwrap();
    let da = (g(l + h) - g(l - h)) / (2.0 * h);
    let db = (g(l + C64::new(0.0, h)) - g(l - C64::new(0.0, h))) / (2.0 * h);
    let i = C64::new(0.0, 1.0);
    ((da + i * db) * 0.5, (da - i * db) * 0.5)
}

fn sgn(l: C64) -> f64 {
    if l.norm() > 1.0 {
        1.0
    } else {
        -1.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn dbar_and_d_identities_by_centred_differences(
        r in prop_oneof![1.1f64..4.0, 0.25f64..0.9],
        t in 0.0f64..TAU,
        x1 in -1.0f64..1.0,
        x2 in -1.0f64..1.0,
    ) {
        prop_assume!(x1.hypot(x2) > 0.05);
        let l = C64::from_polar(r, t);
        let x = [x1, x2];
        let z = C64::new(x1, x2);
        let i = C64::new(0.0, 1.0);
        let want_bar = sgn(l) / (4.0 * PI * l.conj()) * (i * phase(5.0, z, -1.0 / l.conj())).exp();
        let want = sgn(l) / (4.0 * PI * l) * (i * phase(5.0, z, l)).exp();
        let scale = want.norm().max(want_bar.norm());
        let (b1, d1) = fd_dbar(x, l, 2e-3);
        let (b2, d2) = fd_dbar(x, l, 1e-3);
        let (e1b, e2b) = ((b1 - want_bar).norm(), (b2 - want_bar).norm());
        let (e1d, e2d) = ((d1 - want).norm(), (d2 - want).norm());
        prop_assert!(e2b < 1e-3 * scale && e2d < 1e-3 * scale, "{e2b:e} {e2d:e} {scale}");
        // second order once above the rounding floor
        if e1b > 1e-9 * scale {
            prop_assert!(e2b < 0.35 * e1b, "{e1b:e} -> {e2b:e}");
        }
        if e1d > 1e-9 * scale {
            prop_assert!(e2d < 0.35 * e1d, "{e1d:e} -> {e2d:e}");
        }
    }

    #[test]
    fn conjugation_symmetry_of_g(
        r in prop_oneof![1.05f64..6.0, 0.2f64..0.95],
        t in 0.0f64..TAU,
        x1 in -1.5f64..1.5,
        x2 in -1.5f64..1.5,
    ) {
        prop_assume!(x1.hypot(x2) > 1e-3);
        let l = lam(C64::from_polar(r, t));
        let a = green_faddeev_g([x1, x2], l, e25()).unwrap();
        let b = green_faddeev_g([x1, x2], l.mirror(), e25()).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-11 * (1.0 + a.norm()));
    }

    #[test]
    fn reduced_kernel_bound(
        r in prop_oneof![1.05f64..6.0, 0.2f64..0.95],
        t in 0.0f64..TAU,
        x1 in -2.0f64..2.0,
        x2 in -2.0f64..2.0,
    ) {
        prop_assume!(x1.hypot(x2) > 1e-3);
        let l = lam(C64::from_polar(r, t));
        let k = lambda_to_k(l, e25());
        let re = k.re();
        let g = green_faddeev_g([x1, x2], l, e25()).unwrap();
        let bound = green_kernels::classical::c0_limit() * x1.hypot(x2).powf(-0.5) * re[0].hypot(re[1]).powf(-0.5);
        // diagnostic only: the bound holds with a modest constant
        prop_assert!(g.norm() < 3.0 * bound, "{} vs {}", g.norm(), bound);
    }
}

#[test]
fn contour_representation_matches_direct_difference() {
    for n in [64, 128] {
        let c = contour(n);
        let mut worst: f64 = 0.0;
        for idx in [0, 5, n / 3, n + 2, n + n / 2 + 1] {
            for x in [[0.3, 0.1], [-0.7, 0.6], [1.1, -0.4], [0.0, 0.0]] {
                let l = c.point(idx);
                let a = green_diff_contour(x, l, &c).unwrap();
                let b = green_difference(x, l, e25()).unwrap();
                worst = worst.max((a - b).norm() / b.norm());
            }
        }
        let tol = if n == 64 { 1e-4 } else { 1e-9 };
        assert!(worst < tol, "n={n}: {worst:e}");
    }
}

#[test]
fn contour_representation_converges_under_refinement() {
    let x = [0.5, -0.3];
    let err = |n: usize| {
        let c = contour(n);
        let l = lam(C64::from_polar(c.radius(), 0.7));
        (green_diff_contour(x, l, &c).unwrap() - green_difference(x, l, e25()).unwrap()).norm()
    };
    let (e1, e2) = (err(32), err(64));
    // observed order log2(e1/e2) at least 2
    assert!(e2 < 0.25 * e1, "{e1:e} {e2:e}");
}

#[test]
fn unit_circle_limits() {
    let x = [0.4, -0.8];
    for &phi in &[0.3, 2.0, -2.6] {
        for outer in [true, false] {
            let gl = unit_circle_limit(x, phi, outer, 5.0);
            // θ is discontinuous, so the trapezoid converges at first order
            let tr = unit_circle_limit_trapezoid(x, phi, outer, 5.0, 1 << 14);
            assert!((gl - tr).norm() < 1e-3 * gl.norm().max(0.1), "{gl} vs {tr}");
            let eps = 1e-7;
            let r = if outer { 1.0 + eps } else { 1.0 - eps };
            let d = green_difference(x, lam(C64::from_polar(r, phi)), e25()).unwrap();
            assert!((d - gl).norm() < 1e-5, "{d} vs {gl}");
        }
    }
}

#[test]
fn origin_values_are_finite_and_agree() {
    let c = contour(64);
    for idx in [1, 70] {
        let l = c.point(idx);
        let a = green_diff_contour([0.0, 0.0], l, &c).unwrap();
        let b = diagonal_difference(l);
        assert!((a - b).norm() < 1e-5 * b.norm(), "{a} vs {b}");
        let tiny = green_difference([1e-8, -1e-8], l, e25()).unwrap();
        assert!((tiny - b).norm() < 1e-6);
    }
}

#[test]
fn w_lp_norms_stay_bounded_under_refinement() {
    let norms = |n: usize| -> [f64; 3] {
        let c = contour(n);
        let mut acc = [0.0; 3];
        for (i, a) in c.nodes.iter().enumerate() {
            for (j, b) in c.nodes.iter().enumerate() {
                if i == j || c.mirror_index(i) == j {
                    continue;
                }
                let (w, _) = w_kernel_checked(c.point(i), c.point(j), HeavisideMode::Exact).unwrap();
                let m = a.weight.norm() * b.weight.norm();
                for (k, p) in [1.0, 2.0, 4.0].iter().enumerate() {
                    acc[k] += w.norm().powf(*p) * m;
                }
            }
        }
        [acc[0], acc[1].sqrt(), acc[2].powf(0.25)]
    };
    let (a, b) = (norms(64), norms(128));
    for k in 0..3 {
        assert!(b[k] < 1.05 * a[k] && b[k] > 0.9 * a[k], "p-index {k}: {} -> {}", a[k], b[k]);
    }
}

#[test]
fn branch_condition_on_fine_contour() {
    let (bad, margin) = branch_sweep(&contour(128));
    assert_eq!(bad, 0);
    assert!(margin > 1e-3, "{margin}");
}

#[test]
fn discrete_heaviside_variant_converges_to_closed_form() {
    let c = contour(64);
    let l = c.point(3);
    let s = c.point(40);
    let exact = w_kernel_checked(l, s, HeavisideMode::Exact).unwrap().0;
    let e1 = (w_kernel_checked(l, s, HeavisideMode::Discrete(64)).unwrap().0 - exact).norm();
    let e2 = (w_kernel_checked(l, s, HeavisideMode::Discrete(1024)).unwrap().0 - exact).norm();
    assert!(e2 < e1 && e2 < 1e-2, "{e1:e} {e2:e}");
}
