use scatter_numerics::gmres::{gmres, GmresOptions};
use scatter_numerics::quadrature::GaussLegendre;
use scatter_numerics::C64;

#[test]
fn gauss_legendre_integrates_oscillatory_exponential() {
    let gl = GaussLegendre::cached(48);
    let val: C64 = gl.integrate_composite(0.0, 10.0, 4, |t| (C64::new(0.0, 3.0) * t).exp());
    let exact = ((C64::new(0.0, 30.0)).exp() - 1.0) / C64::new(0.0, 3.0);
    assert!((val - exact).norm() < 1e-13);
}

#[test]
fn gmres_on_circulant_operator() {
    // (I + 0.5 S) with S the cyclic shift has a known inverse series
    let n = 64;
    let b: Vec<C64> = (0..n).map(|i| C64::new((i as f64).cos(), 0.0)).collect();
    let op = |v: &[C64], out: &mut [C64]| {
        for i in 0..n {
            out[i] = v[i] + v[(i + 1) % n] * 0.5;
        }
    };
    let out = gmres(op, &b, None, &GmresOptions::default());
    assert!(out.converged);
    let mut check = vec![C64::new(0.0, 0.0); n];
    op(&out.x, &mut check);
    let err = check.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    assert!(err < 1e-11);
}
