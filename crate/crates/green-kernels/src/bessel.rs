//! Bessel functions J₀, J₁, Y₀, Y₁ and Hankel functions H₀⁽¹⁾, H₁⁽¹⁾ of real
//! positive argument.
//!
//! Ascending series below [`CROSSOVER`], Hankel's asymptotic expansion
//! (truncated at its smallest term) above. At the crossover both sides are
//! good to roughly 1e-11 relative; a lower crossover would leave the
//! asymptotic side around 1e-8.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::C64;

pub const CROSSOVER: f64 = 12.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// (J₀, Y₀, J₁, Y₁) at x > 0 by the ascending series.
fn series(x: f64) -> (f64, f64, f64, f64) {
    let q = 0.25 * x * x;
    let half = 0.5 * x;
    let lg = (half).ln() + EULER_GAMMA;
    // term_k = (−q)^k / (k!)², harmonic H_k
    let mut term = 1.0;
    let mut j0 = 1.0;
    let mut y0s = 0.0;
    let mut t1 = 1.0; // (−q)^k / (k!(k+1)!)
    let mut j1s = 1.0;
    let mut y1s = 0.0;
    let mut hk = 0.0;
    // ψ(k+1) + ψ(k+2) = −2γ + H_k + H_{k+1}
    y1s += (-2.0 * EULER_GAMMA + 0.0 + 1.0) * t1;
    let mut k = 0usize;
    loop {
        k += 1;
        let kf = k as f64;
        term *= -q / (kf * kf);
        t1 *= -q / (kf * (kf + 1.0));
        hk += 1.0 / kf;
        j0 += term;
        y0s -= hk * term;
        j1s += t1;
        y1s += (-2.0 * EULER_GAMMA + hk + hk + 1.0 / (kf + 1.0)) * t1;
        if term.abs() < 1e-18 * j0.abs().max(1e-3) && t1.abs() < 1e-18 && k > 3 {
            break;
        }
        if k > 200 {
            break;
        }
    }
    let j1 = half * j1s;
    let y0 = 2.0 / PI * (lg * j0 + y0s);
    let y1 = -2.0 / (PI * x) + 2.0 / PI * half.ln() * j1 - half * y1s / PI;
    (j0, y0, j1, y1)
}

/// H_ν⁽¹⁾(x) for ν ∈ {0, 1} by the asymptotic expansion.
fn hankel_asymptotic(nu: u32, x: f64) -> C64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut a = 1.0f64;
    let mut sum = C64::new(1.0, 0.0);
    let mut ipow = C64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (8.0 * kf * x);
        ipow *= C64::new(0.0, 1.0);
        let t = ipow * a;
        if t.norm() >= last {
            break;
        }
        last = t.norm();
        sum += t;
        if last < 1e-17 {
            break;
        }
    }
    let chi = x - nu as f64 * 0.5 * PI - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * C64::from_polar(1.0, chi) * sum
}

/// H₀⁽¹⁾(x) = J₀(x) + iY₀(x), x > 0.
pub fn hankel1_0(x: f64) -> C64 {
    if x < CROSSOVER {
        let (j0, y0, _, _) = series(x);
        C64::new(j0, y0)
    } else {
        hankel_asymptotic(0, x)
    }
}

/// H₁⁽¹⁾(x) = J₁(x) + iY₁(x), x > 0.
pub fn hankel1_1(x: f64) -> C64 {
    if x < CROSSOVER {
        let (_, _, j1, y1) = series(x);
        C64::new(j1, y1)
    } else {
        hankel_asymptotic(1, x)
    }
}

/// Both Hankel functions with one series evaluation.
pub fn hankel1_01(x: f64) -> (C64, C64) {
    if x < CROSSOVER {
        let (j0, y0, j1, y1) = series(x);
        (C64::new(j0, y0), C64::new(j1, y1))
    } else {
        (hankel_asymptotic(0, x), hankel_asymptotic(1, x))
    }
}

pub fn j0(x: f64) -> f64 {
    hankel1_0(x).re
}

pub fn y0(x: f64) -> f64 {
    hankel1_0(x).im
}

pub fn j1(x: f64) -> f64 {
    hankel1_1(x).re
}

pub fn y1(x: f64) -> f64 {
    hankel1_1(x).im
}
