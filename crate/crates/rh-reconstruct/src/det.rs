//! Modified Fredholm determinant ln det A = Tr(ln(Id + A) − A) of the
//! doubled system, as Σ(ln(1+ν) − ν) over the eigenvalues ν of A.

use faer::complex_native::c64;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::system::RHSystem;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FredholmDet {
    pub value: C64,
    /// Σ(ln(1+ν) − ν) with principal logarithms.
    pub log: C64,
    /// Some 1 + ν lies close to the negative real axis, so the principal
    /// branch of its logarithm is ambiguous.
    pub near_cut: bool,
}

pub fn fredholm_det(sys: &RHSystem) -> FredholmDet {
    let n = 2 * sys.m;
    let a = sys.doubled();
    if a.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return FredholmDet { value: C64::new(1.0, 0.0), log: C64::new(0.0, 0.0), near_cut: false };
    }
    let mat = Mat::from_fn(n, n, |i, j| c64::new(a[i * n + j].re, a[i * n + j].im));
    let mut nus: Vec<C64> = mat.complex_eigenvalues().into_iter().map(|z| C64::new(z.re, z.im)).collect();
    // a fixed order keeps the sum reproducible
    nus.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut log = C64::new(0.0, 0.0);
    let mut near_cut = false;
    for nu in nus {
        let w = 1.0 + nu;
        if w.re < 0.0 && w.im.abs() < 1e-6 * w.norm().max(1e-300) {
            near_cut = true;
        }
        log += w.ln() - nu;
    }
    FredholmDet { value: log.exp(), log, near_cut }
}

/// Removes 2πi jumps from ln det sampled along a path in (x, s).
pub fn unwrap_log_path(logs: &[C64]) -> Vec<C64> {
    let tau = std::f64::consts::TAU;
    let mut out: Vec<C64> = Vec::with_capacity(logs.len());
    for &l in logs {
        let v = match out.last() {
            Some(prev) => {
                let k = ((prev.im - l.im) / tau).round();
                C64::new(l.re, l.im + k * tau)
            }
            None => l,
        };
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(a1: Vec<C64>, a2: Vec<C64>) -> RHSystem {
        let m = (a1.len() as f64).sqrt() as usize;
        RHSystem {
            x: [0.0, 0.0],
            m,
            i_vec: vec![C64::new(0.0, 0.0); m],
            a1,
            a2,
            q1: vec![],
            q2: vec![],
            e_probes: vec![],
            e_contour: vec![],
            r0: 0.0,
        }
    }

    #[test]
    fn zero_operator_has_unit_determinant() {
        let d = fredholm_det(&system(vec![C64::new(0.0, 0.0); 9], vec![C64::new(0.0, 0.0); 9]));
        assert_eq!(d.value, C64::new(1.0, 0.0));
    }

    #[test]
    fn matches_the_product_formula() {
        // det₂(Id + A) = det(Id + A)·e^{−tr A}
        let a1: Vec<C64> = (0..4).map(|k| C64::new(0.1 * k as f64, -0.05)).collect();
        let a2: Vec<C64> = (0..4).map(|k| C64::new(0.02, 0.03 * k as f64)).collect();
        let sys = system(a1, a2);
        let d = fredholm_det(&sys);
        let a = sys.doubled();
        let n = 4;
        let m = Mat::from_fn(n, n, |i, j| c64::new(a[i * n + j].re + if i == j { 1.0 } else { 0.0 }, a[i * n + j].im));
        let det = m.determinant();
        let tr: C64 = (0..n).map(|i| a[i * n + i]).sum();
        let want = C64::new(det.re, det.im) * (-tr).exp();
        assert!((d.value - want).norm() < 1e-12, "{} {want}", d.value);
        // the doubled operator commutes with (K, K̄) ↦ (K̄, K), so det is real
        assert!(d.value.im.abs() < 1e-12);
    }

    #[test]
    fn unwrapping_removes_two_pi_jumps() {
        let tau = std::f64::consts::TAU;
        let path = [C64::new(0.0, 3.0), C64::new(0.1, 3.1), C64::new(0.2, 3.2 - tau), C64::new(0.3, 3.3 - tau)];
        let u = unwrap_log_path(&path);
        for w in u.windows(2) {
            assert!((w[1] - w[0]).norm() < 0.2);
        }
    }
}
