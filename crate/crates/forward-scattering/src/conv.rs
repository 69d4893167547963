//! Discrete convolution (K ∗ w)(i,j) = Σ K(i−i', j−j') w(i',j') on an
//! nx × ny lattice, by zero padding to 2nx × 2ny and FFT.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

pub struct Conv2d {
    nx: usize,
    ny: usize,
    px: usize,
    py: usize,
    fx: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
    /// Kernel spectrum in transposed (y fastest) layout, pre-scaled by 1/(px·py).
    kernel_hat: Vec<C64>,
}

impl std::fmt::Debug for Conv2d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Conv2d({}x{})", self.nx, self.ny)
    }
}

fn transpose(src: &[C64], dst: &mut [C64], rows: usize, cols: usize) {
    // src is rows × cols with cols fastest
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

impl Conv2d {
    /// `kernel(di, dj)` for offsets |di| < nx, |dj| < ny.
    pub fn new<F: Fn(i64, i64) -> C64>(nx: usize, ny: usize, kernel: F) -> Self {
        let (px, py) = (2 * nx, 2 * ny);
        let mut planner = FftPlanner::new();
        let mut conv = Self {
            nx,
            ny,
            px,
            py,
            fx: planner.plan_fft_forward(px),
            fy: planner.plan_fft_forward(py),
            ix: planner.plan_fft_inverse(px),
            iy: planner.plan_fft_inverse(py),
            kernel_hat: Vec::new(),
        };
        let mut table = vec![C64::new(0.0, 0.0); px * py];
        for dj in -(ny as i64 - 1)..(ny as i64) {
            for di in -(nx as i64 - 1)..(nx as i64) {
                let i = di.rem_euclid(px as i64) as usize;
                let j = dj.rem_euclid(py as i64) as usize;
                table[j * px + i] = kernel(di, dj);
            }
        }
        let scale = 1.0 / (px * py) as f64;
        let mut hat = conv.forward(table);
        hat.iter_mut().for_each(|z| *z *= scale);
        conv.kernel_hat = hat;
        conv
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// 2D forward transform of a px × py array (x fastest); result transposed.
    fn forward(&self, mut a: Vec<C64>) -> Vec<C64> {
        self.fx.process(&mut a);
        let mut t = vec![C64::new(0.0, 0.0); a.len()];
        transpose(&a, &mut t, self.py, self.px);
        self.fy.process(&mut t);
        t
    }

    /// out = K ∗ w over the nx × ny lattice (index j·nx + i).
    pub fn apply(&self, w: &[C64], out: &mut [C64]) {
        assert_eq!(w.len(), self.len());
        let mut a = vec![C64::new(0.0, 0.0); self.px * self.py];
        for j in 0..self.ny {
            a[j * self.px..j * self.px + self.nx].copy_from_slice(&w[j * self.nx..(j + 1) * self.nx]);
        }
        let mut t = self.forward(a);
        t.iter_mut().zip(&self.kernel_hat).for_each(|(z, k)| *z *= k);
        self.iy.process(&mut t);
        let mut a = vec![C64::new(0.0, 0.0); t.len()];
        transpose(&t, &mut a, self.px, self.py);
        self.ix.process(&mut a);
        for j in 0..self.ny {
            out[j * self.nx..(j + 1) * self.nx].copy_from_slice(&a[j * self.px..j * self.px + self.nx]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let (nx, ny) = (5, 7);
        let k = |di: i64, dj: i64| C64::new((di as f64 * 0.3).sin() + dj as f64, 0.1 * (di * dj) as f64);
        let conv = Conv2d::new(nx, ny, k);
        let w: Vec<C64> = (0..nx * ny).map(|t| C64::new(t as f64 * 0.1, (t % 3) as f64)).collect();
        let mut out = vec![C64::new(0.0, 0.0); nx * ny];
        conv.apply(&w, &mut out);
        for j in 0..ny {
            for i in 0..nx {
                let mut s = C64::new(0.0, 0.0);
                for jj in 0..ny {
                    for ii in 0..nx {
                        s += k(i as i64 - ii as i64, j as i64 - jj as i64) * w[jj * nx + ii];
                    }
                }
                assert!((s - out[j * nx + i]).norm() < 1e-11 * (1.0 + s.norm()));
            }
        }
    }
}
