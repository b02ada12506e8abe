//! Summed-area tables of intensity and squared intensity, giving
//! constant-time mean/variance over any axis-aligned window.

use crate::error::{Error, Result};
use crate::raster::GrayImage;
use crate::scalar::Real;

/// Prefix-sum tables of size `(width+1) x (height+1)`; row and column 0
/// are zero. Accumulation is exact for integer intensities as long as
/// the running totals stay inside the scalar's exact-integer range
/// (2^53 for `f64`).
#[derive(Debug, Clone)]
pub struct IntegralTables<S = f64> {
    width: usize,
    height: usize,
    sum: Vec<S>,
    sum_sq: Vec<S>,
}

impl<S: Real> IntegralTables<S> {
    pub fn build(img: &GrayImage<S>) -> Self {
        let (w, h) = (img.width(), img.height());
        let stride = w + 1;
        let mut sum = vec![S::zero(); stride * (h + 1)];
        let mut sum_sq = vec![S::zero(); stride * (h + 1)];
        for y in 0..h {
            let mut row = S::zero();
            let mut row_sq = S::zero();
            for x in 0..w {
                let v = img.get(x, y);
                row = row + v;
                row_sq = row_sq + v * v;
                let idx = (y + 1) * stride + (x + 1);
                sum[idx] = sum[y * stride + (x + 1)] + row;
                sum_sq[idx] = sum_sq[y * stride + (x + 1)] + row_sq;
            }
        }
        Self {
            width: w,
            height: h,
            sum,
            sum_sq,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Table value `sum[y][x]` = sum of intensities with coordinates
    /// strictly below `(x, y)`.
    pub fn sum_at(&self, x: usize, y: usize) -> S {
        self.sum[y * (self.width + 1) + x]
    }

    pub fn sum_sq_at(&self, x: usize, y: usize) -> S {
        self.sum_sq[y * (self.width + 1) + x]
    }

    /// Four-corner rectangle sums over `[x0, x1) x [y0, y1)`.
    pub fn rect_sums(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> (S, S) {
        debug_assert!(x0 <= x1 && x1 <= self.width);
        debug_assert!(y0 <= y1 && y1 <= self.height);
        let stride = self.width + 1;
        let corner = |t: &[S]| {
            t[y1 * stride + x1] + t[y0 * stride + x0] - t[y0 * stride + x1] - t[y1 * stride + x0]
        };
        (corner(&self.sum), corner(&self.sum_sq))
    }

    /// Mean and population variance of the `(2*half+1)^2` window centered
    /// at `(cx, cy)`, clipped to the image bounds.
    pub fn window_stats(&self, cx: usize, cy: usize, half: usize) -> Result<(S, S)> {
        if cx >= self.width || cy >= self.height {
            return Err(Error::InvalidParam(format!(
                "window center ({cx}, {cy}) outside {}x{} image",
                self.width, self.height
            )));
        }
        let x0 = cx.saturating_sub(half);
        let y0 = cy.saturating_sub(half);
        let x1 = (cx + half + 1).min(self.width);
        let y1 = (cy + half + 1).min(self.height);
        let (s, s2) = self.rect_sums(x0, y0, x1, y1);
        let n = S::of(((x1 - x0) * (y1 - y0)) as f64);
        let mean = s / n;
        // Population variance; clamp tiny negative rounding residue.
        let var = (s2 / n - mean * mean).max(S::zero());
        Ok((mean, var))
    }
}
