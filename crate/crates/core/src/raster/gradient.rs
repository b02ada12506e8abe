//! Finite-difference gradient of the intensity field and the squared
//! gradient magnitude used by the classical snake's image term.

use crate::error::{Error, Result};
use crate::raster::GrayImage;
use crate::scalar::Real;

/// Per-pixel partial derivatives of the image and their squared norm.
/// Central differences interior, one-sided at borders.
#[derive(Debug, Clone)]
pub struct GradientField<S = f64> {
    width: usize,
    height: usize,
    pub gx: Vec<S>,
    pub gy: Vec<S>,
    pub mag_sq: Vec<S>,
}

impl<S: Real> GradientField<S> {
    pub fn of_image(img: &GrayImage<S>) -> Result<Self> {
        let (w, h) = (img.width(), img.height());
        if w < 2 || h < 2 {
            return Err(Error::InvalidParam(
                "gradient needs width and height >= 2".into(),
            ));
        }
        let half = S::of(0.5);
        let mut gx = vec![S::zero(); w * h];
        let mut gy = vec![S::zero(); w * h];
        for y in 0..h {
            for x in 0..w {
                gx[y * w + x] = if x == 0 {
                    img.get(1, y) - img.get(0, y)
                } else if x == w - 1 {
                    img.get(w - 1, y) - img.get(w - 2, y)
                } else {
                    (img.get(x + 1, y) - img.get(x - 1, y)) * half
                };
                gy[y * w + x] = if y == 0 {
                    img.get(x, 1) - img.get(x, 0)
                } else if y == h - 1 {
                    img.get(x, h - 1) - img.get(x, h - 2)
                } else {
                    (img.get(x, y + 1) - img.get(x, y - 1)) * half
                };
            }
        }
        Ok(Self::from_components(w, h, gx, gy))
    }

    /// Assemble a field from explicit partials; `mag_sq` is derived so the
    /// `mag_sq = gx^2 + gy^2` invariant holds by construction.
    pub fn from_components(width: usize, height: usize, gx: Vec<S>, gy: Vec<S>) -> Self {
        assert_eq!(gx.len(), width * height);
        assert_eq!(gy.len(), width * height);
        let mag_sq = gx
            .iter()
            .zip(gy.iter())
            .map(|(&a, &b)| a * a + b * b)
            .collect();
        Self {
            width,
            height,
            gx,
            gy,
            mag_sq,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ramp_has_unit_gradient() {
        let data: Vec<f64> = (0..6 * 5).map(|i| (i % 6) as f64).collect();
        let img = GrayImage::new(6, 5, data).unwrap();
        let f = GradientField::of_image(&img).unwrap();
        for y in 0..5 {
            for x in 0..6 {
                let i = y * 6 + x;
                assert!((f.gx[i] - 1.0).abs() < 1e-12, "gx at ({x},{y})");
                assert!(f.gy[i].abs() < 1e-12);
                assert!((f.mag_sq[i] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_image_zero_field() {
        let img = GrayImage::filled(4, 4, 9.0f64).unwrap();
        let f = GradientField::of_image(&img).unwrap();
        assert!(f.gx.iter().chain(&f.gy).chain(&f.mag_sq).all(|&v| v == 0.0));
    }

    #[test]
    fn matches_finite_difference_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<f64> = (0..64).map(|_| rng.gen_range(0.0..255.0)).collect();
        let img = GrayImage::new(8, 8, data).unwrap();
        let f = GradientField::of_image(&img).unwrap();
        // Independent re-derivation of the differences.
        for y in 0..8usize {
            for x in 0..8usize {
                let gx = match x {
                    0 => img.get(1, y) - img.get(0, y),
                    7 => img.get(7, y) - img.get(6, y),
                    _ => 0.5 * (img.get(x + 1, y) - img.get(x - 1, y)),
                };
                let gy = match y {
                    0 => img.get(x, 1) - img.get(x, 0),
                    7 => img.get(x, 7) - img.get(x, 6),
                    _ => 0.5 * (img.get(x, y + 1) - img.get(x, y - 1)),
                };
                let i = y * 8 + x;
                assert!((f.gx[i] - gx).abs() < 1e-12);
                assert!((f.gy[i] - gy).abs() < 1e-12);
                assert!((f.mag_sq[i] - (gx * gx + gy * gy)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_dimension_is_error() {
        let img = GrayImage::new(1, 4, vec![0.0f64; 4]).unwrap();
        assert!(GradientField::of_image(&img).is_err());
    }
}
