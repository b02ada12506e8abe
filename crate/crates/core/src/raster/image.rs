use crate::error::{Error, Result};
use crate::scalar::Real;

/// Single-channel intensity image, row-major, one sample per pixel.
///
/// Intensities are held as real values even when the source file stores
/// 8-bit samples, so every downstream computation runs on one arithmetic
/// path.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage<S = f64> {
    width: usize,
    height: usize,
    data: Vec<S>,
}

impl<S: Real> GrayImage<S> {
    pub fn new(width: usize, height: usize, data: Vec<S>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParam(
                "image dimensions must be >= 1".into(),
            ));
        }
        if data.len() != width * height {
            return Err(Error::InvalidParam(format!(
                "pixel buffer length {} != {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParam("non-finite intensity".into()));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: S) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> S {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: S) {
        self.data[y * self.width + x] = v;
    }

    pub fn contains(&self, x: S, y: S) -> bool {
        x >= S::zero()
            && y >= S::zero()
            && x <= S::of((self.width - 1) as f64)
            && y <= S::of((self.height - 1) as f64)
    }

    /// Add a constant to every intensity (used by shift-invariance tests).
    pub fn shifted(&self, c: S) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| v + c).collect(),
        }
    }
}
