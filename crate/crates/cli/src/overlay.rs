//! Overlay rendering: the fitted curve drawn in saturated red over the
//! grayscale input, written as a binary P6 pixmap.

use std::path::Path;

use snakefit_core::curve::Curve;
use snakefit_core::raster::{save_ppm, GrayImage};

use crate::CliError;

pub fn write_overlay(
    img: &GrayImage<f64>,
    curve: &Curve<f64>,
    path: &Path,
) -> Result<(), CliError> {
    let (w, h) = (img.width(), img.height());
    let mut rgb = Vec::with_capacity(3 * w * h);
    for &v in img.data() {
        let g = v.round().clamp(0.0, 255.0) as u8;
        rgb.extend_from_slice(&[g, g, g]);
    }
    let knots = curve.knots();
    let n = knots.len();
    let segs = if curve.closed() { n } else { n - 1 };
    for i in 0..segs {
        let a = knots[i];
        let b = knots[(i + 1) % n];
        draw_line(
            &mut rgb,
            w,
            h,
            a.x.round() as i64,
            a.y.round() as i64,
            b.x.round() as i64,
            b.y.round() as i64,
        );
    }
    save_ppm(w, h, &rgb, path)?;
    Ok(())
}

/// 1-px Bresenham segment in red.
fn draw_line(rgb: &mut [u8], w: usize, h: usize, x0: i64, y0: i64, x1: i64, y1: i64) {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let (mut x, mut y) = (x0, y0);
    let mut err = dx + dy;
    loop {
        if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
            let i = 3 * (y as usize * w + x as usize);
            rgb[i] = 255;
            rgb[i + 1] = 0;
            rgb[i + 2] = 0;
        }
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}
