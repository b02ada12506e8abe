//! Synthetic test scenes with analytic ground-truth boundaries: an ideal
//! step edge, a disk on a flat background, a two-region Gaussian field
//! and an open polyline edge.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::raster::GrayImage;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub enum SceneKind<S> {
    /// Vertical intensity step: columns `< edge_col` hold `low`, the rest
    /// `high`. The true boundary sits between the two pixel columns.
    StepEdge { low: S, high: S, edge_col: usize },
    /// Filled disk of `inside` level on an `outside` background.
    Disk { radius: S, inside: S, outside: S },
    /// Disk-shaped region where each side draws i.i.d. Gaussian
    /// intensities around its own mean.
    TwoRegionGaussian {
        radius: S,
        mean_inside: S,
        mean_outside: S,
        sigma: S,
    },
    /// Open piecewise-linear boundary crossing the image left to right;
    /// pixels above it (smaller y) hold `low`, the rest `high`.
    PolylineEdge { low: S, high: S },
}

/// Analytic boundary that generated a scene.
#[derive(Debug, Clone)]
pub enum SceneTruth<S> {
    VerticalLine { x: S },
    Circle { center: Vec2<S>, radius: S },
    Polyline(Curve<S>),
}

impl<S: Real> SceneTruth<S> {
    /// Unsigned distance from a point to the true boundary.
    pub fn distance(&self, p: Vec2<S>) -> S {
        match self {
            SceneTruth::VerticalLine { x } => (p.x - *x).abs(),
            SceneTruth::Circle { center, radius } => (p.dist(*center) - *radius).abs(),
            SceneTruth::Polyline(c) => {
                let knots = c.knots();
                let mut best = S::infinity();
                for seg in knots.windows(2) {
                    best = best.min(point_segment_distance(p, seg[0], seg[1]));
                }
                best
            }
        }
    }

    /// Mean distance of a curve's knots to the boundary.
    pub fn mean_distance(&self, c: &Curve<S>) -> S {
        let n = S::of(c.knots().len() as f64);
        c.knots().iter().map(|&k| self.distance(k)).sum::<S>() / n
    }

    pub fn max_distance(&self, c: &Curve<S>) -> S {
        c.knots()
            .iter()
            .map(|&k| self.distance(k))
            .fold(S::zero(), |a, b| a.max(b))
    }

    /// Polyline rendering of the boundary, for the truth curve file.
    pub fn to_curve(&self, width: usize, height: usize) -> Result<Curve<S>> {
        match self {
            SceneTruth::VerticalLine { x } => Curve::new(
                vec![Vec2::new(*x, S::zero()), Vec2::new(*x, S::of((height - 1) as f64))],
                false,
            ),
            SceneTruth::Circle { center, radius } => {
                let n = 256usize;
                let knots = (0..n)
                    .map(|i| {
                        let th = S::of(2.0 * std::f64::consts::PI * i as f64 / n as f64);
                        Vec2::new(center.x + *radius * th.cos(), center.y + *radius * th.sin())
                    })
                    .collect();
                Curve::new(knots, true)
            }
            SceneTruth::Polyline(c) => {
                let _ = width;
                Ok(c.clone())
            }
        }
    }
}

pub fn point_segment_distance<S: Real>(p: Vec2<S>, a: Vec2<S>, b: Vec2<S>) -> S {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == S::zero() {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len_sq).max(S::zero()).min(S::one());
    p.dist(a + ab * t)
}

#[derive(Debug, Clone)]
pub struct Scene<S> {
    pub image: GrayImage<S>,
    pub truth: SceneTruth<S>,
}

/// Render a synthetic scene; fully deterministic for a fixed seed.
/// `noise_sigma` adds zero-mean Gaussian noise on top of the base field.
pub fn make_scene<S: Real>(
    kind: &SceneKind<S>,
    width: usize,
    height: usize,
    noise_sigma: S,
    seed: u64,
) -> Result<Scene<S>> {
    if width < 16 || height < 16 {
        return Err(Error::InvalidParam("scene dimensions must be >= 16".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cx = S::of(width as f64 / 2.0);
    let cy = S::of(height as f64 / 2.0);
    let (mut data, truth): (Vec<S>, SceneTruth<S>) = match kind {
        SceneKind::StepEdge { low, high, edge_col } => {
            if *edge_col == 0 || *edge_col >= width {
                return Err(Error::InvalidParam("edge column outside image".into()));
            }
            let data = (0..width * height)
                .map(|i| if i % width < *edge_col { *low } else { *high })
                .collect();
            (
                data,
                SceneTruth::VerticalLine {
                    x: S::of(*edge_col as f64 - 0.5),
                },
            )
        }
        SceneKind::Disk { radius, inside, outside } => {
            check_disk_fits(*radius, cx, cy, width, height)?;
            let center = Vec2::new(cx, cy);
            let data = disk_field(width, height, center, *radius)
                .into_iter()
                .map(|is_in| if is_in { *inside } else { *outside })
                .collect();
            (data, SceneTruth::Circle { center, radius: *radius })
        }
        SceneKind::TwoRegionGaussian {
            radius,
            mean_inside,
            mean_outside,
            sigma,
        } => {
            check_disk_fits(*radius, cx, cy, width, height)?;
            let center = Vec2::new(cx, cy);
            let normal = Normal::new(0.0, sigma.to_f64_lossy())
                .map_err(|e| Error::InvalidParam(format!("sigma: {e}")))?;
            let mask = disk_field(width, height, center, *radius);
            let data = mask
                .into_iter()
                .map(|is_in| {
                    let mean = if is_in { *mean_inside } else { *mean_outside };
                    mean + S::of(normal.sample(&mut rng))
                })
                .collect();
            (data, SceneTruth::Circle { center, radius: *radius })
        }
        SceneKind::PolylineEdge { low, high } => {
            let verts = default_edge_polyline::<S>(width, height);
            let data = (0..width * height)
                .map(|i| {
                    let (x, y) = ((i % width) as f64, (i / width) as f64);
                    let fy = polyline_y_at(&verts, S::of(x)).to_f64_lossy();
                    if y < fy {
                        *low
                    } else {
                        *high
                    }
                })
                .collect();
            (data, SceneTruth::Polyline(Curve::new(verts, false)?))
        }
    };
    if noise_sigma > S::zero() {
        let normal = Normal::new(0.0, noise_sigma.to_f64_lossy())
            .map_err(|e| Error::InvalidParam(format!("noise: {e}")))?;
        for v in &mut data {
            *v = *v + S::of(normal.sample(&mut rng));
        }
    }
    Ok(Scene {
        image: GrayImage::new(width, height, data)?,
        truth,
    })
}

fn check_disk_fits<S: Real>(r: S, cx: S, cy: S, width: usize, height: usize) -> Result<()> {
    if r <= S::zero() {
        return Err(Error::InvalidParam("radius must be positive".into()));
    }
    let fits = cx - r >= S::one()
        && cy - r >= S::one()
        && cx + r <= S::of((width - 2) as f64)
        && cy + r <= S::of((height - 2) as f64);
    if !fits {
        return Err(Error::InvalidParam("disk exceeds image bounds".into()));
    }
    Ok(())
}

fn disk_field<S: Real>(width: usize, height: usize, center: Vec2<S>, radius: S) -> Vec<bool> {
    (0..width * height)
        .map(|i| {
            let p = Vec2::new(S::of((i % width) as f64), S::of((i / width) as f64));
            p.dist(center) < radius
        })
        .collect()
}

/// Gentle left-to-right edge polyline used by the polyline-edge scene.
fn default_edge_polyline<S: Real>(width: usize, height: usize) -> Vec<Vec2<S>> {
    let (w, h) = (width as f64, height as f64);
    [
        (0.0, 0.55 * h),
        (0.35 * w, 0.45 * h),
        (0.65 * w, 0.58 * h),
        (w - 1.0, 0.50 * h),
    ]
    .iter()
    .map(|&(x, y)| Vec2::new(S::of(x), S::of(y)))
    .collect()
}

/// y of a piecewise-linear function of x (vertices sorted by x).
fn polyline_y_at<S: Real>(verts: &[Vec2<S>], x: S) -> S {
    if x <= verts[0].x {
        return verts[0].y;
    }
    for seg in verts.windows(2) {
        if x <= seg[1].x {
            let t = (x - seg[0].x) / (seg[1].x - seg[0].x);
            return seg[0].y + (seg[1].y - seg[0].y) * t;
        }
    }
    verts[verts.len() - 1].y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_edge_levels() {
        let scene = make_scene(
            &SceneKind::StepEdge {
                low: 0.0,
                high: 100.0,
                edge_col: 32,
            },
            64,
            64,
            0.0,
            0,
        )
        .unwrap();
        assert_eq!(scene.image.get(31, 10), 0.0);
        assert_eq!(scene.image.get(32, 10), 100.0);
        match scene.truth {
            SceneTruth::VerticalLine { x } => assert_eq!(x, 31.5),
            _ => panic!("wrong truth kind"),
        }
    }

    #[test]
    fn disk_levels_by_distance() {
        let scene = make_scene(
            &SceneKind::Disk {
                radius: 20.0,
                inside: 100.0,
                outside: 0.0,
            },
            64,
            64,
            0.0,
            0,
        )
        .unwrap();
        let (cx, cy) = (32.0, 32.0);
        for (x, y) in [(32usize, 32usize), (40, 32), (32, 45), (5, 5)] {
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            let expect = if d < 20.0 { 100.0 } else { 0.0 };
            assert_eq!(scene.image.get(x, y), expect, "at ({x},{y})");
        }
    }

    #[test]
    fn two_region_gaussian_deterministic_per_seed() {
        let kind = SceneKind::TwoRegionGaussian {
            radius: 20.0,
            mean_inside: 150.0,
            mean_outside: 50.0,
            sigma: 10.0,
        };
        let a = make_scene(&kind, 64, 64, 0.0, 9).unwrap();
        let b = make_scene(&kind, 64, 64, 0.0, 9).unwrap();
        assert_eq!(a.image.data(), b.image.data());
        let c = make_scene(&kind, 64, 64, 0.0, 10).unwrap();
        assert_ne!(a.image.data(), c.image.data());
    }

    #[test]
    fn disk_out_of_bounds_is_error() {
        let r = make_scene(
            &SceneKind::Disk {
                radius: 40.0,
                inside: 1.0,
                outside: 0.0,
            },
            64,
            64,
            0.0,
            0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn polyline_edge_sides() {
        let scene = make_scene(
            &SceneKind::PolylineEdge {
                low: 0.0,
                high: 100.0,
            },
            64,
            64,
            0.0,
            0,
        )
        .unwrap();
        assert_eq!(scene.image.get(10, 2), 0.0);
        assert_eq!(scene.image.get(10, 61), 100.0);
    }
}
