//! Polyline snakes: open or closed ordered knot lists, their normals,
//! arc-length resampling, the midpoint regularity prior and scanline
//! region rasterization.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::scalar::Real;

/// Ordered knot polyline. Closed curves implicitly join the last knot
/// back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve<S = f64> {
    knots: Vec<Vec2<S>>,
    closed: bool,
}

impl<S: Real> Curve<S> {
    pub fn new(knots: Vec<Vec2<S>>, closed: bool) -> Result<Self> {
        let min = if closed { 3 } else { 2 };
        if knots.len() < min {
            return Err(Error::InvalidCurve(format!(
                "need at least {min} knots, got {}",
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidCurve("non-finite knot coordinate".into()));
        }
        let n = knots.len();
        let segs = if closed { n } else { n - 1 };
        for i in 0..segs {
            if knots[i] == knots[(i + 1) % n] {
                return Err(Error::InvalidCurve(format!(
                    "coincident consecutive knots at index {i}"
                )));
            }
        }
        Ok(Self { knots, closed })
    }

    pub fn knots(&self) -> &[Vec2<S>] {
        &self.knots
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// Regular closed polygon approximating a circle; knots ordered by
    /// increasing angle.
    pub fn circle(center: Vec2<S>, radius: S, n: usize) -> Result<Self> {
        let knots = (0..n)
            .map(|i| {
                let th = S::of(2.0 * std::f64::consts::PI * i as f64 / n as f64);
                Vec2::new(center.x + radius * th.cos(), center.y + radius * th.sin())
            })
            .collect();
        Self::new(knots, true)
    }

    pub fn translated(&self, d: Vec2<S>) -> Self {
        Self {
            knots: self.knots.iter().map(|&k| k + d).collect(),
            closed: self.closed,
        }
    }

    pub fn in_bounds(&self, width: usize, height: usize) -> bool {
        let (w, h) = (S::of((width - 1) as f64), S::of((height - 1) as f64));
        self.knots.iter().all(|k| {
            k.x >= S::zero() && k.y >= S::zero() && k.x <= w && k.y <= h
        })
    }

    pub fn perimeter(&self) -> S {
        let n = self.knots.len();
        let segs = if self.closed { n } else { n - 1 };
        (0..segs)
            .map(|i| self.knots[i].dist(self.knots[(i + 1) % n]))
            .sum()
    }

    fn neighbor_indices(&self, i: usize) -> Option<(usize, usize)> {
        let n = self.knots.len();
        if self.closed {
            Some(((i + n - 1) % n, (i + 1) % n))
        } else if i == 0 || i == n - 1 {
            None
        } else {
            Some((i - 1, i + 1))
        }
    }

    /// Distance from knot `i` to the midpoint of its neighbor chord.
    pub fn midpoint_deviation(&self, i: usize) -> Result<S> {
        let (prev, next) = self
            .neighbor_indices(i)
            .ok_or_else(|| Error::Geometry(format!("knot {i} has no neighbors")))?;
        let mid = (self.knots[prev] + self.knots[next]) * S::of(0.5);
        Ok(self.knots[i].dist(mid))
    }

    /// Sum of squared midpoint deviations over all knots that have two
    /// neighbors. The building block of the regularity prior.
    pub fn deviation_sq_sum(&self) -> S {
        let n = self.knots.len();
        let range: Box<dyn Iterator<Item = usize>> = if self.closed {
            Box::new(0..n)
        } else {
            Box::new(1..n - 1)
        };
        range
            .map(|i| {
                let d = self.midpoint_deviation(i).expect("interior knot");
                d * d
            })
            .sum()
    }

    /// Log of the curve regularity prior, up to its additive constant:
    /// `-(1 / (2 phi^2)) * sum_i d_i^2`.
    pub fn prior_log_density(&self, phi: S) -> Result<S> {
        if phi <= S::zero() {
            return Err(Error::InvalidParam("phi must be > 0".into()));
        }
        let two = S::of(2.0);
        Ok(-self.deviation_sq_sum() / (two * phi * phi))
    }

    /// Per-knot unit normals: left-hand perpendicular of the chord
    /// through each knot's neighbors; end knots of an open curve use
    /// their single adjacent segment.
    pub fn normals(&self) -> Result<NormalFrame<S>> {
        let n = self.knots.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let chord = match self.neighbor_indices(i) {
                Some((prev, next)) => self.knots[next] - self.knots[prev],
                None => {
                    if i == 0 {
                        self.knots[1] - self.knots[0]
                    } else {
                        self.knots[n - 1] - self.knots[n - 2]
                    }
                }
            };
            let dir = match chord.normalized() {
                Some(d) => d,
                None => {
                    // Chord degenerate (prev == next); fall back to the
                    // incoming segment.
                    let (prev, _) = self.neighbor_indices(i).expect("interior knot");
                    (self.knots[i] - self.knots[prev])
                        .normalized()
                        .ok_or_else(|| {
                            Error::Geometry(format!("degenerate normal at knot {i}"))
                        })?
                }
            };
            out.push(dir.perp_left());
        }
        Ok(NormalFrame(out))
    }

    /// Re-knot the polyline at uniform arc length, keeping the geometry:
    /// every output knot lies on an input segment. Closed curves get
    /// `ceil(perimeter / max_spacing)` knots, open curves that many
    /// segments with both endpoints preserved.
    pub fn resample(&self, max_spacing: S) -> Result<Self> {
        if max_spacing <= S::zero() {
            return Err(Error::InvalidParam("max_spacing must be > 0".into()));
        }
        let per = self.perimeter();
        let divisions = (per / max_spacing).ceil().to_f64_lossy() as usize;
        let divisions = divisions.max(if self.closed { 3 } else { 1 });
        let step = per / S::of(divisions as f64);

        let n = self.knots.len();
        let segs = if self.closed { n } else { n - 1 };
        let count = if self.closed { divisions } else { divisions + 1 };
        let mut out = Vec::with_capacity(count);
        let mut seg = 0usize;
        let mut seg_start_arc = S::zero();
        let mut seg_len = self.knots[0].dist(self.knots[1 % n]);
        for k in 0..count {
            if !self.closed && k == count - 1 {
                // preserve the far endpoint exactly
                out.push(self.knots[n - 1]);
                continue;
            }
            let target = step * S::of(k as f64);
            while seg + 1 < segs && target > seg_start_arc + seg_len {
                seg_start_arc = seg_start_arc + seg_len;
                seg += 1;
                seg_len = self.knots[seg].dist(self.knots[(seg + 1) % n]);
            }
            let t = ((target - seg_start_arc) / seg_len).max(S::zero()).min(S::one());
            let a = self.knots[seg];
            let b = self.knots[(seg + 1) % n];
            out.push(a + (b - a) * t);
        }
        Self::new(out, self.closed)
    }

    /// Even-odd scanline fill sampled at pixel centers.
    pub fn rasterize_region(&self, width: usize, height: usize) -> Result<RegionMask> {
        if !self.closed {
            return Err(Error::Geometry("rasterization needs a closed curve".into()));
        }
        let mut mask = vec![false; width * height];
        let mut inside = 0usize;
        let mut xs: Vec<f64> = Vec::new();
        for row in 0..height {
            row_crossings(&self.knots, row as f64, &mut xs);
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for pair in xs.chunks_exact(2) {
                let lo = pair[0].ceil() as i64;
                let hi = pair[1].ceil() as i64 - 1;
                for x in lo.max(0)..=hi.min(width as i64 - 1) {
                    let idx = row * width + x as usize;
                    if !mask[idx] {
                        mask[idx] = true;
                        inside += 1;
                    }
                }
            }
        }
        Ok(RegionMask {
            width,
            height,
            mask,
            inside,
        })
    }

    /// True if no two non-adjacent segments intersect.
    pub fn is_simple(&self) -> bool {
        let n = self.knots.len();
        let segs = if self.closed { n } else { n - 1 };
        for i in 0..segs {
            for j in i + 1..segs {
                // Skip shared-endpoint adjacency (including the wrap pair).
                if j == i + 1 || (self.closed && i == 0 && j == segs - 1) {
                    continue;
                }
                let (a, b) = (self.knots[i], self.knots[(i + 1) % n]);
                let (c, d) = (self.knots[j], self.knots[(j + 1) % n]);
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }
}

/// Horizontal crossings of the polygon boundary with the scanline `y`,
/// using the half-open `(y0 <= y) != (y1 <= y)` rule so vertices count
/// exactly once.
fn row_crossings<S: Real>(knots: &[Vec2<S>], y: f64, out: &mut Vec<f64>) {
    out.clear();
    let n = knots.len();
    for i in 0..n {
        let a = knots[i];
        let b = knots[(i + 1) % n];
        let (y0, y1) = (a.y.to_f64_lossy(), b.y.to_f64_lossy());
        if (y0 <= y) != (y1 <= y) {
            let (x0, x1) = (a.x.to_f64_lossy(), b.x.to_f64_lossy());
            out.push(x0 + (y - y0) * (x1 - x0) / (y1 - y0));
        }
    }
}

/// Per-pixel even-odd test against the same crossing rule as the
/// scanline fill; intended as an independent oracle and for callers that
/// only need single points.
pub fn point_in_polygon<S: Real>(knots: &[Vec2<S>], px: f64, py: f64) -> bool {
    let mut crossings = Vec::new();
    row_crossings(knots, py, &mut crossings);
    crossings.iter().filter(|&&x| x > px).count() % 2 == 1
}

fn orient<S: Real>(a: Vec2<S>, b: Vec2<S>, c: Vec2<S>) -> S {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Proper or touching intersection of segments ab and cd.
fn segments_intersect<S: Real>(a: Vec2<S>, b: Vec2<S>, c: Vec2<S>, d: Vec2<S>) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    let zero = S::zero();
    if ((d1 > zero && d2 < zero) || (d1 < zero && d2 > zero))
        && ((d3 > zero && d4 < zero) || (d3 < zero && d4 > zero))
    {
        return true;
    }
    let on = |p: Vec2<S>, q: Vec2<S>, r: Vec2<S>, orient_val: S| {
        orient_val == zero
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(c, d, a, d1) || on(c, d, b, d2) || on(a, b, c, d3) || on(a, b, d, d4)
}

/// Unit normals per knot.
#[derive(Debug, Clone)]
pub struct NormalFrame<S>(pub Vec<Vec2<S>>);

impl<S: Real> NormalFrame<S> {
    pub fn normal(&self, i: usize) -> Vec2<S> {
        self.0[i]
    }
}

/// Inside/outside mask from region rasterization.
#[derive(Debug, Clone)]
pub struct RegionMask {
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
    pub inside: usize,
}

impl RegionMask {
    pub fn outside(&self) -> usize {
        self.width * self.height - self.inside
    }

    pub fn is_inside(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }
}

#[derive(Serialize, Deserialize)]
struct CurveFile {
    closed: bool,
    knots: Vec<[f64; 2]>,
}

/// Read a curve from the `{"closed": bool, "knots": [[x, y], ...]}` JSON
/// document.
pub fn read_curve_json<S: Real>(path: &Path) -> Result<Curve<S>> {
    let text = fs::read_to_string(path)?;
    let file: CurveFile =
        serde_json::from_str(&text).map_err(|e| Error::CurveFile(e.to_string()))?;
    let knots = file
        .knots
        .iter()
        .map(|&[x, y]| Vec2::new(S::of(x), S::of(y)))
        .collect();
    Curve::new(knots, file.closed)
}

pub fn write_curve_json<S: Real>(curve: &Curve<S>, path: &Path) -> Result<()> {
    let file = CurveFile {
        closed: curve.closed(),
        knots: curve
            .knots()
            .iter()
            .map(|k| [k.x.to_f64_lossy(), k.y.to_f64_lossy()])
            .collect(),
    };
    let text = serde_json::to_string_pretty(&file).map_err(|e| Error::CurveFile(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}
