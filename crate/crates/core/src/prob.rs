//! Probabilistic snake: per-knot likelihood profiles sampled along the
//! normals (window variance as the edge density), optional density
//! regularization favoring near candidates, synchronous maximum-likelihood
//! knot updates and the coarse-to-fine two-pass schedule with an
//! intermediate arc-length resampling.

use std::time::Instant;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::raster::{GrayImage, IntegralTables};
use crate::report::{FitReport, PassStats};
use crate::scalar::Real;

/// Parameters of one optimization pass.
#[derive(Debug, Clone)]
pub struct PassConfig<S = f64> {
    /// Search depth L: candidates at offsets -L..=+L along the normal.
    pub depth: usize,
    /// Window half-size; the variance window is `(2*half+1)^2` pixels.
    pub window_half: usize,
    /// Strength of the near-candidate density weighting; 0 disables it.
    pub regularization: S,
    pub max_iterations: usize,
    /// Convergence threshold on the per-iteration maximum knot
    /// displacement, in pixels.
    pub epsilon: S,
}

impl<S: Real> PassConfig<S> {
    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 {
            return Err(Error::InvalidParam("depth must be >= 1".into()));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidParam("max_iterations must be >= 1".into()));
        }
        if self.regularization < S::zero() {
            return Err(Error::InvalidParam("regularization must be >= 0".into()));
        }
        if self.epsilon < S::zero() || !self.epsilon.is_finite() {
            return Err(Error::InvalidParam("epsilon must be >= 0".into()));
        }
        Ok(())
    }
}

/// The coarse-to-fine schedule: deep search on few knots, resample,
/// shallow search on all knots.
#[derive(Debug, Clone)]
pub struct Schedule<S = f64> {
    pub pass1: PassConfig<S>,
    pub resample_max_spacing: S,
    pub pass2: PassConfig<S>,
}

impl<S: Real> Schedule<S> {
    pub fn validate(&self) -> Result<()> {
        self.pass1.validate()?;
        self.pass2.validate()?;
        if self.resample_max_spacing <= S::zero() {
            return Err(Error::InvalidParam(
                "resample_max_spacing must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Sampled edge likelihood of one knot along its normal.
#[derive(Debug, Clone)]
pub struct DensityProfile<S = f64> {
    pub knot: usize,
    pub depth: usize,
    /// Raw scores s(j), window variance per candidate, index `j + depth`.
    pub raw: Vec<S>,
    /// Regularized scores r(j) = s(j) * w(j).
    pub regularized: Vec<S>,
}

impl<S: Real> DensityProfile<S> {
    /// Build a profile directly from raw scores (tests and synthetic
    /// profiles); regularized scores start equal to the raw ones.
    pub fn from_raw(knot: usize, depth: usize, raw: Vec<S>) -> Result<Self> {
        if raw.len() != 2 * depth + 1 {
            return Err(Error::InvalidParam(format!(
                "profile needs {} entries, got {}",
                2 * depth + 1,
                raw.len()
            )));
        }
        let regularized = raw.clone();
        Ok(Self {
            knot,
            depth,
            raw,
            regularized,
        })
    }

    pub fn raw_at(&self, j: isize) -> S {
        self.raw[(j + self.depth as isize) as usize]
    }

    pub fn regularized_at(&self, j: isize) -> S {
        self.regularized[(j + self.depth as isize) as usize]
    }

    fn offsets(&self) -> impl Iterator<Item = isize> {
        let l = self.depth as isize;
        -l..=l
    }
}

/// Window variance at each candidate `knot + j * normal` for
/// `j = -L..=L`, sampled at the nearest pixel center. Candidates outside
/// the image score zero.
pub fn score_profile<S: Real>(
    tables: &IntegralTables<S>,
    knot_index: usize,
    knot: Vec2<S>,
    normal: Vec2<S>,
    cfg: &PassConfig<S>,
) -> DensityProfile<S> {
    let l = cfg.depth as isize;
    let (w, h) = (tables.width() as f64, tables.height() as f64);
    let mut raw = Vec::with_capacity(2 * cfg.depth + 1);
    for j in -l..=l {
        let step = S::of(j as f64);
        let px = (knot.x + normal.x * step).to_f64_lossy().round();
        let py = (knot.y + normal.y * step).to_f64_lossy().round();
        let score = if px < 0.0 || py < 0.0 || px >= w || py >= h {
            S::zero()
        } else {
            tables
                .window_stats(px as usize, py as usize, cfg.window_half)
                .map(|(_, var)| var)
                .unwrap_or(S::zero())
        };
        raw.push(score);
    }
    DensityProfile::from_raw(knot_index, cfg.depth, raw).expect("length by construction")
}

/// Multiply the profile by the near-candidate weight
/// `w(j) = exp(-reg * (j / L)^2)`; `reg = 0` leaves it untouched.
pub fn regularize_profile<S: Real>(
    profile: &DensityProfile<S>,
    regularization: S,
) -> Result<DensityProfile<S>> {
    if regularization < S::zero() {
        return Err(Error::InvalidParam("regularization must be >= 0".into()));
    }
    let l = S::of(profile.depth as f64);
    let mut out = profile.clone();
    if regularization > S::zero() {
        for (idx, j) in profile.offsets().enumerate() {
            let t = S::of(j as f64) / l;
            out.regularized[idx] = profile.raw[idx] * (-regularization * t * t).exp();
        }
    } else {
        out.regularized = profile.raw.clone();
    }
    Ok(out)
}

/// Argmax of the regularized scores. Ties break toward the smallest |j|,
/// then toward the negative side; an all-zero profile holds position.
pub fn select_offset<S: Real>(profile: &DensityProfile<S>) -> isize {
    let mut best_j = 0isize;
    let mut best = profile.regularized_at(0);
    let l = profile.depth as isize;
    // Visit in increasing |j|, negative first, replacing only on a
    // strictly larger score; this realizes the tie-break order.
    for a in 1..=l {
        for j in [-a, a] {
            let v = profile.regularized_at(j);
            if v > best {
                best = v;
                best_j = j;
            }
        }
    }
    best_j
}

/// One synchronous update: every knot reads the same input snapshot,
/// scores its profile and moves to the selected candidate (clamped to
/// image bounds). Returns the new curve and the maximum displacement.
pub fn iterate<S: Real>(
    curve: &Curve<S>,
    tables: &IntegralTables<S>,
    cfg: &PassConfig<S>,
) -> Result<(Curve<S>, S)> {
    let normals = curve.normals()?;
    let (w, h) = (
        S::of((tables.width() - 1) as f64),
        S::of((tables.height() - 1) as f64),
    );
    let mut new_knots = Vec::with_capacity(curve.len());
    let mut max_disp = S::zero();
    for (i, &knot) in curve.knots().iter().enumerate() {
        let normal = normals.normal(i);
        let profile = score_profile(tables, i, knot, normal, cfg);
        let profile = regularize_profile(&profile, cfg.regularization)?;
        let j = select_offset(&profile);
        let next = knot + normal * S::of(j as f64);
        let next = Vec2::new(
            next.x.max(S::zero()).min(w),
            next.y.max(S::zero()).min(h),
        );
        max_disp = max_disp.max(next.dist(knot));
        new_knots.push(next);
    }
    let next = Curve::new(new_knots, curve.closed())?;
    Ok((next, max_disp))
}

/// Repeat `iterate` until the maximum displacement drops to `epsilon`
/// or `max_iterations` is reached.
pub fn run_pass<S: Real>(
    curve: &Curve<S>,
    tables: &IntegralTables<S>,
    cfg: &PassConfig<S>,
) -> Result<(Curve<S>, PassStats<S>)> {
    cfg.validate()?;
    let start = Instant::now();
    let mut current = curve.clone();
    let mut displacements = Vec::new();
    for _ in 0..cfg.max_iterations {
        let (next, disp) = iterate(&current, tables, cfg)?;
        current = next;
        displacements.push(disp);
        if disp <= cfg.epsilon {
            break;
        }
    }
    let stats = PassStats {
        iterations: displacements.len(),
        max_displacements: displacements,
        duration: start.elapsed(),
    };
    Ok((current, stats))
}

/// Full coarse-to-fine fit: pass 1 on the initialization, arc-length
/// resampling, pass 2 on the dense curve.
pub fn fit<S: Real>(
    init: &Curve<S>,
    img: &GrayImage<S>,
    schedule: &Schedule<S>,
) -> Result<FitReport<S>> {
    schedule.validate()?;
    if !init.in_bounds(img.width(), img.height()) {
        return Err(Error::InvalidCurve(
            "initialization outside image bounds".into(),
        ));
    }
    let tables = IntegralTables::build(img);
    let (coarse, stats1) = run_pass(init, &tables, &schedule.pass1)?;
    let dense = coarse.resample(schedule.resample_max_spacing)?;
    let (fine, stats2) = run_pass(&dense, &tables, &schedule.pass2)?;
    Ok(FitReport {
        curve: fine,
        passes: vec![stats1, stats2],
        objective_trace: Vec::new(),
    })
}
