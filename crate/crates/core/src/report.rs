//! Run diagnostics shared by all three fitting engines.

use std::time::Duration;

use crate::curve::Curve;
use crate::scalar::Real;

/// Statistics of one optimization pass.
#[derive(Debug, Clone)]
pub struct PassStats<S = f64> {
    pub iterations: usize,
    /// Maximum knot displacement at each iteration, one entry per
    /// iteration executed.
    pub max_displacements: Vec<S>,
    pub duration: Duration,
}

/// Outcome of a fit: the final curve plus per-pass diagnostics.
/// `objective_trace` carries the accepted objective values for engines
/// that minimize an explicit criterion (empty otherwise).
#[derive(Debug, Clone)]
pub struct FitReport<S = f64> {
    pub curve: Curve<S>,
    pub passes: Vec<PassStats<S>>,
    pub objective_trace: Vec<S>,
}

impl<S: Real> FitReport<S> {
    pub fn total_iterations(&self) -> usize {
        self.passes.iter().map(|p| p.iterations).sum()
    }

    pub fn total_duration(&self) -> Duration {
        self.passes.iter().map(|p| p.duration).sum()
    }
}
