//! Contour-fitting toolkit: a probabilistic snake driven by per-knot
//! window-variance likelihoods along normals, next to two baselines —
//! the classical energy-minimizing snake and a region-entropy criterion
//! minimized by stochastic search — plus synthetic scenes for testing
//! and benchmarking.
//!
//! All numerics are generic over the scalar type; `f64` is the default
//! type parameter everywhere and the type the CLI runs on.

pub mod casp;
pub mod curve;
pub mod error;
pub mod geom;
pub mod kass;
pub mod prob;
pub mod raster;
pub mod report;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use geom::Vec2;
pub use scalar::Real;

/// Concrete aliases for the default (f64) and single-precision variants.
pub type GrayImage = raster::GrayImage<f64>;
pub type GrayImageF32 = raster::GrayImage<f32>;
pub type IntegralTables = raster::IntegralTables<f64>;
pub type Curve = curve::Curve<f64>;
pub type CurveF32 = curve::Curve<f32>;
pub type FitReport = report::FitReport<f64>;
