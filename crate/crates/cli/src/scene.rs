//! `scene` subcommand: render a synthetic test image plus the curve file
//! describing its true boundary.

use std::path::PathBuf;

use clap::Args;
use snakefit_core::curve::write_curve_json;
use snakefit_core::raster::{make_scene, save_pgm, SceneKind};

use crate::CliError;

#[derive(Debug, Args)]
pub struct SceneArgs {
    /// Scene family to render.
    #[arg(long, value_parser = ["step-edge", "disk", "two-region-gaussian", "polyline-edge"])]
    pub kind: String,

    /// Side length of the square image in pixels.
    #[arg(long, default_value_t = 256)]
    pub size: usize,

    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,

    /// RNG seed; a fixed seed reproduces the image exactly.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Where to write the PGM image.
    #[arg(long)]
    pub out_image: PathBuf,

    /// Optional path for the true-boundary curve file.
    #[arg(long)]
    pub out_truth: Option<PathBuf>,

    /// Disk radius (disk and two-region-gaussian); defaults to size / 4.
    #[arg(long)]
    pub radius: Option<f64>,

    /// Low intensity level (step-edge, polyline-edge).
    #[arg(long, default_value_t = 0.0)]
    pub low: f64,

    /// High intensity level (step-edge, polyline-edge).
    #[arg(long, default_value_t = 100.0)]
    pub high: f64,

    /// Disk intensity level for the plain disk scene.
    #[arg(long, default_value_t = 100.0)]
    pub inside: f64,

    /// Background intensity level for the plain disk scene.
    #[arg(long, default_value_t = 0.0)]
    pub outside: f64,

    /// Region means and spread for the two-region Gaussian scene.
    #[arg(long, default_value_t = 150.0)]
    pub mean_in: f64,
    #[arg(long, default_value_t = 50.0)]
    pub mean_out: f64,
    #[arg(long, default_value_t = 10.0)]
    pub sigma: f64,

    /// Step-edge column; defaults to size / 2.
    #[arg(long)]
    pub edge_col: Option<usize>,
}

pub fn cmd_scene(args: &SceneArgs) -> Result<(), CliError> {
    let size = args.size;
    let radius = args.radius.unwrap_or(size as f64 / 4.0);
    let kind: SceneKind<f64> = match args.kind.as_str() {
        "step-edge" => SceneKind::StepEdge {
            low: args.low,
            high: args.high,
            edge_col: args.edge_col.unwrap_or(size / 2),
        },
        "disk" => SceneKind::Disk {
            radius,
            inside: args.inside,
            outside: args.outside,
        },
        "two-region-gaussian" => SceneKind::TwoRegionGaussian {
            radius,
            mean_inside: args.mean_in,
            mean_outside: args.mean_out,
            sigma: args.sigma,
        },
        "polyline-edge" => SceneKind::PolylineEdge {
            low: args.low,
            high: args.high,
        },
        other => return Err(CliError::Config(format!("unknown scene kind '{other}'"))),
    };
    let scene = make_scene(&kind, size, size, args.noise, args.seed)?;
    save_pgm(&scene.image, 255, &args.out_image)?;
    if let Some(truth_path) = &args.out_truth {
        let truth = scene.truth.to_curve(size, size)?;
        write_curve_json(&truth, truth_path)?;
    }
    println!(
        "scene {} {}x{} noise={} seed={} -> {}",
        args.kind,
        size,
        size,
        args.noise,
        args.seed,
        args.out_image.display()
    );
    Ok(())
}
