//! `snakefit run`: fit one model and write the fitted curve, an optional
//! overlay image and a structured run report.

use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::{json, Map, Value};

use snakefit_core::casp::{casp_fit, CaspParams};
use snakefit_core::curve::{read_curve_json, write_curve_json, Curve};
use snakefit_core::kass::{kass_fit, KassParams};
use snakefit_core::prob::{fit as prob_fit, PassConfig, Schedule};
use snakefit_core::raster::{load_image, GrayImage};
use snakefit_core::report::FitReport;

use crate::overlay;
use crate::CliError;

#[derive(Args, Debug, Default, Clone)]
pub struct RunArgs {
    /// Model to fit: prob, kass or casp.
    #[arg(long)]
    pub model: Option<String>,
    /// Input image (binary P5 graymap or grayscale PNG).
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Initialization curve JSON.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Where to write the fitted curve JSON.
    #[arg(long)]
    pub out_curve: Option<PathBuf>,
    /// Optional P6 overlay of the fitted curve over the input.
    #[arg(long)]
    pub out_overlay: Option<PathBuf>,
    /// Optional JSON run report (iterations, displacements, timing).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// JSON config file supplying any of these options; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,

    // probabilistic snake
    /// Pass-1 search depth.
    #[arg(long)]
    pub depth1: Option<usize>,
    /// Variance window size in pixels (odd).
    #[arg(long)]
    pub window: Option<usize>,
    /// Pass-1 density regularization.
    #[arg(long)]
    pub reg1: Option<f64>,
    /// Maximum knot spacing for the intermediate resampling.
    #[arg(long)]
    pub resample_max: Option<f64>,
    /// Pass-2 search depth.
    #[arg(long)]
    pub depth2: Option<usize>,
    /// Pass-2 density regularization.
    #[arg(long)]
    pub reg2: Option<f64>,
    /// Iteration cap per pass (prob) or per fit (kass).
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Convergence threshold on max knot displacement, pixels.
    #[arg(long)]
    pub epsilon: Option<f64>,

    // classical snake
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,

    // region criterion
    #[arg(long)]
    pub max_deviation: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub reg: Option<f64>,
    #[arg(long)]
    pub k_l: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Flag value if given, else the config-file value, else the default.
struct Resolver {
    file: Map<String, Value>,
}

impl Resolver {
    fn load(path: &Option<PathBuf>) -> Result<Self, CliError> {
        let file = match path {
            None => Map::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Io(format!("config {}: {e}", p.display())))?;
                serde_json::from_str::<Value>(&text)
                    .map_err(|e| CliError::Config(format!("config {}: {e}", p.display())))?
                    .as_object()
                    .cloned()
                    .ok_or_else(|| CliError::Config("config must be a JSON object".into()))?
            }
        };
        Ok(Self { file })
    }

    fn string(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone()
            .or_else(|| self.file.get(key).and_then(|v| v.as_str().map(String::from)))
    }

    fn path(&self, flag: &Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.clone()
            .or_else(|| self.file.get(key).and_then(|v| v.as_str().map(PathBuf::from)))
    }

    fn f64(&self, flag: Option<f64>, key: &str, default: f64) -> f64 {
        flag.or_else(|| self.file.get(key).and_then(Value::as_f64))
            .unwrap_or(default)
    }

    fn usize(&self, flag: Option<usize>, key: &str, default: usize) -> usize {
        flag.or_else(|| self.file.get(key).and_then(|v| v.as_u64().map(|u| u as usize)))
            .unwrap_or(default)
    }

    fn u64(&self, flag: Option<u64>, key: &str, default: u64) -> u64 {
        flag.or_else(|| self.file.get(key).and_then(Value::as_u64))
            .unwrap_or(default)
    }
}

pub enum ModelParams {
    Prob(Schedule<f64>),
    Kass(KassParams<f64>),
    Casp(CaspParams<f64>),
}

pub fn resolve_model(args: &RunArgs) -> Result<(String, ModelParams), CliError> {
    let r = Resolver::load(&args.config)?;
    let model = r
        .string(&args.model, "model")
        .ok_or_else(|| CliError::Config("--model is required".into()))?;
    let window = r.usize(args.window, "window", 7);
    if window % 2 == 0 || window == 0 {
        return Err(CliError::Config(format!(
            "window size must be odd, got {window}"
        )));
    }
    let window_half = window / 2;
    let params = match model.as_str() {
        "prob" => {
            let max_iterations = r.usize(args.max_iter, "max_iter", 100);
            let epsilon = r.f64(args.epsilon, "epsilon", 0.5);
            ModelParams::Prob(Schedule {
                pass1: PassConfig {
                    depth: r.usize(args.depth1, "depth1", 25),
                    window_half,
                    regularization: r.f64(args.reg1, "reg1", 0.0),
                    max_iterations,
                    epsilon,
                },
                resample_max_spacing: r.f64(args.resample_max, "resample_max", 4.0),
                pass2: PassConfig {
                    depth: r.usize(args.depth2, "depth2", 5),
                    window_half,
                    regularization: r.f64(args.reg2, "reg2", 1.0),
                    max_iterations,
                    epsilon,
                },
            })
        }
        "kass" => ModelParams::Kass(KassParams {
            alpha: r.f64(args.alpha, "alpha", 0.1),
            beta: r.f64(args.beta, "beta", 0.1),
            lambda: r.f64(args.lambda, "lambda", 0.5),
            max_iterations: r.usize(args.max_iter, "max_iter", 2000),
            epsilon: r.f64(args.epsilon, "epsilon", 1e-3),
        }),
        "casp" => ModelParams::Casp(CaspParams {
            max_deviation: r.f64(args.max_deviation, "max_deviation", 5.0),
            iterations: r.usize(args.iterations, "iterations", 3000),
            regularization: r.f64(args.reg, "reg", 0.2),
            k_l: r.f64(args.k_l, "k_l", 0.0),
            seed: r.u64(args.seed, "seed", 0),
        }),
        other => {
            return Err(CliError::Config(format!(
                "unknown model '{other}' (expected prob, kass or casp)"
            )))
        }
    };
    Ok((model, params))
}

pub fn load_inputs(
    args: &RunArgs,
) -> Result<(GrayImage<f64>, Curve<f64>, PathBuf, PathBuf), CliError> {
    let r = Resolver::load(&args.config)?;
    let image_path = r
        .path(&args.image, "image")
        .ok_or_else(|| CliError::Config("--image is required".into()))?;
    let init_path = r
        .path(&args.init, "init")
        .ok_or_else(|| CliError::Config("--init is required".into()))?;
    let image = load_image::<f64>(&image_path)?;
    let init = read_curve_json::<f64>(&init_path)?;
    if !init.in_bounds(image.width(), image.height()) {
        return Err(CliError::Model(
            "initialization curve outside image bounds".into(),
        ));
    }
    Ok((image, init, image_path, init_path))
}

pub fn fit_model(
    model: &ModelParams,
    image: &GrayImage<f64>,
    init: &Curve<f64>,
) -> Result<FitReport<f64>, CliError> {
    let report = match model {
        ModelParams::Prob(schedule) => prob_fit(init, image, schedule)?,
        ModelParams::Kass(params) => kass_fit(init, image, params)?,
        ModelParams::Casp(params) => {
            if !init.closed() {
                return Err(CliError::Model("casp requires closed curve".into()));
            }
            casp_fit(init, image, params)?
        }
    };
    Ok(report)
}

pub fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let (model_name, model) = resolve_model(args)?;
    let (image, init, _, _) = load_inputs(args)?;
    let report = fit_model(&model, &image, &init)?;

    let r = Resolver::load(&args.config)?;
    if let Some(path) = r.path(&args.out_curve, "out_curve") {
        write_curve_json(&report.curve, &path)?;
    }
    if let Some(path) = r.path(&args.out_overlay, "out_overlay") {
        overlay::write_overlay(&image, &report.curve, &path)?;
    }
    if let Some(path) = r.path(&args.report, "report") {
        write_report(&model_name, &report, &path)?;
    }
    println!(
        "{model_name}: {} knots, {} iterations, {:.3} ms",
        report.curve.len(),
        report.total_iterations(),
        report.total_duration().as_secs_f64() * 1e3
    );
    Ok(())
}

fn write_report(model: &str, report: &FitReport<f64>, path: &Path) -> Result<(), CliError> {
    let passes: Vec<Value> = report
        .passes
        .iter()
        .map(|p| {
            json!({
                "iterations": p.iterations,
                "max_displacements": p.max_displacements,
                "duration_sec": p.duration.as_secs_f64(),
            })
        })
        .collect();
    let doc = json!({
        "model": model,
        "knots": report.curve.len(),
        "closed": report.curve.closed(),
        "passes": passes,
        "objective_trace": report.objective_trace,
    });
    std::fs::write(path, serde_json::to_string_pretty(&doc).unwrap())
        .map_err(|e| CliError::Io(format!("report {}: {e}", path.display())))?;
    Ok(())
}
