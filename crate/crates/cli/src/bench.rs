//! `snakefit bench`: time several models on the same image and
//! initialization, reporting per-model medians and speedup ratios.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;

use crate::run::{self, ModelParams, RunArgs};
use crate::CliError;

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Comma-separated model list, e.g. "prob,kass".
    #[arg(long, default_value = "prob,kass")]
    pub models: String,

    /// Repetitions per model; with 4 or more the first (warm-up) run
    /// is discarded before taking the median.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,

    /// Optional CSV copy of the comparison table.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

struct BenchRow {
    model: String,
    knots: usize,
    iterations: usize,
    median_sec: f64,
    per_iter_sec: f64,
}

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.reps < 3 {
        return Err(CliError::Config(format!(
            "bench needs at least 3 repetitions, got {}",
            args.reps
        )));
    }
    let models: Vec<String> = args
        .models
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if models.is_empty() {
        return Err(CliError::Config("empty model list".into()));
    }

    let (image, init, image_path, init_path) = run::load_inputs(&args.run)?;

    // Spacing used to match knot counts across models (the probabilistic
    // fit resamples internally, so the others start from the same grid).
    let spacing = {
        let mut p = args.run.clone();
        p.model = Some("prob".into());
        match run::resolve_model(&p)? {
            (_, ModelParams::Prob(s)) => s.resample_max_spacing,
            _ => unreachable!(),
        }
    };

    let mut rows = Vec::new();
    for name in &models {
        let mut one = args.run.clone();
        one.model = Some(name.clone());
        let (_, params) = run::resolve_model(&one)?;
        let start = match &params {
            ModelParams::Prob(_) => init.clone(),
            ModelParams::Kass(_) | ModelParams::Casp(_) => {
                init.resample(spacing).map_err(CliError::from)?
            }
        };

        let mut times = Vec::with_capacity(args.reps);
        let mut last = None;
        for _ in 0..args.reps {
            let t0 = Instant::now();
            let report = run::fit_model(&params, &image, &start)?;
            times.push(t0.elapsed().as_secs_f64());
            last = Some(report);
        }
        if args.reps >= 4 {
            times.remove(0);
        }
        let report = last.unwrap();
        let iterations = report.total_iterations().max(1);
        let median_sec = median(&mut times);
        rows.push(BenchRow {
            model: name.clone(),
            knots: report.curve.len(),
            iterations,
            median_sec,
            per_iter_sec: median_sec / iterations as f64,
        });
    }

    let baseline = rows
        .iter()
        .find(|r| r.model == "prob")
        .map(|r| r.median_sec)
        .unwrap_or(rows[0].median_sec);
    let show_ratio = rows.len() > 1;

    println!(
        "bench: image {} init {} reps {}",
        image_path.display(),
        init_path.display(),
        args.reps
    );
    println!(
        "environment: {} {} ({} build)",
        std::env::consts::OS,
        std::env::consts::ARCH,
        if cfg!(debug_assertions) { "debug" } else { "release" }
    );
    print!("{:<8} {:>6} {:>10} {:>12} {:>12}", "model", "knots", "iterations", "median_ms", "us_per_iter");
    if show_ratio {
        print!(" {:>8}", "ratio");
    }
    println!();
    for r in &rows {
        print!(
            "{:<8} {:>6} {:>10} {:>12.3} {:>12.3}",
            r.model,
            r.knots,
            r.iterations,
            r.median_sec * 1e3,
            r.per_iter_sec * 1e6
        );
        if show_ratio {
            print!(" {:>8.2}", r.median_sec / baseline);
        }
        println!();
    }

    if let Some(path) = &args.out_csv {
        let mut csv = String::from(if show_ratio {
            "model,knots,iterations,median_sec,sec_per_iter,ratio\n"
        } else {
            "model,knots,iterations,median_sec,sec_per_iter\n"
        });
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{:.9},{:.12}",
                r.model, r.knots, r.iterations, r.median_sec, r.per_iter_sec
            ));
            if show_ratio {
                csv.push_str(&format!(",{:.6}", r.median_sec / baseline));
            }
            csv.push('\n');
        }
        std::fs::write(path, csv)
            .map_err(|e| CliError::Io(format!("csv {}: {e}", path.display())))?;
    }
    Ok(())
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
