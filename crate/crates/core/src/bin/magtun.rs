use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use magtun::cli::{self, Cache, ExperimentConfig, ExperimentKind};

/// Numerical laboratory for tunneling between purely magnetic wells.
#[derive(Debug, Parser)]
#[command(name = "magtun", version)]
struct Args {
    experiment: ExperimentKind,
    /// JSON configuration (`"schema": 1`); the built-in scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Semiclassical parameters, replacing the configured list.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    h: Vec<f64>,
    /// Flea amplitudes, replacing the configured list.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    t: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Planar nodes per side (odd).
    #[arg(long)]
    grid_n: Option<usize>,
    /// Relative residual tolerance of the planar eigensolver.
    #[arg(long)]
    tol: Option<f64>,
}

fn build_config(args: &Args) -> magtun::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default_for(args.experiment),
    };
    cfg.experiment = args.experiment;
    if !args.h.is_empty() {
        cfg.h_list = args.h.clone();
    }
    if !args.t.is_empty() {
        cfg.t_list = args.t.clone();
    }
    if let Some(o) = &args.out {
        cfg.output = Some(o.clone());
    }
    if let Some(s) = args.seed {
        cfg.solver.seed = s;
    }
    if args.grid_n.is_some() {
        cfg.grid.n = args.grid_n;
    }
    if let Some(t) = args.tol {
        cfg.solver.tol = t;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            println!("{}", serde_json::json!({ "status": "validation_failed", "error": e.to_string() }));
            return ExitCode::from(2);
        }
    };
    let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from("magtun-out"));
    let report = cli::validate_config(&cfg);
    if !report.passed() {
        let doc = serde_json::json!({ "status": "validation_failed", "report": report });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap_or_default());
        return ExitCode::from(2);
    }
    let cache = match Cache::on_disk(&out.join("cache")) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("magtun: {e}");
            return ExitCode::from(3);
        }
    };
    let record = match cli::run_experiment(&cfg, &cache) {
        Ok(r) => r,
        Err(e) => {
            let code = if cli::is_validation_error(&e) { 2 } else { 3 };
            println!("{}", serde_json::json!({ "status": "failed", "error": e.to_string() }));
            return ExitCode::from(code);
        }
    };
    let partial = record.partial();
    match cli::emit_report(std::slice::from_ref(&record), &out) {
        Ok(paths) => {
            eprintln!(
                "magtun: {} rows ({} computed, {} cached) -> {}",
                record.rows.len(),
                cache.computed(),
                cache.hits(),
                paths.csv.display()
            );
        }
        Err(e) => {
            eprintln!("magtun: cannot write report: {e}");
            return ExitCode::from(3);
        }
    }
    if partial {
        for f in &record.failures {
            eprintln!("magtun: failed {f}");
        }
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
