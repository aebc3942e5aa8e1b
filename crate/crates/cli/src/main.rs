//! Command line front end: simulate EI curves, sweep config variants,
//! analyze and plot saved curves, and evaluate the closed-form bound.
//!
//! Exit codes: 0 success, 1 bad configuration or input data, 2 runtime
//! failure (IO, degenerate samples).

use clap::{Args, Parser, Subcommand, ValueEnum};
use mesoscale::analysis::{detect_peak, select_model, FitModel, ModelSelectionReport};
use mesoscale::error::Error;
use mesoscale::experiment::{robustness_sweep, run_curve, EiCurve, ExperimentConfig};
use mesoscale::report::{emit_csv, emit_svg, parse_csv, RunManifest};
use mesoscale::rng::SeedTree;
use mesoscale::theory::{ei_lower_bound, verify_peak, BoundParams, PeakReport, ResponseModel};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(name = "mesoscale", version)]
#[command(about = "Interventional effective information across coarse-graining scales")]
struct Cli {
    /// Override the config's master seed (simulate/sweep) or seed the
    /// bootstrap (analyze/plot)
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write the EI curve as CSV
    Simulate {
        #[command(subcommand)]
        system: SimulateSystem,
    },

    /// Run a list of configs (e.g. a temperature sweep), one CSV each
    Sweep {
        /// JSON array of experiment configs
        #[arg(long)]
        config: PathBuf,

        /// Directory for the emitted files
        #[arg(long, default_value = "sweep_out")]
        out_dir: PathBuf,
    },

    /// Detect the peak scale and run model selection on a saved curve
    Analyze {
        /// Curve CSV written by `simulate` or `sweep`
        curve: PathBuf,

        /// Parametric bootstrap resamples for the peak-location interval
        #[arg(long, default_value_t = 1000)]
        bootstrap: usize,
    },

    /// Evaluate the capacity bound for a response model and locate its peak
    Theory(TheoryArgs),

    /// Render a saved curve as a self-contained SVG
    Plot {
        /// Curve CSV written by `simulate` or `sweep`
        curve: PathBuf,

        /// Output SVG path
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SimulateSystem {
    /// Kinetic spin lattice
    Ising(SimulateArgs),
    /// Pheromone-field agent model
    Abm(SimulateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment config (JSON)
    #[arg(long)]
    config: PathBuf,

    /// Output CSV path (default: `<system>_curve.csv`)
    #[arg(short, long)]
    out: Option<PathBuf>,

    /// Also render the curve to this SVG path
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct TheoryArgs {
    /// Response model family
    #[arg(long)]
    model: ModelKind,

    /// Correlation length (exp model: exp(-ell/lambda))
    #[arg(long)]
    lambda: Option<f64>,

    /// Decay exponent (power model: ell^-alpha)
    #[arg(long)]
    alpha: Option<f64>,

    /// Onset constant (diffusive model: 1 - c/ell^2, clipped at zero)
    #[arg(long)]
    c: Option<f64>,

    /// Block dimension (1, 2, or 3)
    #[arg(long = "d")]
    dimension: u32,

    /// Signal-to-noise scale in front of the signal function
    #[arg(long, default_value_t = 1.0)]
    snr: f64,

    /// Largest scale on the evaluation grid
    #[arg(long, default_value_t = 64.0)]
    ell_max: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Exp,
    Power,
    Diffusive,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure { code: EXIT_CONFIG, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure { code: EXIT_RUNTIME, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        // Everything the library rejects up front is a configuration
        // problem; only data-dependent failures mid-run count as runtime.
        let code = match err {
            Error::DegenerateSample => EXIT_RUNTIME,
            _ => EXIT_CONFIG,
        };
        Failure { code, message: err.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { system } => {
            let (expected, args) = match system {
                SimulateSystem::Ising(args) => ("ising", args),
                SimulateSystem::Abm(args) => ("abm", args),
            };
            simulate(expected, args, cli.seed)
        }
        Command::Sweep { config, out_dir } => sweep(&config, &out_dir, cli.seed),
        Command::Analyze { curve, bootstrap } => analyze(&curve, bootstrap, cli.seed),
        Command::Theory(args) => theory(&args),
        Command::Plot { curve, out } => plot(&curve, &out, cli.seed),
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|err| Failure::runtime(format!("{}: {err}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|err| Failure::runtime(format!("{}: {err}", path.display())))
}

fn read_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = read_file(path)?;
    serde_json::from_str(&text)
        .map_err(|err| Failure::config(format!("{}: {err}", path.display())))
}

fn print_curve(curve: &EiCurve) {
    for point in &curve.points {
        let degenerate = if point.degenerate_trials > 0 {
            format!("  ({} degenerate trials skipped)", point.degenerate_trials)
        } else {
            String::new()
        };
        println!(
            "  b={:<3} EI = {:.4} +- {:.4} bits{degenerate}",
            point.block_size, point.ei_mean_bits, point.ei_sem_bits
        );
    }
    if let Ok(peak) = detect_peak(curve) {
        let boundary = if peak.at_boundary { "  [warning: peak on grid boundary]" } else { "" };
        println!("peak at b={} (EI {:.4} bits){boundary}", peak.scale, peak.ei_mean_bits);
    }
}

fn simulate(expected: &'static str, args: SimulateArgs, seed: Option<u64>) -> CliResult<()> {
    let mut config = read_config(&args.config)?;
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if config.system.name() != expected {
        return Err(Failure::config(format!(
            "{}: config describes an `{}` system but the subcommand asked for `{}`",
            args.config.display(),
            config.system.name(),
            expected
        )));
    }

    let started = Instant::now();
    let curve = run_curve(&config)?;
    let wall = started.elapsed().as_secs_f64();

    println!(
        "{} curve: L={}, {} scales, {} trials x {} replicates, seed {} ({:.1}s)",
        expected,
        config.grid_size,
        curve.points.len(),
        config.trials_per_scale,
        config.replicates,
        config.master_seed,
        wall
    );
    print_curve(&curve);

    let out = args.out.unwrap_or_else(|| PathBuf::from(format!("{expected}_curve.csv")));
    write_file(&out, &emit_csv(&curve)?)?;
    let mut outputs = vec![out.display().to_string()];

    if let Some(svg_path) = &args.svg {
        let report = annotation_report(&curve, 1000, config.master_seed);
        write_file(svg_path, &emit_svg(&curve, report.as_ref())?)?;
        outputs.push(svg_path.display().to_string());
    }

    let manifest_path = out.with_extension("manifest.json");
    let manifest = RunManifest::new(&config, wall, outputs.clone());
    write_file(&manifest_path, &manifest.to_json())?;
    outputs.push(manifest_path.display().to_string());

    for path in &outputs {
        println!("wrote {path}");
    }
    Ok(())
}

fn sweep(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> CliResult<()> {
    let text = read_file(config_path)?;
    let mut configs: Vec<ExperimentConfig> = serde_json::from_str(&text)
        .map_err(|err| Failure::config(format!("{}: {err}", config_path.display())))?;
    if configs.is_empty() {
        return Err(Failure::config(format!("{}: empty sweep", config_path.display())));
    }
    if let Some(seed) = seed {
        // Entry i runs under seed + i so variants stay independent.
        for (i, config) in configs.iter_mut().enumerate() {
            config.master_seed = seed + i as u64;
        }
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|err| Failure::runtime(format!("{}: {err}", out_dir.display())))?;

    let started = Instant::now();
    let results = robustness_sweep(&configs);
    let wall = started.elapsed().as_secs_f64();

    let mut first_failure: Option<Failure> = None;
    for (i, (config, result)) in configs.iter().zip(&results).enumerate() {
        match result {
            Ok(curve) => {
                let stem = format!("{i:02}_{}_{}", curve.system, curve.config_fingerprint);
                let csv_path = out_dir.join(format!("{stem}.csv"));
                write_file(&csv_path, &emit_csv(curve)?)?;
                let manifest = RunManifest::new(
                    config,
                    wall / results.len() as f64,
                    vec![csv_path.display().to_string()],
                );
                write_file(&out_dir.join(format!("{stem}.manifest.json")), &manifest.to_json())?;
                let peak = detect_peak(curve)
                    .map(|p| format!("peak b={} ({:.4} bits)", p.scale, p.ei_mean_bits))
                    .unwrap_or_else(|_| "too few scales for a peak".into());
                println!("[{i}] {} seed {}: {peak} -> {}", curve.system, curve.master_seed, csv_path.display());
            }
            Err(err) => {
                eprintln!("[{i}] {} failed: {err}", config.system.name());
                if first_failure.is_none() {
                    first_failure = Some(Failure::from(err.clone()));
                }
            }
        }
    }
    match first_failure {
        Some(failure) => Err(Failure {
            code: failure.code,
            message: format!("sweep finished with failures (first: {})", failure.message),
        }),
        None => Ok(()),
    }
}

/// Model selection for plot annotations: skipped silently when the curve
/// does not support it (too few scales, missing sems).
fn annotation_report(
    curve: &EiCurve,
    bootstrap: usize,
    seed: u64,
) -> Option<ModelSelectionReport> {
    let mut rng = SeedTree::new(seed).child("bootstrap", 0).stream();
    select_model(curve, bootstrap, &mut rng).ok()
}

fn model_label(model: FitModel) -> &'static str {
    match model {
        FitModel::MonotoneIncreasing => "monotone increasing",
        FitModel::MonotoneDecreasing => "monotone decreasing",
        FitModel::Unimodal => "unimodal",
    }
}

fn analyze(curve_path: &Path, bootstrap: usize, seed: Option<u64>) -> CliResult<()> {
    let curve = parse_csv(&read_file(curve_path)?)?;
    println!(
        "{}: {} system, {} scales, seed {}",
        curve_path.display(),
        curve.system,
        curve.points.len(),
        curve.master_seed
    );
    print_curve(&curve);

    let mut rng = SeedTree::new(seed.unwrap_or(curve.master_seed)).child("bootstrap", 0).stream();
    match select_model(&curve, bootstrap, &mut rng) {
        Ok(report) => {
            for fit in &report.candidates {
                println!(
                    "  {:<20} AIC {:8.2}  (chi2 {:7.2}, {} levels)",
                    model_label(fit.model),
                    fit.aic,
                    fit.chi2,
                    fit.levels
                );
            }
            println!("best shape: {}", model_label(report.best_model));
            if report.inconclusive {
                println!("note: AIC gap below 2; the ranking is inconclusive");
            }
            if let (Some(peak), Some((lo, hi))) = (report.peak_scale, report.peak_ci) {
                println!("model peak at b={peak} (95% bootstrap CI {lo}..{hi}, {bootstrap} resamples)");
            }
        }
        // A short or sem-free curve is still worth the peak summary above.
        Err(Error::InsufficientScales { need, got }) => {
            println!("model selection skipped: needs {need} scales, curve has {got}");
        }
        Err(Error::Config(reason)) => {
            println!("model selection skipped: {reason}");
        }
        Err(err) => return Err(err.into()),
    }
    Ok(())
}

fn theory(args: &TheoryArgs) -> CliResult<()> {
    let reject_extra = |flag: &str, present: bool| {
        if present {
            Err(Failure::config(format!("--{flag} does not apply to this model")))
        } else {
            Ok(())
        }
    };
    let model = match args.model {
        ModelKind::Exp => {
            reject_extra("alpha", args.alpha.is_some())?;
            reject_extra("c", args.c.is_some())?;
            let lambda =
                args.lambda.ok_or_else(|| Failure::config("--model exp requires --lambda"))?;
            ResponseModel::Exponential { lambda }
        }
        ModelKind::Power => {
            reject_extra("lambda", args.lambda.is_some())?;
            reject_extra("c", args.c.is_some())?;
            let alpha =
                args.alpha.ok_or_else(|| Failure::config("--model power requires --alpha"))?;
            ResponseModel::PowerLaw { alpha }
        }
        ModelKind::Diffusive => {
            reject_extra("lambda", args.lambda.is_some())?;
            reject_extra("alpha", args.alpha.is_some())?;
            let c = args.c.ok_or_else(|| Failure::config("--model diffusive requires --c"))?;
            ResponseModel::Diffusive { c }
        }
    };
    let params = BoundParams { model, dimension: args.dimension, snr_scale: args.snr };

    const STEP: f64 = 0.25;
    if !(args.ell_max >= 2.0 * STEP) || !args.ell_max.is_finite() {
        return Err(Failure::config("--ell-max must be at least 0.5"));
    }
    let steps = (args.ell_max / STEP).floor() as usize;
    let grid: Vec<f64> = (1..=steps).map(|i| i as f64 * STEP).collect();

    let mut ell = 1.0;
    while ell <= args.ell_max {
        println!("  ell={:<6} bound {:.4} bits", ell, ei_lower_bound(&params, ell)?);
        ell *= 2.0;
    }
    match verify_peak(&params, &grid) {
        Ok(PeakReport { ell_star, is_unimodal, derivative_sign_changes }) => {
            println!(
                "interior peak at ell* = {ell_star:.4} (bound {:.4} bits)",
                ei_lower_bound(&params, ell_star)?
            );
            if is_unimodal {
                println!("shape: single rise and fall on (0, {}]", args.ell_max);
            } else {
                println!(
                    "shape: {} derivative sign changes; not unimodal on this grid",
                    derivative_sign_changes
                );
            }
        }
        Err(Error::NoInteriorPeak) => {
            println!("no interior peak: the bound never rises and falls on (0, {}]", args.ell_max);
        }
        Err(err) => return Err(err.into()),
    }
    Ok(())
}

fn plot(curve_path: &Path, out: &Path, seed: Option<u64>) -> CliResult<()> {
    let curve = parse_csv(&read_file(curve_path)?)?;
    let report = annotation_report(&curve, 1000, seed.unwrap_or(curve.master_seed));
    write_file(out, &emit_svg(&curve, report.as_ref())?)?;
    println!("wrote {}", out.display());
    Ok(())
}
