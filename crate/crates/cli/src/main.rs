//! `adalr`: run preset experiments, compare their summaries, list presets.

use std::path::PathBuf;
use std::process::ExitCode;

use adalr_core::experiment::{
    compare, group_by_label, load_summaries, preset_catalog, run_experiment, ExperimentConfig,
};
use adalr_core::{EstimatorKind, Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "adalr", version, about = "Projected adaptive learning-rate optimizer experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run presets or an explicit schedule on a synthetic problem.
    Run(RunArgs),
    /// Compare run summaries (JSON files or run directories) on one problem.
    Compare {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Write the comparison CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the preset catalog.
    ListPresets,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated preset names, e.g. ADAM-C2,AMSG-D3.
    #[arg(long, value_delimiter = ',')]
    preset: Vec<String>,
    /// Problem spec, e.g. `quadratic:d=10,sigma=0.1`.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    steps: Option<u64>,
    /// Comma-separated list (`0,1,2`) or half-open range (`0..10`).
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    record_every: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Constant alpha, or the scale of alpha/n^eta together with --eta.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// beta_n = lambda^n.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// adam-max or amsgrad.
    #[arg(long)]
    estimator: Option<String>,
    /// Use the box [-H, H]^d as the feasible set.
    #[arg(long = "box", value_name = "H", conflicts_with = "ball")]
    box_half: Option<f64>,
    /// Use the centered ball of radius R as the feasible set.
    #[arg(long, value_name = "R")]
    ball: Option<f64>,
    /// Comma-separated starting point; drawn uniformly from the set if absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Fill the wall_ms column (makes CSVs non-reproducible).
    #[arg(long)]
    record_wall_time: bool,
    #[arg(long, short)]
    quiet: bool,
}

fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config {
        field: "seeds".into(),
        reason: format!("cannot parse `{text}` (use `0,1,2` or `0..10`)"),
    };
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect()
}

fn build_config(args: RunArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| match e {
            Error::Io(io) => Error::Config {
                field: "config".into(),
                reason: format!("{}: {io}", path.display()),
            },
            other => other,
        })?,
        None => {
            let problem = args.problem.clone().ok_or_else(|| Error::Config {
                field: "problem".into(),
                reason: "required (flag or config file)".into(),
            })?;
            let steps = args.steps.ok_or_else(|| Error::Config {
                field: "steps".into(),
                reason: "required (flag or config file)".into(),
            })?;
            ExperimentConfig::new(problem, steps)
        }
    };
    if let Some(p) = args.problem {
        config.problem = p;
    }
    if let Some(s) = args.steps {
        config.steps = s;
    }
    if !args.preset.is_empty() {
        config.presets = args.preset;
    }
    if let Some(s) = args.seeds {
        config.seeds = parse_seeds(&s)?;
    }
    if let Some(k) = args.record_every {
        config.record_every = Some(k);
    }
    if let Some(out) = args.out {
        config.out = out;
    }
    if let Some(e) = args.estimator {
        config.estimator = Some(e.parse::<EstimatorKind>()?);
    }
    let overrides = [
        (&mut config.alpha, args.alpha),
        (&mut config.eta, args.eta),
        (&mut config.beta, args.beta),
        (&mut config.lambda, args.lambda),
        (&mut config.gamma, args.gamma),
        (&mut config.delta, args.delta),
        (&mut config.epsilon, args.epsilon),
    ];
    for (slot, value) in overrides {
        if value.is_some() {
            *slot = value;
        }
    }
    if args.box_half.is_some() {
        config.box_half = args.box_half;
        config.ball = None;
    }
    if args.ball.is_some() {
        config.ball = args.ball;
        config.box_half = None;
    }
    if args.x0.is_some() {
        config.x0 = args.x0;
    }
    config.record_wall_time |= args.record_wall_time;
    Ok(config)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let quiet = args.quiet;
    let config = build_config(args)?;
    let report = run_experiment(&config)?;
    if quiet {
        return Ok(());
    }
    for s in &report.summaries {
        println!(
            "{:<16} seed {:<4} final f {:.6e}  gap {:.3e}  ({:.0} steps/s)  -> {}",
            s.label,
            s.seed,
            s.final_f,
            s.final_gap,
            s.steps_per_sec,
            report.out.join(&s.csv).display()
        );
    }
    if let Some(table) = &report.comparison {
        println!();
        print!("{}", table.render());
    }
    Ok(())
}

fn cmd_compare(paths: Vec<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let mut groups = Vec::new();
    for path in &paths {
        groups.extend(group_by_label(load_summaries(path)?));
    }
    let table = compare(&groups).map_err(|e| match e {
        Error::InsufficientSamples(reason) => Error::Config {
            field: "paths".into(),
            reason,
        },
        other => other,
    })?;
    print!("{}", table.render());
    if let Some(out) = out {
        table.write_csv(&out)?;
    }
    Ok(())
}

fn cmd_list_presets() {
    println!("{:<10} {:<9} schedule", "preset", "estimator");
    for p in preset_catalog() {
        println!("{:<10} {:<9} {}", p.name, p.estimator, p.schedule);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare { paths, out } => cmd_compare(paths, out),
        Command::ListPresets => {
            cmd_list_presets();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
