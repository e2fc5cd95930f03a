//! Experiment orchestration: the preset catalog, flat config files, problem
//! spec strings, concurrent run fan-out and on-disk artifacts.
//!
//! Problem specs use `name:key=value,...`:
//!
//! | name          | keys (defaults)                                              |
//! |---------------|--------------------------------------------------------------|
//! | `quadratic`   | `d=10, span=10, sigma=0.1, half=1, seed=0`, optional `target` |
//! | `logistic`    | `d=10, n=200, noise=0.1, half=2, seed=0`                      |
//! | `wells`       | `d=4, sigma=0.1, half=2`                                      |
//! | `adversarial` | `period=3, magnitude=3`                                       |
//!
//! Each run writes `<label>_seed<k>.csv` with columns [`CSV_HEADER`] and a
//! `<label>_seed<k>.json` [`RunSummary`]. The `regret` column is empty for
//! offline problems and `wall_ms` is empty unless wall time is recorded.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{run, RunOptions};
use crate::error::{Error, Result};
use crate::feasible::FeasibleSet;
use crate::metrics::{
    mean_and_standard_error, reference_optimum, BoundReport, RateQuantity, RunRecord, TheoryConstants,
};
use crate::moment::EstimatorKind;
use crate::oracle::{
    log_spaced, make_adversarial_online, make_noisy_logistic, make_nonconvex_wells, make_stochastic_quadratic,
    quadratic_with_target, ProblemSpec, SeedState,
};
use crate::schedule::{AlphaRule, BetaRule, ScheduleConfig, DEFAULT_DELTA, DEFAULT_EPSILON};

pub const CSV_HEADER: [&str; 8] = [
    "n",
    "f_x",
    "gap",
    "min_eff_rate",
    "max_eff_rate",
    "f_xtilde",
    "regret",
    "wall_ms",
];

pub const COMPARISON_HEADER: [&str; 10] = [
    "label",
    "estimator",
    "schedule",
    "seeds",
    "final_f_mean",
    "final_f_se",
    "final_gap_mean",
    "final_gap_se",
    "fitted_exponent",
    "inv_h_mean",
];

/// Samples kept per run when `record_every` is left unset.
pub const AUTO_RECORD_SAMPLES: u64 = 10_000;
const REFERENCE_MAX_ITER: usize = 200_000;
const REFERENCE_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub estimator: EstimatorKind,
    pub schedule: ScheduleConfig,
}

/// The 18 presets: three estimator families crossed with three constant and
/// three diminishing rate settings.
pub fn preset_catalog() -> Vec<Preset> {
    let families = [
        ("ADAM", EstimatorKind::AdamMax, 0.9),
        ("AMSG", EstimatorKind::AmsGrad, 0.0),
        ("MAMSG", EstimatorKind::AmsGrad, 0.1),
    ];
    let rates = [
        ("C1", AlphaRule::constant(1e-3), BetaRule::constant(0.9)),
        ("C2", AlphaRule::constant(1e-3), BetaRule::constant(1e-3)),
        ("C3", AlphaRule::constant(1e-2), BetaRule::constant(1e-2)),
        ("D1", AlphaRule::inverse_power(0.5), BetaRule::geometric(0.5)),
        ("D2", AlphaRule::inverse_power(0.75), BetaRule::geometric(0.5)),
        ("D3", AlphaRule::inverse_power(1.0), BetaRule::geometric(0.5)),
    ];
    let mut out = Vec::with_capacity(18);
    for (family, estimator, gamma) in families {
        for (tag, alpha, beta) in rates {
            out.push(Preset {
                name: format!("{family}-{tag}"),
                estimator,
                schedule: ScheduleConfig {
                    alpha,
                    beta,
                    gamma,
                    delta: DEFAULT_DELTA,
                    epsilon: DEFAULT_EPSILON,
                },
            });
        }
    }
    out
}

/// Case-insensitive lookup.
pub fn resolve_preset(name: &str) -> Result<Preset> {
    let wanted = name.trim().to_ascii_uppercase();
    preset_catalog()
        .into_iter()
        .find(|p| p.name == wanted)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

/// Parses a `name:key=value,...` problem spec.
pub fn parse_problem(spec: &str) -> Result<ProblemSpec> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let mut args = SpecArgs::parse(args)?;
    let problem = match name.trim().to_ascii_lowercase().as_str() {
        "quadratic" => {
            let d = args.usize("d", 10)?;
            let span = args.f64("span", 10.0)?;
            let sigma = args.f64("sigma", 0.1)?;
            let half = args.f64("half", 1.0)?;
            let seed = args.u64("seed", 0)?;
            let target = args.optional_f64("target")?;
            args.finish()?;
            match target {
                None => make_stochastic_quadratic(d, span, sigma, half, SeedState::new(seed)),
                Some(t) => {
                    if !(span >= 1.0) {
                        return Err(Error::config("problem", format!("span {span} must be >= 1")));
                    }
                    let set = FeasibleSet::symmetric_box(d, half).map_err(in_problem)?;
                    let id = format!("quadratic:d={d},span={span},sigma={sigma},half={half},target={t}");
                    quadratic_with_target(id, set, log_spaced(d, span), vec![t; d], sigma)
                }
            }
        }
        "logistic" => {
            let d = args.usize("d", 10)?;
            let n = args.usize("n", 200)?;
            let noise = args.f64("noise", 0.1)?;
            let half = args.f64("half", 2.0)?;
            let seed = args.u64("seed", 0)?;
            args.finish()?;
            make_noisy_logistic(d, n, noise, half, SeedState::new(seed))
        }
        "wells" => {
            let d = args.usize("d", 4)?;
            let sigma = args.f64("sigma", 0.1)?;
            let half = args.f64("half", 2.0)?;
            args.finish()?;
            make_nonconvex_wells(d, sigma, half)
        }
        "adversarial" => {
            let period = args.u64("period", 3)?;
            let magnitude = args.f64("magnitude", 3.0)?;
            args.finish()?;
            make_adversarial_online(period, magnitude)
        }
        other => {
            return Err(Error::config(
                "problem",
                format!("unknown problem `{other}` (expected quadratic, logistic, wells or adversarial)"),
            ))
        }
    };
    problem.map_err(in_problem)
}

fn in_problem(e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::config("problem", format!("`{name}`: {reason}")),
        other => other,
    }
}

struct SpecArgs {
    values: BTreeMap<String, String>,
}

impl SpecArgs {
    fn parse(args: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for part in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::config("problem", format!("expected key=value, got `{part}`")))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::config("problem", format!("key `{}` given twice", k.trim())));
            }
        }
        Ok(Self { values })
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::config("problem", format!("cannot parse `{key}={raw}`"))),
        }
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.take(key)?.unwrap_or(default))
    }

    fn optional_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key)
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        Ok(self.take(key)?.unwrap_or(default))
    }

    fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        Ok(self.take(key)?.unwrap_or(default))
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::config("problem", format!("unknown key `{k}`"))),
        }
    }
}

/// A flat `key = value` experiment description. Schedule fields override the
/// chosen presets; with no presets they define a single `custom` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub presets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorKind>,
    /// Constant rate, or the scale of `alpha / n^eta` when `eta` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Replaces the feasible set with the box `[-h, h]^d`.
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub box_half: Option<f64>,
    /// Replaces the feasible set with the centered ball of this radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    pub steps: u64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Defaults to `steps / AUTO_RECORD_SAMPLES`, at least 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<u64>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub record_wall_time: bool,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_out() -> PathBuf {
    PathBuf::from("runs")
}

/// One (estimator, schedule) configuration run over every seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub label: String,
    pub estimator: EstimatorKind,
    pub schedule: ScheduleConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedExperiment {
    pub problem: ProblemSpec,
    pub plans: Vec<RunPlan>,
    pub steps: u64,
    pub seeds: Vec<u64>,
    pub record_every: u64,
    pub x0: Option<Vec<f64>>,
    pub out: PathBuf,
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    pub fn new(problem: impl Into<String>, steps: u64) -> Self {
        Self {
            problem: problem.into(),
            presets: Vec::new(),
            estimator: None,
            alpha: None,
            eta: None,
            beta: None,
            lambda: None,
            gamma: None,
            delta: None,
            epsilon: None,
            box_half: None,
            ball: None,
            x0: None,
            steps,
            seeds: default_seeds(),
            record_every: None,
            out: default_out(),
            record_wall_time: false,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .message()
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "config".to_string());
            Error::config(field, e.message().to_string())
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    fn has_schedule_overrides(&self) -> bool {
        self.estimator.is_some()
            || self.alpha.is_some()
            || self.eta.is_some()
            || self.beta.is_some()
            || self.lambda.is_some()
            || self.gamma.is_some()
            || self.delta.is_some()
            || self.epsilon.is_some()
    }

    fn apply_overrides(&self, base: Option<&Preset>) -> Result<(EstimatorKind, ScheduleConfig)> {
        let estimator = match (self.estimator, base) {
            (Some(k), _) => k,
            (None, Some(p)) => p.estimator,
            (None, None) => return Err(Error::config("estimator", "required when no preset is given")),
        };
        let alpha = match (self.alpha, self.eta, base) {
            (alpha, Some(eta), _) => AlphaRule::InversePower {
                scale: alpha.unwrap_or(1.0),
                eta,
            },
            (Some(alpha), None, _) => AlphaRule::constant(alpha),
            (None, None, Some(p)) => p.schedule.alpha,
            (None, None, None) => return Err(Error::config("alpha", "required when no preset is given")),
        };
        let beta = match (self.beta, self.lambda, base) {
            (Some(_), Some(_), _) => return Err(Error::config("lambda", "conflicts with `beta`; give one")),
            (Some(beta), None, _) => BetaRule::constant(beta),
            (None, Some(lambda), _) => BetaRule::geometric(lambda),
            (None, None, Some(p)) => p.schedule.beta,
            (None, None, None) => return Err(Error::config("beta", "required when no preset is given")),
        };
        let schedule = ScheduleConfig {
            alpha,
            beta,
            gamma: self.gamma.or(base.map(|p| p.schedule.gamma)).unwrap_or(0.0),
            delta: self.delta.or(base.map(|p| p.schedule.delta)).unwrap_or(DEFAULT_DELTA),
            epsilon: self.epsilon.or(base.map(|p| p.schedule.epsilon)).unwrap_or(DEFAULT_EPSILON),
        };
        schedule.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::config(name, reason),
            other => other,
        })?;
        Ok((estimator, schedule))
    }

    /// Validates every field and builds the problem and run plans.
    pub fn resolve(&self) -> Result<ResolvedExperiment> {
        if self.steps == 0 {
            return Err(Error::config("steps", "must be positive"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        let mut unique = self.seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        if unique.len() != self.seeds.len() {
            return Err(Error::config("seeds", "seeds must be distinct"));
        }
        let record_every = match self.record_every {
            Some(0) => return Err(Error::config("record_every", "must be positive")),
            Some(k) => k,
            None => (self.steps / AUTO_RECORD_SAMPLES).max(1),
        };

        let mut problem = parse_problem(&self.problem)?;
        let d = problem.dimension();
        match (self.box_half, self.ball) {
            (Some(_), Some(_)) => return Err(Error::config("ball", "conflicts with `box`; give one")),
            (Some(h), None) => {
                let set = FeasibleSet::symmetric_box(d, h).map_err(|e| Error::config("box", e.to_string()))?;
                problem = problem.with_feasible_set(set, &format!("+box={h}"))?;
            }
            (None, Some(r)) => {
                let set = FeasibleSet::centered_ball(d, r).map_err(|e| Error::config("ball", e.to_string()))?;
                problem = problem.with_feasible_set(set, &format!("+ball={r}"))?;
            }
            (None, None) => {}
        }
        if let Some(x0) = &self.x0 {
            if x0.len() != d {
                return Err(Error::config("x0", format!("has {} entries, problem dimension is {d}", x0.len())));
            }
            if x0.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("x0", "entries must be finite"));
            }
        }

        let mut plans = Vec::new();
        if self.presets.is_empty() {
            let (estimator, schedule) = self.apply_overrides(None)?;
            plans.push(RunPlan {
                label: "custom".into(),
                estimator,
                schedule,
            });
        } else {
            for name in &self.presets {
                let preset = resolve_preset(name)?;
                let (estimator, schedule) = self.apply_overrides(Some(&preset))?;
                let label = if self.has_schedule_overrides() {
                    format!("{}+custom", preset.name)
                } else {
                    preset.name.clone()
                };
                if plans.iter().any(|p: &RunPlan| p.label == label) {
                    return Err(Error::config("presets", format!("`{}` listed twice", preset.name)));
                }
                plans.push(RunPlan {
                    label,
                    estimator,
                    schedule,
                });
            }
        }

        Ok(ResolvedExperiment {
            problem,
            plans,
            steps: self.steps,
            seeds: self.seeds.clone(),
            record_every,
            x0: self.x0.clone(),
            out: self.out.clone(),
            record_wall_time: self.record_wall_time,
        })
    }
}

/// Per-run JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub problem: String,
    pub estimator: EstimatorKind,
    pub schedule: ScheduleConfig,
    pub schedule_text: String,
    pub seed: u64,
    pub steps: u64,
    pub record_every: u64,
    pub x0: Vec<f64>,
    pub final_f: f64,
    pub final_gap: f64,
    pub final_avg_gap: f64,
    pub final_f_xtilde: f64,
    pub final_min_eff_rate: f64,
    pub final_max_eff_rate: f64,
    pub f_star: Option<f64>,
    /// `known` or `reference`.
    pub f_star_source: Option<String>,
    pub final_suboptimality: Option<f64>,
    pub final_regret: Option<f64>,
    pub fitted_quantity: RateQuantity,
    pub fitted_exponent: Option<f64>,
    pub constants: TheoryConstants,
    pub theorem1_rhs: Option<f64>,
    pub theorem3_rhs_final: Option<f64>,
    pub theorem3_note: Option<String>,
    /// `1 / h_{n,i}` at the last step, the per-run estimate of `h_i*`.
    pub inv_h_final: Vec<f64>,
    pub elapsed_secs: f64,
    pub steps_per_sec: f64,
    pub csv: String,
}

/// Keys of the serialized [`RunSummary`], in order.
pub const SUMMARY_FIELDS: [&str; 29] = [
    "label",
    "problem",
    "estimator",
    "schedule",
    "schedule_text",
    "seed",
    "steps",
    "record_every",
    "x0",
    "final_f",
    "final_gap",
    "final_avg_gap",
    "final_f_xtilde",
    "final_min_eff_rate",
    "final_max_eff_rate",
    "f_star",
    "f_star_source",
    "final_suboptimality",
    "final_regret",
    "fitted_quantity",
    "fitted_exponent",
    "constants",
    "theorem1_rhs",
    "theorem3_rhs_final",
    "theorem3_note",
    "inv_h_final",
    "elapsed_secs",
    "steps_per_sec",
    "csv",
];

impl RunSummary {
    pub fn from_record(label: &str, record: &RunRecord, record_every: u64, f_star_source: Option<&str>) -> Result<Self> {
        let last = record
            .last()
            .ok_or_else(|| Error::InsufficientSamples("run recorded no samples".into()))?;
        let quantity = if record.f_star.is_some() && last.regret.is_none() {
            RateQuantity::AveragedSuboptimality
        } else {
            RateQuantity::AveragedGap
        };
        let bounds = BoundReport::from_run(record, None, quantity)?;
        Ok(Self {
            label: label.to_string(),
            problem: record.problem_id.clone(),
            estimator: record.estimator,
            schedule: record.schedule,
            schedule_text: record.schedule.to_string(),
            seed: record.seed.seed,
            steps: record.n_steps,
            record_every,
            x0: record.x0.clone(),
            final_f: last.f_x,
            final_gap: last.gap,
            final_avg_gap: last.avg_gap,
            final_f_xtilde: last.f_xtilde,
            final_min_eff_rate: last.min_eff_rate(),
            final_max_eff_rate: last.max_eff_rate(),
            f_star: record.f_star,
            f_star_source: record.f_star.and(f_star_source.map(str::to_string)),
            final_suboptimality: record.f_star.map(|f| last.f_xtilde - f),
            final_regret: last.regret,
            fitted_quantity: quantity,
            fitted_exponent: bounds.fitted_rate_exponent,
            constants: bounds.constants,
            theorem1_rhs: bounds.theorem1_rhs,
            theorem3_rhs_final: bounds.theorem3_rhs.last().map(|p| p.1),
            theorem3_note: bounds.theorem3_note,
            inv_h_final: record.final_h.iter().map(|h| 1.0 / h).collect(),
            elapsed_secs: record.elapsed_secs,
            steps_per_sec: record.n_steps as f64 / record.elapsed_secs.max(1e-12),
            csv: artifact_stem(label, record.seed.seed) + ".csv",
        })
    }
}

fn artifact_stem(label: &str, seed: u64) -> String {
    format!("{label}_seed{seed}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the per-sample CSV of a run.
pub fn write_run_csv<W: std::io::Write>(record: &RunRecord, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for s in &record.samples {
        w.write_record([
            s.n.to_string(),
            s.f_x.to_string(),
            s.gap.to_string(),
            s.min_eff_rate().to_string(),
            s.max_eff_rate().to_string(),
            s.f_xtilde.to_string(),
            fmt_opt(s.regret),
            fmt_opt(s.wall_ms),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub summaries: Vec<RunSummary>,
    pub comparison: Option<ComparisonTable>,
    pub out: PathBuf,
}

/// Runs every (plan, seed) pair concurrently and writes all artifacts under
/// the configured output directory. CSV artifacts depend only on the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let resolved = config.resolve()?;
    fs::create_dir_all(&resolved.out)?;
    fs::write(resolved.out.join("config.toml"), config.to_toml()?)?;

    let problem = &resolved.problem;
    let (f_star, source) = match problem.known_optimum() {
        Some(opt) => (Some(opt.value), Some("known")),
        None if problem.is_convex() => (
            Some(reference_optimum(problem, REFERENCE_MAX_ITER, REFERENCE_TOL)?.value),
            Some("reference"),
        ),
        None => (None, None),
    };

    let jobs: Vec<(&RunPlan, u64)> = resolved
        .plans
        .iter()
        .flat_map(|p| resolved.seeds.iter().map(move |s| (p, *s)))
        .collect();
    let summaries = jobs
        .into_par_iter()
        .map(|(plan, seed)| -> Result<RunSummary> {
            let options = RunOptions {
                n_steps: resolved.steps,
                seed: SeedState::new(seed),
                record_every: resolved.record_every,
                x0: resolved.x0.clone(),
                record_wall_time: resolved.record_wall_time,
            };
            let mut record = run(problem, &plan.schedule, plan.estimator, &options)?;
            record.f_star = f_star;
            let stem = artifact_stem(&plan.label, seed);
            let file = fs::File::create(resolved.out.join(format!("{stem}.csv")))?;
            write_run_csv(&record, std::io::BufWriter::new(file))?;
            let summary = RunSummary::from_record(&plan.label, &record, resolved.record_every, source)?;
            fs::write(
                resolved.out.join(format!("{stem}.json")),
                serde_json::to_string_pretty(&summary)?,
            )?;
            Ok(summary)
        })
        .collect::<Result<Vec<_>>>()?;

    let comparison = if summaries.len() >= 2 {
        let table = compare(&group_by_label(summaries.clone()))?;
        table.write_csv(&resolved.out.join("comparison.csv"))?;
        Some(table)
    } else {
        None
    };
    Ok(ExperimentReport {
        summaries,
        comparison,
        out: resolved.out,
    })
}

/// Summaries sharing a label, one row of a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct RunGroup {
    pub label: String,
    pub summaries: Vec<RunSummary>,
}

/// Groups by label in order of first appearance.
pub fn group_by_label(summaries: Vec<RunSummary>) -> Vec<RunGroup> {
    let mut groups: Vec<RunGroup> = Vec::new();
    for s in summaries {
        match groups.iter_mut().find(|g| g.label == s.label) {
            Some(g) => g.summaries.push(s),
            None => groups.push(RunGroup {
                label: s.label.clone(),
                summaries: vec![s],
            }),
        }
    }
    groups
}

/// Reads one summary JSON, or every `*.json` summary in a directory (sorted by name).
pub fn load_summaries(path: &Path) -> Result<Vec<RunSummary>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| p.extension().is_some_and(|e| e == "json"));
        files.sort();
        files.iter().map(|f| load_summary(f)).collect()
    } else {
        Ok(vec![load_summary(path)?])
    }
}

fn load_summary(path: &Path) -> Result<RunSummary> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub estimator: EstimatorKind,
    pub schedule: String,
    pub seeds: usize,
    pub final_f_mean: f64,
    pub final_f_se: f64,
    pub final_gap_mean: f64,
    pub final_gap_se: f64,
    /// Mean over seeds whose fit succeeded.
    pub fitted_exponent: Option<f64>,
    /// Cross-seed mean of `inv_h_final`.
    pub inv_h_mean: Vec<f64>,
    pub steps_per_sec: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub problem: String,
    pub rows: Vec<ComparisonRow>,
}

/// One row per group, sorted by mean final objective.
pub fn compare(groups: &[RunGroup]) -> Result<ComparisonTable> {
    let total: usize = groups.iter().map(|g| g.summaries.len()).sum();
    if total < 2 {
        return Err(Error::InsufficientSamples(format!(
            "compare needs at least two run summaries, got {total}"
        )));
    }
    let problem = groups
        .iter()
        .flat_map(|g| g.summaries.first())
        .next()
        .map(|s| s.problem.clone())
        .unwrap_or_default();
    for s in groups.iter().flat_map(|g| &g.summaries) {
        if s.problem != problem {
            return Err(Error::config(
                "problem",
                format!("cannot compare runs on `{problem}` with runs on `{}`", s.problem),
            ));
        }
    }
    let mut rows: Vec<ComparisonRow> = groups
        .iter()
        .filter(|g| !g.summaries.is_empty())
        .map(|g| {
            let first = &g.summaries[0];
            let finals: Vec<f64> = g.summaries.iter().map(|s| s.final_f).collect();
            let gaps: Vec<f64> = g.summaries.iter().map(|s| s.final_gap).collect();
            let exps: Vec<f64> = g.summaries.iter().filter_map(|s| s.fitted_exponent).collect();
            let rates: Vec<f64> = g.summaries.iter().map(|s| s.steps_per_sec).collect();
            let (final_f_mean, final_f_se) = mean_and_standard_error(&finals);
            let (final_gap_mean, final_gap_se) = mean_and_standard_error(&gaps);
            let d = first.inv_h_final.len();
            let inv_h_mean = (0..d)
                .map(|i| {
                    let col: Vec<f64> = g.summaries.iter().filter_map(|s| s.inv_h_final.get(i).copied()).collect();
                    mean_and_standard_error(&col).0
                })
                .collect();
            ComparisonRow {
                label: g.label.clone(),
                estimator: first.estimator,
                schedule: first.schedule_text.clone(),
                seeds: g.summaries.len(),
                final_f_mean,
                final_f_se,
                final_gap_mean,
                final_gap_se,
                fitted_exponent: (!exps.is_empty()).then(|| mean_and_standard_error(&exps).0),
                inv_h_mean,
                steps_per_sec: mean_and_standard_error(&rates).0,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.final_f_mean.total_cmp(&b.final_f_mean));
    Ok(ComparisonTable { problem, rows })
}

impl ComparisonTable {
    /// Throughput is omitted so the file is reproducible; it appears in [`Self::render`].
    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COMPARISON_HEADER).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.label.clone(),
                r.estimator.to_string(),
                r.schedule.clone(),
                r.seeds.to_string(),
                r.final_f_mean.to_string(),
                r.final_f_se.to_string(),
                r.final_gap_mean.to_string(),
                r.final_gap_se.to_string(),
                fmt_opt(r.fitted_exponent),
                r.inv_h_mean.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string()?)?;
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "problem: {}", self.problem);
        let _ = writeln!(
            out,
            "{:<16} {:>5} {:>26} {:>26} {:>9} {:>12}",
            "preset", "seeds", "final f (mean ± se)", "final gap (mean ± se)", "exponent", "steps/sec"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<16} {:>5} {:>26} {:>26} {:>9} {:>12.0}",
                r.label,
                r.seeds,
                format!("{:.6e} ± {:.1e}", r.final_f_mean, r.final_f_se),
                format!("{:.6e} ± {:.1e}", r.final_gap_mean, r.final_gap_se),
                r.fitted_exponent.map(|p| format!("{p:.3}")).unwrap_or_else(|| "-".into()),
                r.steps_per_sec,
            );
        }
        out
    }
}
