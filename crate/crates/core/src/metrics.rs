//! Theorem-facing measurements over optimizer trajectories.
//!
//! The stationarity gap `min_{y in X} <y - x, grad f(x)>` is nonpositive and
//! vanishes exactly at stationary points. The theory constants and the two
//! bounds below are evaluated from a finished [`RunRecord`]:
//!
//! * constant rates: `-(B^2 M^2 / (2 b g^2)) alpha - (M sqrt(D d) / (b g)) beta`
//!   lower-bounds the limiting gap;
//! * general rates: the averaged gap over `n` steps is at most
//!   `D sum_i B_i / (2 b n alpha_n) + (B^2 M^2 / (2 b g^2 n)) sum alpha_k
//!   + (M sqrt(D d) / (b n)) sum beta_k`,
//!
//! with `B = sup max_i h_{n,i}^{-1/2}`, `M^2 = max(||m_{-1}||^2, M_grad^2)`,
//! `b = 1 - sup beta_n` and `g = 1 - gamma`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::feasible::FeasibleSet;
use crate::moment::EstimatorKind;
use crate::oracle::{Optimum, ProblemSpec, SeedState};
use crate::projection::project_in_place;
use crate::schedule::ScheduleConfig;
use crate::vector::{norm, DenseVector};

/// One recorded point of a trajectory, taken after `n` completed steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub n: u64,
    pub x: Vec<f64>,
    pub f_x: f64,
    /// Stationarity gap at `x_n` (true gradient).
    pub gap: f64,
    /// `(1/n) sum_{k=1..n} gap(x_k)`.
    pub avg_gap: f64,
    /// `alpha_{n-1} / ((1 - gamma^n) h_{n-1,i})`, the rates used to reach `x_n`.
    pub eff_rates: Vec<f64>,
    /// `(1/n) sum_{k=1..n} x_k`.
    pub x_tilde: Vec<f64>,
    pub f_xtilde: f64,
    /// Cumulative regret `sum_{t<n} f_t(x_t) - n f*`, online problems only.
    pub regret: Option<f64>,
    pub wall_ms: Option<f64>,
}

impl Sample {
    pub fn min_eff_rate(&self) -> f64 {
        self.eff_rates.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_eff_rate(&self) -> f64 {
        self.eff_rates.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem_id: String,
    pub schedule: ScheduleConfig,
    pub estimator: EstimatorKind,
    pub seed: SeedState,
    pub n_steps: u64,
    pub x0: Vec<f64>,
    pub samples: Vec<Sample>,
    pub dimension: usize,
    pub gradient_bound: f64,
    pub diameter: f64,
    /// `||m_{-1}||`.
    pub m_init_norm: f64,
    /// Smallest preconditioner entry seen over the run.
    pub min_h: f64,
    /// Preconditioner diagonal after the final step.
    pub final_h: Vec<f64>,
    pub f_star: Option<f64>,
    pub elapsed_secs: f64,
}

impl RunRecord {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    /// `M`, the oracle second-moment bound.
    pub gradient_bound: f64,
    /// `M~ = max(||m_{-1}||, M)`.
    pub momentum_bound: f64,
    /// `D`.
    pub diameter: f64,
    /// `B~ = sup_n max_i h_{n,i}^{-1/2}`.
    pub inv_sqrt_h_bound: f64,
    /// `b~ = 1 - sup_n beta_n`.
    pub beta_slack: f64,
    /// `gamma~ = 1 - gamma`.
    pub gamma_slack: f64,
    pub dim: usize,
}

impl TheoryConstants {
    pub fn new(
        gradient_bound: f64,
        m_init_norm: f64,
        diameter: f64,
        min_h: f64,
        beta_sup: f64,
        gamma: f64,
        dim: usize,
    ) -> Result<Self> {
        if !(gradient_bound > 0.0) {
            return Err(Error::invalid("gradient_bound", "must be positive"));
        }
        if !(min_h > 0.0) {
            return Err(Error::invalid("min_h", "preconditioner entries must be positive"));
        }
        if !(0.0..1.0).contains(&beta_sup) {
            return Err(Error::invalid("beta", format!("sup beta_n = {beta_sup} not in [0, 1)")));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid("gamma", format!("{gamma} not in [0, 1)")));
        }
        Ok(Self {
            gradient_bound,
            momentum_bound: m_init_norm.max(gradient_bound),
            diameter,
            inv_sqrt_h_bound: min_h.powf(-0.5),
            beta_slack: 1.0 - beta_sup,
            gamma_slack: 1.0 - gamma,
            dim,
        })
    }

    pub fn from_run(record: &RunRecord) -> Result<Self> {
        Self::new(
            record.gradient_bound,
            record.m_init_norm,
            record.diameter,
            record.min_h,
            record.schedule.beta.supremum(),
            record.schedule.gamma,
            record.dimension,
        )
    }

    /// `B~^2 M~^2 / (2 b~ gamma~^2)`, the coefficient of `alpha`.
    pub fn alpha_coefficient(&self) -> f64 {
        let b = self.inv_sqrt_h_bound;
        let m = self.momentum_bound;
        b * b * m * m / (2.0 * self.beta_slack * self.gamma_slack * self.gamma_slack)
    }

    /// `M~ sqrt(D d) / (b~ gamma~)`, the coefficient of `beta` in the constant-rate bound.
    pub fn beta_coefficient(&self) -> f64 {
        self.momentum_bound * (self.diameter * self.dim as f64).sqrt() / (self.beta_slack * self.gamma_slack)
    }
}

/// `min_{y in X} <y - x, grad>`; zero exactly at stationary points, negative elsewhere.
pub fn stationarity_gap(x: &[f64], grad: &[f64], set: &FeasibleSet) -> Result<f64> {
    check_dim(set.dimension(), x.len())?;
    check_dim(set.dimension(), grad.len())?;
    Ok(gap_unchecked(x, grad, set))
}

pub(crate) fn gap_unchecked(x: &[f64], grad: &[f64], set: &FeasibleSet) -> f64 {
    let value = match set {
        FeasibleSet::Box { lower, upper } => x
            .iter()
            .zip(grad)
            .zip(lower.iter().zip(upper.iter()))
            .map(|((xi, gi), (l, u))| if *gi > 0.0 { (l - xi) * gi } else { (u - xi) * gi })
            .sum::<f64>(),
        FeasibleSet::Ball { center, radius } => {
            let inner: f64 = center.iter().zip(x).zip(grad).map(|((c, xi), gi)| (c - xi) * gi).sum();
            inner - radius * norm(grad)
        }
    };
    // Exact value is nonpositive for feasible x; clip rounding residue.
    value.min(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegretSummary {
    pub horizon: u64,
    /// `R(T) = sum_t f_t(x_t) - T f*`.
    pub total: f64,
    /// `R(T) / T`.
    pub average: f64,
}

/// Regret of incurred losses against a per-step optimal value.
pub fn regret(losses: &[f64], optimal_value: f64) -> Result<RegretSummary> {
    if losses.is_empty() {
        return Err(Error::InsufficientSamples("regret needs at least one loss".into()));
    }
    let horizon = losses.len() as u64;
    let total = losses.iter().sum::<f64>() - horizon as f64 * optimal_value;
    Ok(RegretSummary {
        horizon,
        total,
        average: total / horizon as f64,
    })
}

/// `sqrt((1 + ln T) / T)`, the shape of the classical averaged-regret guarantee.
pub fn regret_envelope(t: u64) -> f64 {
    let t = t.max(1) as f64;
    ((1.0 + t.ln()) / t).sqrt()
}

/// Smallest `D` with `R(T)/T <= D sqrt((1 + ln T)/T)` over the given `(T, R(T)/T)` points.
pub fn fit_envelope_constant(points: &[(u64, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InsufficientSamples("no regret samples to fit".into()));
    }
    Ok(points
        .iter()
        .map(|&(t, avg)| avg / regret_envelope(t))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Lower bound on the limiting gap under constant `alpha`, `beta`.
pub fn theorem1_bound(constants: &TheoryConstants, alpha: f64, beta: f64) -> Result<f64> {
    if !(constants.beta_slack > 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "b~ = {} must be positive (sup beta_n < 1)",
            constants.beta_slack
        )));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::HypothesisViolated(format!("beta = {beta} must lie in [0, 1)")));
    }
    if !(alpha >= 0.0) {
        return Err(Error::invalid("alpha", format!("{alpha} must be nonnegative")));
    }
    Ok(-constants.alpha_coefficient() * alpha - constants.beta_coefficient() * beta)
}

/// The three-term averaged bound from explicit partial sums.
pub fn theorem3_rhs_from_sums(
    constants: &TheoryConstants,
    n: u64,
    alpha_n: f64,
    sum_alpha: f64,
    sum_beta: f64,
    b_sum: f64,
) -> f64 {
    let n = n as f64;
    let b = constants.beta_slack;
    let g = constants.gamma_slack;
    let bh = constants.inv_sqrt_h_bound;
    let m = constants.momentum_bound;
    constants.diameter * b_sum / (2.0 * b * n * alpha_n)
        + bh * bh * m * m / (2.0 * b * g * g * n) * sum_alpha
        + m * (constants.diameter * constants.dim as f64).sqrt() / (b * n) * sum_beta
}

/// Upper bound on `(1/n) sum_{k=1..n} V_k`. `h_bounds` estimates `B_i >= sup_n E h_{n,i}`.
pub fn theorem3_bound(
    constants: &TheoryConstants,
    schedule: &ScheduleConfig,
    n: u64,
    h_bounds: &[f64],
) -> Result<f64> {
    Ok(theorem3_curve(constants, schedule, &[n], h_bounds)?[0])
}

/// [`theorem3_bound`] at each of the strictly increasing horizons `ns`, in one pass.
pub fn theorem3_curve(
    constants: &TheoryConstants,
    schedule: &ScheduleConfig,
    ns: &[u64],
    h_bounds: &[f64],
) -> Result<Vec<f64>> {
    check_dim(constants.dim, h_bounds.len())?;
    if ns.is_empty() {
        return Ok(Vec::new());
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("n", "horizons must be positive and strictly increasing"));
    }
    if !(constants.beta_slack > 0.0) || schedule.beta.supremum() >= 1.0 {
        return Err(Error::HypothesisViolated("limsup beta_n < 1 fails".into()));
    }
    if 1.0 - schedule.beta.supremum() < constants.beta_slack * (1.0 - 1e-12) {
        return Err(Error::HypothesisViolated(format!(
            "b~ = {} exceeds 1 - sup beta_n = {}",
            constants.beta_slack,
            1.0 - schedule.beta.supremum()
        )));
    }
    let b_sum: f64 = h_bounds.iter().sum();
    let n_max = *ns.last().unwrap();
    let mut out = Vec::with_capacity(ns.len());
    let mut next = ns.iter().peekable();
    let (mut sum_alpha, mut sum_beta) = (0.0, 0.0);
    let mut prev_weight = schedule.step_weight(0);
    for k in 1..=n_max {
        let weight = schedule.step_weight(k);
        if weight > prev_weight * (1.0 + 1e-12) {
            return Err(Error::HypothesisViolated(format!(
                "alpha_n (1 - beta_n) / (1 - gamma^(n+1)) increases at n = {k} ({prev_weight} -> {weight})"
            )));
        }
        prev_weight = weight;
        sum_alpha += schedule.eval_alpha(k);
        sum_beta += schedule.eval_beta(k);
        if next.peek() == Some(&&k) {
            next.next();
            out.push(theorem3_rhs_from_sums(
                constants,
                k,
                schedule.eval_alpha(k),
                sum_alpha,
                sum_beta,
                b_sum,
            ));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateQuantity {
    /// `|(1/n) sum gap(x_k)|`.
    AveragedGap,
    /// `f(x~_n) - f*`.
    AveragedSuboptimality,
}

pub const MIN_FIT_SAMPLES: usize = 20;
const FIT_POINTS_PER_DECADE: usize = 20;

/// Negated log-log slope of the chosen quantity over the final two decades of `n`.
pub fn fit_rate_exponent(record: &RunRecord, quantity: RateQuantity) -> Result<f64> {
    let points: Vec<(f64, f64)> = match quantity {
        RateQuantity::AveragedGap => record
            .samples
            .iter()
            .filter(|s| s.n >= 1)
            .map(|s| (s.n as f64, s.avg_gap.abs()))
            .collect(),
        RateQuantity::AveragedSuboptimality => {
            let f_star = record
                .f_star
                .ok_or_else(|| Error::MissingOptimum(record.problem_id.clone()))?;
            record
                .samples
                .iter()
                .filter(|s| s.n >= 1)
                .map(|s| (s.n as f64, s.f_xtilde - f_star))
                .collect()
        }
    };
    fit_trailing_power_law(&points)
}

/// Fits `q ~ c n^(-p)` over the last two decades of `(n, q)` points and returns `p`.
pub fn fit_trailing_power_law(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples(format!(
            "{} samples, need at least {MIN_FIT_SAMPLES}",
            points.len()
        )));
    }
    let n_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let n_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if !(n_min > 0.0) || n_max / n_min < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InsufficientSamples(format!(
            "samples span n in [{n_min}, {n_max}], need two decades"
        )));
    }
    let lo = (n_max / 100.0).ln();
    let hi = n_max.ln();
    let window: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0.ln() >= lo - 1e-12 && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    if window.len() < 2 {
        return Err(Error::InsufficientSamples(
            "fewer than two positive samples in the fit window".into(),
        ));
    }
    // Thin to a log-uniform grid so dense linear strides do not dominate the fit.
    let grid = 2 * FIT_POINTS_PER_DECADE;
    let mut picked: Vec<usize> = (0..=grid)
        .map(|k| {
            let target = lo + (hi - lo) * k as f64 / grid as f64;
            (0..window.len())
                .min_by(|&a, &b| (window[a].0 - target).abs().total_cmp(&(window[b].0 - target).abs()))
                .unwrap()
        })
        .collect();
    picked.dedup();
    let pts: Vec<(f64, f64)> = picked.into_iter().map(|i| window[i]).collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientSamples("fit window collapsed to one point".into()));
    }
    Ok(-least_squares_slope(&pts))
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `(n, f(x~_n) - f*)` for every recorded sample. Uses `f_star` if given, else the record's.
pub fn suboptimality(record: &RunRecord, f_star: Option<f64>) -> Result<Vec<(u64, f64)>> {
    let f_star = f_star
        .or(record.f_star)
        .ok_or_else(|| Error::MissingOptimum(record.problem_id.clone()))?;
    Ok(record.samples.iter().map(|s| (s.n, s.f_xtilde - f_star)).collect())
}

/// Sample mean and standard error of the mean.
pub fn mean_and_standard_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub constants: TheoryConstants,
    /// Constant schedules only.
    pub theorem1_rhs: Option<f64>,
    /// `(n, bound)` at each recorded `n`, when the schedule meets the hypotheses.
    pub theorem3_rhs: Vec<(u64, f64)>,
    /// Why `theorem3_rhs` is empty, if it is.
    pub theorem3_note: Option<String>,
    pub fitted_rate_exponent: Option<f64>,
}

impl BoundReport {
    /// `h_bounds` defaults to the final preconditioner diagonal of the run.
    pub fn from_run(record: &RunRecord, h_bounds: Option<&[f64]>, quantity: RateQuantity) -> Result<Self> {
        let constants = TheoryConstants::from_run(record)?;
        let schedule = &record.schedule;
        let theorem1_rhs = if schedule.is_constant() {
            Some(theorem1_bound(&constants, schedule.eval_alpha(0), schedule.eval_beta(0))?)
        } else {
            None
        };
        let ns: Vec<u64> = record.samples.iter().map(|s| s.n).filter(|n| *n >= 1).collect();
        let h = h_bounds.unwrap_or(&record.final_h);
        let (theorem3_rhs, theorem3_note) = match theorem3_curve(&constants, schedule, &ns, h) {
            Ok(values) => (ns.into_iter().zip(values).collect(), None),
            Err(Error::HypothesisViolated(msg)) => (Vec::new(), Some(msg)),
            Err(e) => return Err(e),
        };
        Ok(Self {
            constants,
            theorem1_rhs,
            theorem3_rhs,
            theorem3_note,
            fitted_rate_exponent: fit_rate_exponent(record, quantity).ok(),
        })
    }
}

/// Minimizer of a smooth convex problem by accelerated projected gradient with
/// step `1/L`, stopping when successive iterates differ by less than `tol` in
/// the max norm. Returns the problem's known optimum when it has one.
pub fn reference_optimum(problem: &ProblemSpec, max_iter: usize, tol: f64) -> Result<Optimum> {
    if let Some(opt) = problem.known_optimum() {
        return Ok(opt.clone());
    }
    if !problem.is_convex() {
        return Err(Error::MissingOptimum(problem.id().to_string()));
    }
    let lipschitz = problem
        .smoothness()
        .filter(|l| *l > 0.0)
        .ok_or_else(|| Error::MissingOptimum(problem.id().to_string()))?;
    let set = problem.feasible_set();
    let d = problem.dimension();
    let ones = vec![1.0; d];
    let step = 1.0 / lipschitz;

    let mut x = match set {
        FeasibleSet::Box { lower, upper } => lower.iter().zip(upper.iter()).map(|(l, u)| 0.5 * (l + u)).collect(),
        FeasibleSet::Ball { center, .. } => center.to_vec(),
    };
    let mut y: Vec<f64> = x.clone();
    let mut grad = vec![0.0; d];
    let mut t = 1.0_f64;
    for _ in 0..max_iter {
        problem.gradient_into(&y, &mut grad);
        let mut next: Vec<f64> = y.iter().zip(&grad).map(|(yi, gi)| yi - step * gi).collect();
        project_in_place(set, &ones, &mut next)?;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        let moved = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        // Restart momentum whenever the objective goes up.
        if problem.objective(&next) > problem.objective(&x) {
            t = 1.0;
            y.clone_from(&x);
            continue;
        }
        for i in 0..d {
            y[i] = next[i] + momentum * (next[i] - x[i]);
        }
        x = next;
        t = t_next;
        if moved < tol {
            break;
        }
    }
    let value = problem.objective(&x);
    Ok(Optimum {
        x: DenseVector::new(x)?,
        value,
    })
}
