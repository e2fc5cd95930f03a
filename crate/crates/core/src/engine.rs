//! The adaptive-rate iteration.
//!
//! One step from `x_n`:
//!
//! ```text
//! g     = G(x_n, xi_n)
//! m_n   = beta_n m_{n-1} + (1 - beta_n) g
//! m_hat = m_n / (1 - gamma^(n+1))
//! H_n   = diag(sqrt(v_hat_n) + epsilon)
//! d_n   = -H_n^{-1} m_hat
//! x_n+1 = P_{X,H_n}(x_n + alpha_n d_n)
//! ```

use std::time::Instant;

use crate::error::{check_dim, Error, Result};
use crate::metrics::{gap_unchecked, RunRecord, Sample};
use crate::moment::{EstimatorKind, FirstMomentState, SecondMomentState};
use crate::oracle::{OracleRng, ProblemSpec, SeedState};
use crate::projection::project_in_place;
use crate::schedule::ScheduleConfig;
use crate::vector::{DenseVector, DiagonalMatrix};

/// Everything carried between steps. Owned by one run.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    x: DenseVector,
    first: FirstMomentState,
    second: SecondMomentState,
    n: u64,
    seed: SeedState,
    rng: OracleRng,
}

/// Intermediate quantities of the step that produced `x_next`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub x_next: Vec<f64>,
    pub direction: Vec<f64>,
    /// `alpha_n / ((1 - gamma^(n+1)) h_{n,i})`.
    pub effective_rates: Vec<f64>,
    pub gradient_used: Vec<f64>,
    pub m_hat: Vec<f64>,
    /// Diagonal of `H_n`.
    pub h: Vec<f64>,
}

impl StepOutput {
    fn zeros(d: usize) -> Self {
        Self {
            x_next: vec![0.0; d],
            direction: vec![0.0; d],
            effective_rates: vec![0.0; d],
            gradient_used: vec![0.0; d],
            m_hat: vec![0.0; d],
            h: vec![0.0; d],
        }
    }
}

impl OptimizerState {
    /// Starts at the projection of `x0`, or at a uniform draw from the feasible
    /// set taken from the run's own generator when `x0` is absent.
    pub fn init(
        problem: &ProblemSpec,
        schedule: &ScheduleConfig,
        kind: EstimatorKind,
        x0: Option<&[f64]>,
        seed: SeedState,
    ) -> Result<Self> {
        schedule.validate()?;
        let d = problem.dimension();
        let mut rng = seed.rng();
        let mut x = match x0 {
            Some(x0) => {
                check_dim(d, x0.len())?;
                if let Some(i) = x0.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFinite { index: i });
                }
                x0.to_vec()
            }
            None => problem.feasible_set().sample_uniform(&mut rng),
        };
        project_in_place(problem.feasible_set(), &vec![1.0; d], &mut x)?;
        Ok(Self {
            x: DenseVector::new(x)?,
            first: FirstMomentState::zeros(d),
            second: SecondMomentState::new(kind, d, schedule.delta, schedule.epsilon)?,
            n: 0,
            seed,
            rng,
        })
    }

    pub fn x(&self) -> &DenseVector {
        &self.x
    }

    /// Number of completed steps.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn seed(&self) -> SeedState {
        self.seed
    }

    pub fn first(&self) -> &FirstMomentState {
        &self.first
    }

    pub fn second(&self) -> &SecondMomentState {
        &self.second
    }

    /// `H` from the most recent step (`epsilon I` before the first).
    pub fn preconditioner(&self) -> DiagonalMatrix {
        self.second.preconditioner()
    }

    pub fn step(&mut self, problem: &ProblemSpec, schedule: &ScheduleConfig) -> Result<StepOutput> {
        let mut out = StepOutput::zeros(self.x.len());
        self.step_into(problem, schedule, &mut out)?;
        Ok(out)
    }

    /// [`Self::step`] writing into caller-owned buffers. A non-finite oracle
    /// sample is rejected before any state changes.
    pub fn step_into(&mut self, problem: &ProblemSpec, schedule: &ScheduleConfig, out: &mut StepOutput) -> Result<()> {
        let d = self.x.len();
        check_dim(d, problem.dimension())?;
        check_dim(d, out.x_next.len())?;
        let n = self.n;
        problem.stochastic_gradient_into(&self.x, n, &mut self.rng, &mut out.gradient_used);
        if let Some(i) = out.gradient_used.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }

        self.first.update(&out.gradient_used, schedule.eval_beta(n))?;
        self.second.update(&out.gradient_used)?;
        self.second.preconditioner_into(&mut out.h);

        let alpha = schedule.eval_alpha(n);
        let div = schedule.bias_divisor(n);
        let m = self.first.m();
        for i in 0..d {
            let m_hat = m[i] / div;
            let h = out.h[i];
            out.m_hat[i] = m_hat;
            out.direction[i] = -m_hat / h;
            out.effective_rates[i] = alpha / (div * h);
            out.x_next[i] = self.x[i] + alpha * out.direction[i];
        }
        project_in_place(problem.feasible_set(), &out.h, &mut out.x_next)?;
        if let Some(i) = out.x_next.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        self.x.as_mut_slice().copy_from_slice(&out.x_next);
        self.n += 1;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub n_steps: u64,
    pub seed: SeedState,
    /// Record after every `record_every`-th step and always after the last.
    pub record_every: u64,
    pub x0: Option<Vec<f64>>,
    /// Fills `Sample::wall_ms`; off by default so recorded output is reproducible.
    pub record_wall_time: bool,
}

impl RunOptions {
    pub fn new(n_steps: u64, seed: u64) -> Self {
        Self {
            n_steps,
            seed: SeedState::new(seed),
            record_every: 1,
            x0: None,
            record_wall_time: false,
        }
    }

    pub fn record_every(mut self, k: u64) -> Self {
        self.record_every = k;
        self
    }

    pub fn x0(mut self, x0: Vec<f64>) -> Self {
        self.x0 = Some(x0);
        self
    }
}

/// Runs `n_steps` iterations and records the trajectory.
pub fn run(
    problem: &ProblemSpec,
    schedule: &ScheduleConfig,
    kind: EstimatorKind,
    options: &RunOptions,
) -> Result<RunRecord> {
    if options.n_steps == 0 {
        return Err(Error::invalid("n_steps", "must be positive"));
    }
    if options.record_every == 0 {
        return Err(Error::invalid("record_every", "must be positive"));
    }
    let start = Instant::now();
    let mut state = OptimizerState::init(problem, schedule, kind, options.x0.as_deref(), options.seed)?;
    let d = problem.dimension();
    let set = problem.feasible_set();
    let x0 = state.x().to_vec();
    let f_star_step = if problem.is_online() {
        problem.known_optimum().map(|o| o.value)
    } else {
        None
    };

    let mut out = StepOutput::zeros(d);
    let mut grad = vec![0.0; d];
    let mut x_sum = vec![0.0; d];
    let mut x_tilde = vec![0.0; d];
    let mut gap_sum = 0.0;
    let mut loss_sum = 0.0;
    let mut min_h = f64::INFINITY;
    let capacity = (options.n_steps / options.record_every + 1).min(1 << 20) as usize;
    let mut samples = Vec::with_capacity(capacity);

    for _ in 0..options.n_steps {
        if let Some(loss) = problem.online_loss(state.n(), state.x()) {
            loss_sum += loss;
        }
        state.step_into(problem, schedule, &mut out)?;
        let n = state.n();
        let x = state.x().as_slice();
        for (s, xi) in x_sum.iter_mut().zip(x) {
            *s += xi;
        }
        problem.gradient_into(x, &mut grad);
        let gap = gap_unchecked(x, &grad, set);
        gap_sum += gap;
        min_h = out.h.iter().cloned().fold(min_h, f64::min);

        if n % options.record_every == 0 || n == options.n_steps {
            let inv_n = 1.0 / n as f64;
            for (t, s) in x_tilde.iter_mut().zip(&x_sum) {
                *t = s * inv_n;
            }
            samples.push(Sample {
                n,
                x: x.to_vec(),
                f_x: problem.objective(x),
                gap,
                avg_gap: gap_sum * inv_n,
                eff_rates: out.effective_rates.clone(),
                x_tilde: x_tilde.clone(),
                f_xtilde: problem.objective(&x_tilde),
                regret: f_star_step.map(|f| loss_sum - n as f64 * f),
                wall_ms: options
                    .record_wall_time
                    .then(|| start.elapsed().as_secs_f64() * 1e3),
            });
        }
    }

    Ok(RunRecord {
        problem_id: problem.id().to_string(),
        schedule: *schedule,
        estimator: kind,
        seed: options.seed,
        n_steps: options.n_steps,
        x0,
        samples,
        dimension: d,
        gradient_bound: problem.gradient_bound(),
        diameter: set.diameter_constant(),
        m_init_norm: state.first().initial().norm(),
        min_h,
        final_h: out.h,
        f_star: problem.known_optimum().map(|o| o.value),
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}
