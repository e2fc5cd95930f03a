//! Stochastic first-order oracles and a synthetic problem suite.
//!
//! Every problem exposes the noise-free objective and gradient (used by the
//! metrics) next to an unbiased stochastic gradient (used by the optimizer).
//! `gradient_bound` is an analytic `M` with `E ||G(x, xi)||^2 <= M^2` on the
//! feasible set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::feasible::FeasibleSet;
use crate::projection::project_ball_weighted;
use crate::vector::{dot, norm, DenseVector, DiagonalMatrix};

pub type OracleRng = ChaCha8Rng;

/// Seed plus stream id; equal states replay identical sample sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedState {
    pub seed: u64,
    pub stream: u64,
}

impl SeedState {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> OracleRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub x: DenseVector,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemKind {
    /// `f(x) = 1/2 sum_i c_i (x_i - t_i)^2`, gradient noise `N(0, sigma^2 I)`.
    Quadratic {
        curvature: Vec<f64>,
        target: Vec<f64>,
        sigma: f64,
    },
    /// Mean logistic loss over a fixed dataset; one uniformly drawn sample per call.
    Logistic { features: Vec<Vec<f64>>, labels: Vec<f64> },
    /// `f(x) = sum_i (x_i^4 / 4 - x_i^2 / 2)`, gradient noise `N(0, sigma^2 I)`.
    Wells { sigma: f64 },
    /// One-dimensional linear losses `f_t(x) = s_t x` with `s_t = magnitude` when
    /// `t mod period == 0` and `-1` otherwise.
    Adversarial { period: u64, magnitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    id: String,
    dimension: usize,
    feasible_set: FeasibleSet,
    kind: ProblemKind,
    gradient_bound: f64,
    known_optimum: Option<Optimum>,
}

pub fn make_stochastic_quadratic(
    d: usize,
    condition_span: f64,
    noise_sigma: f64,
    box_halfwidth: f64,
    seed: SeedState,
) -> Result<ProblemSpec> {
    if d == 0 {
        return Err(Error::invalid("d", "dimension must be positive"));
    }
    if !(condition_span >= 1.0 && condition_span.is_finite()) {
        return Err(Error::invalid("condition_span", format!("{condition_span} must be >= 1")));
    }
    let set = FeasibleSet::symmetric_box(d, box_halfwidth)?;
    let mut rng = seed.rng();
    let target = set.sample_uniform(&mut rng);
    let id = format!(
        "quadratic:d={d},span={condition_span},sigma={noise_sigma},half={box_halfwidth},seed={}",
        seed.seed
    );
    quadratic_with_target(id, set, log_spaced(d, condition_span), target, noise_sigma)
}

/// Quadratic with explicit curvature and target.
pub fn quadratic_with_target(
    id: impl Into<String>,
    set: FeasibleSet,
    curvature: Vec<f64>,
    target: Vec<f64>,
    noise_sigma: f64,
) -> Result<ProblemSpec> {
    let d = set.dimension();
    check_dim(d, curvature.len())?;
    check_dim(d, target.len())?;
    if curvature.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
        return Err(Error::invalid("curvature", "entries must be positive"));
    }
    if target.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("target", "entries must be finite"));
    }
    check_sigma(noise_sigma)?;
    let mut p = ProblemSpec {
        id: id.into(),
        dimension: d,
        feasible_set: set,
        kind: ProblemKind::Quadratic {
            curvature,
            target,
            sigma: noise_sigma,
        },
        gradient_bound: 0.0,
        known_optimum: None,
    };
    p.refresh_derived()?;
    Ok(p)
}

pub fn make_noisy_logistic(
    d: usize,
    n_samples: usize,
    label_noise: f64,
    box_halfwidth: f64,
    seed: SeedState,
) -> Result<ProblemSpec> {
    if d == 0 {
        return Err(Error::invalid("d", "dimension must be positive"));
    }
    if n_samples < d {
        return Err(Error::invalid("n_samples", format!("{n_samples} < d = {d}")));
    }
    if !(0.0..=0.5).contains(&label_noise) {
        return Err(Error::invalid("label_noise", format!("{label_noise} not in [0, 1/2]")));
    }
    let set = FeasibleSet::symmetric_box(d, box_halfwidth)?;
    let mut rng = seed.rng();
    let truth: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let mut features = Vec::with_capacity(n_samples);
    let mut labels = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let a: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let mut y = if dot(&a, &truth) > 0.0 { 1.0 } else { 0.0 };
        if rng.random::<f64>() < label_noise {
            y = 1.0 - y;
        }
        features.push(a);
        labels.push(y);
    }
    let id = format!(
        "logistic:d={d},n={n_samples},noise={label_noise},half={box_halfwidth},seed={}",
        seed.seed
    );
    logistic_from_data(id, set, features, labels)
}

/// Logistic problem over an explicit dataset with labels in `{0, 1}`.
pub fn logistic_from_data(
    id: impl Into<String>,
    set: FeasibleSet,
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
) -> Result<ProblemSpec> {
    let d = set.dimension();
    if features.is_empty() {
        return Err(Error::invalid("features", "dataset is empty"));
    }
    check_dim(features.len(), labels.len())?;
    for a in &features {
        check_dim(d, a.len())?;
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("features", "entries must be finite"));
        }
    }
    if labels.iter().any(|y| *y != 0.0 && *y != 1.0) {
        return Err(Error::invalid("labels", "labels must be 0 or 1"));
    }
    let mut p = ProblemSpec {
        id: id.into(),
        dimension: d,
        feasible_set: set,
        kind: ProblemKind::Logistic { features, labels },
        gradient_bound: 0.0,
        known_optimum: None,
    };
    p.refresh_derived()?;
    Ok(p)
}

pub fn make_nonconvex_wells(d: usize, noise_sigma: f64, box_halfwidth: f64) -> Result<ProblemSpec> {
    if d == 0 {
        return Err(Error::invalid("d", "dimension must be positive"));
    }
    check_sigma(noise_sigma)?;
    let set = FeasibleSet::symmetric_box(d, box_halfwidth)?;
    let mut p = ProblemSpec {
        id: format!("wells:d={d},sigma={noise_sigma},half={box_halfwidth}"),
        dimension: d,
        feasible_set: set,
        kind: ProblemKind::Wells { sigma: noise_sigma },
        gradient_bound: 0.0,
        known_optimum: None,
    };
    p.refresh_derived()?;
    Ok(p)
}

pub fn make_adversarial_online(period: u64, magnitude: f64) -> Result<ProblemSpec> {
    if period < 2 {
        return Err(Error::invalid("period", format!("{period} < 2")));
    }
    if !(magnitude > 0.0 && magnitude.is_finite()) {
        return Err(Error::invalid("magnitude", format!("{magnitude} must be positive")));
    }
    let mut p = ProblemSpec {
        id: format!("adversarial:period={period},magnitude={magnitude}"),
        dimension: 1,
        feasible_set: FeasibleSet::symmetric_box(1, 1.0)?,
        kind: ProblemKind::Adversarial { period, magnitude },
        gradient_bound: 0.0,
        known_optimum: None,
    };
    p.refresh_derived()?;
    Ok(p)
}

impl ProblemSpec {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn feasible_set(&self) -> &FeasibleSet {
        &self.feasible_set
    }

    pub fn kind(&self) -> &ProblemKind {
        &self.kind
    }

    /// `M` with `E ||G(x, xi)||^2 <= M^2` for every feasible `x`.
    pub fn gradient_bound(&self) -> f64 {
        self.gradient_bound
    }

    pub fn known_optimum(&self) -> Option<&Optimum> {
        self.known_optimum.as_ref()
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self.kind, ProblemKind::Wells { .. })
    }

    pub fn is_online(&self) -> bool {
        matches!(self.kind, ProblemKind::Adversarial { .. })
    }

    /// Lipschitz constant of the true gradient, where one is known.
    pub fn smoothness(&self) -> Option<f64> {
        match &self.kind {
            ProblemKind::Quadratic { curvature, .. } => Some(curvature.iter().cloned().fold(0.0, f64::max)),
            ProblemKind::Logistic { features, .. } => {
                let total: f64 = features.iter().map(|a| dot(a, a)).sum();
                Some(0.25 * total / features.len() as f64)
            }
            ProblemKind::Wells { .. } => None,
            ProblemKind::Adversarial { .. } => Some(0.0),
        }
    }

    /// Same problem over a different feasible set of equal dimension; `M` and the
    /// known optimum are recomputed.
    pub fn with_feasible_set(&self, set: FeasibleSet, id_suffix: &str) -> Result<Self> {
        check_dim(self.dimension, set.dimension())?;
        let mut p = self.clone();
        p.feasible_set = set;
        p.id = format!("{}{}", self.id, id_suffix);
        p.refresh_derived()?;
        Ok(p)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        match &self.kind {
            ProblemKind::Quadratic { curvature, target, .. } => {
                0.5 * x
                    .iter()
                    .zip(curvature.iter().zip(target))
                    .map(|(xi, (c, t))| c * (xi - t) * (xi - t))
                    .sum::<f64>()
            }
            ProblemKind::Logistic { features, labels } => {
                let total: f64 = features
                    .iter()
                    .zip(labels)
                    .map(|(a, y)| {
                        let z = dot(a, x);
                        softplus(z) - y * z
                    })
                    .sum();
                total / features.len() as f64
            }
            ProblemKind::Wells { .. } => x.iter().map(|v| well(*v)).sum(),
            ProblemKind::Adversarial { .. } => self.mean_slope() * x[0],
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        self.gradient_into(x, &mut out);
        out
    }

    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dimension);
        match &self.kind {
            ProblemKind::Quadratic { curvature, target, .. } => {
                for (o, (xi, (c, t))) in out.iter_mut().zip(x.iter().zip(curvature.iter().zip(target))) {
                    *o = c * (xi - t);
                }
            }
            ProblemKind::Logistic { features, labels } => {
                out.iter_mut().for_each(|o| *o = 0.0);
                let w = 1.0 / features.len() as f64;
                for (a, y) in features.iter().zip(labels) {
                    let r = (sigmoid(dot(a, x)) - y) * w;
                    for (o, ai) in out.iter_mut().zip(a) {
                        *o += r * ai;
                    }
                }
            }
            ProblemKind::Wells { .. } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = well_slope(*xi);
                }
            }
            ProblemKind::Adversarial { .. } => out[0] = self.mean_slope(),
        }
    }

    /// `G(x, xi_step)`. `step` selects the loss in the online problem; the other
    /// problems draw from `rng`.
    pub fn stochastic_gradient_into(&self, x: &[f64], step: u64, rng: &mut OracleRng, out: &mut [f64]) {
        match &self.kind {
            ProblemKind::Quadratic { sigma, .. } | ProblemKind::Wells { sigma } => {
                self.gradient_into(x, out);
                if *sigma > 0.0 {
                    for o in out.iter_mut() {
                        *o += sigma * rng.sample::<f64, _>(StandardNormal);
                    }
                }
            }
            ProblemKind::Logistic { features, labels } => {
                let j = rng.random_range(0..features.len());
                let a = &features[j];
                let r = sigmoid(dot(a, x)) - labels[j];
                for (o, ai) in out.iter_mut().zip(a) {
                    *o = r * ai;
                }
            }
            ProblemKind::Adversarial { .. } => out[0] = self.online_slope(step).unwrap_or(0.0),
        }
    }

    pub fn stochastic_gradient(&self, x: &[f64], step: u64, rng: &mut OracleRng) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        self.stochastic_gradient_into(x, step, rng, &mut out);
        out
    }

    /// `f_t(x)` for online problems, `None` otherwise.
    pub fn online_loss(&self, step: u64, x: &[f64]) -> Option<f64> {
        self.online_slope(step).map(|s| s * x[0])
    }

    fn online_slope(&self, step: u64) -> Option<f64> {
        match self.kind {
            ProblemKind::Adversarial { period, magnitude } => {
                Some(if step % period == 0 { magnitude } else { -1.0 })
            }
            _ => None,
        }
    }

    /// Average slope over one period of the online sequence.
    fn mean_slope(&self) -> f64 {
        match self.kind {
            ProblemKind::Adversarial { period, magnitude } => {
                (magnitude - (period - 1) as f64) / period as f64
            }
            _ => 0.0,
        }
    }

    fn refresh_derived(&mut self) -> Result<()> {
        let set = &self.feasible_set;
        let d = self.dimension;
        match &self.kind {
            ProblemKind::Quadratic {
                curvature,
                target,
                sigma,
            } => {
                // E||grad f + xi||^2 = ||grad f||^2 + d sigma^2, and |x_i - t_i| is
                // bounded by the farther end of coordinate i's range.
                let grad_sq: f64 = (0..d)
                    .map(|i| {
                        let (lo, hi) = set.coordinate_range(i);
                        let reach = (lo - target[i]).abs().max((hi - target[i]).abs());
                        (curvature[i] * reach).powi(2)
                    })
                    .sum();
                self.gradient_bound = (grad_sq + d as f64 * sigma * sigma).sqrt();
                let x = match set {
                    FeasibleSet::Box { lower, upper } => {
                        crate::projection::project_box(lower, upper, target)?
                    }
                    FeasibleSet::Ball { center, radius } => {
                        let h = DiagonalMatrix::new(curvature.clone())?;
                        project_ball_weighted(center, *radius, &h, target, 1e-14)?
                    }
                };
                let value = self.objective(&x);
                self.known_optimum = Some(Optimum { x, value });
            }
            ProblemKind::Logistic { features, .. } => {
                self.gradient_bound = features.iter().map(|a| norm(a)).fold(0.0, f64::max);
                self.known_optimum = None;
            }
            ProblemKind::Wells { sigma } => {
                let grad_sq: f64 = (0..d)
                    .map(|i| {
                        let (lo, hi) = set.coordinate_range(i);
                        max_abs_well_slope(lo, hi).powi(2)
                    })
                    .sum();
                self.gradient_bound = (grad_sq + d as f64 * sigma * sigma).sqrt();
                self.known_optimum = wells_optimum(set)?;
            }
            ProblemKind::Adversarial { magnitude, .. } => {
                self.gradient_bound = magnitude.max(1.0);
                let (value, x) = set.linear_minimum(&[self.mean_slope()])?;
                self.known_optimum = Some(Optimum {
                    x: DenseVector::new(x)?,
                    value,
                });
            }
        }
        Ok(())
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma >= 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("noise_sigma", format!("{sigma} must be nonnegative")))
    }
}

pub(crate) fn log_spaced(d: usize, span: f64) -> Vec<f64> {
    if d == 1 {
        return vec![1.0];
    }
    (0..d).map(|i| span.powf(i as f64 / (d - 1) as f64)).collect()
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn well(x: f64) -> f64 {
    let x2 = x * x;
    0.25 * x2 * x2 - 0.5 * x2
}

fn well_slope(x: f64) -> f64 {
    x * x * x - x
}

fn max_abs_well_slope(lo: f64, hi: f64) -> f64 {
    let crit = 1.0 / 3f64.sqrt();
    [lo, hi, crit, -crit]
        .into_iter()
        .filter(|x| *x >= lo && *x <= hi)
        .map(|x| well_slope(x).abs())
        .fold(0.0, f64::max)
}

fn wells_optimum(set: &FeasibleSet) -> Result<Option<Optimum>> {
    match set {
        FeasibleSet::Box { lower, upper } => {
            // Separable: minimize each coordinate over its interval.
            let x: Vec<f64> = lower
                .iter()
                .zip(upper.iter())
                .map(|(&lo, &hi)| {
                    [lo, hi, 1.0, -1.0]
                        .into_iter()
                        .filter(|v| *v >= lo && *v <= hi)
                        .min_by(|a, b| well(*a).total_cmp(&well(*b)).then(b.total_cmp(a)))
                        .unwrap_or(lo)
                })
                .collect();
            let value = x.iter().map(|v| well(*v)).sum();
            Ok(Some(Optimum {
                x: DenseVector::new(x)?,
                value,
            }))
        }
        FeasibleSet::Ball { center, .. } => {
            // Only the unconstrained minimizer is certified; otherwise the ball
            // problem has no closed form.
            let ones = vec![1.0; center.len()];
            if set.contains(&ones, 0.0) {
                Ok(Some(Optimum {
                    x: DenseVector::new(ones)?,
                    value: -0.25 * center.len() as f64,
                }))
            } else {
                Ok(None)
            }
        }
    }
}
