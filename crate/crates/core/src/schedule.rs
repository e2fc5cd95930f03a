//! Sub-learning-rate schedules.
//!
//! `alpha_n` scales the step and `beta_n` weights the previous momentum. The
//! diminishing rules `1/n^eta` and `lambda^n` are degenerate at `n = 0`, so
//! `alpha_0 = alpha_1 = scale` and `beta_0 = beta_1 = lambda`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const DEFAULT_DELTA: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum AlphaRule {
    Constant { alpha: f64 },
    /// `scale / n^eta`.
    InversePower { scale: f64, eta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum BetaRule {
    Constant { beta: f64 },
    /// `lambda^n`.
    Geometric { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub alpha: AlphaRule,
    pub beta: BetaRule,
    /// First-moment bias-correction constant.
    pub gamma: f64,
    /// Second-moment mixing constant.
    pub delta: f64,
    /// Added to `sqrt(v_hat)` so the preconditioner stays positive definite.
    pub epsilon: f64,
}

impl AlphaRule {
    pub fn constant(alpha: f64) -> Self {
        AlphaRule::Constant { alpha }
    }

    pub fn inverse_power(eta: f64) -> Self {
        AlphaRule::InversePower { scale: 1.0, eta }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AlphaRule::Constant { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::invalid("alpha", format!("{alpha} not in (0, 1)")));
                }
            }
            AlphaRule::InversePower { scale, eta } => {
                if !(scale > 0.0 && scale <= 1.0) {
                    return Err(Error::invalid("alpha", format!("scale {scale} not in (0, 1]")));
                }
                if !(0.5..=1.0).contains(&eta) {
                    return Err(Error::invalid("eta", format!("{eta} not in [1/2, 1]")));
                }
            }
        }
        Ok(())
    }
}

impl BetaRule {
    pub fn constant(beta: f64) -> Self {
        BetaRule::Constant { beta }
    }

    pub fn geometric(lambda: f64) -> Self {
        BetaRule::Geometric { lambda }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            BetaRule::Constant { beta } => {
                if !(0.0..1.0).contains(&beta) {
                    return Err(Error::invalid("beta", format!("{beta} not in [0, 1)")));
                }
            }
            BetaRule::Geometric { lambda } => {
                if !(lambda > 0.0 && lambda < 1.0) {
                    return Err(Error::invalid("lambda", format!("{lambda} not in (0, 1)")));
                }
            }
        }
        Ok(())
    }

    /// `sup_n beta_n`.
    pub fn supremum(&self) -> f64 {
        match *self {
            BetaRule::Constant { beta } => beta,
            BetaRule::Geometric { lambda } => lambda,
        }
    }
}

impl ScheduleConfig {
    pub fn new(alpha: AlphaRule, beta: BetaRule, gamma: f64, delta: f64, epsilon: f64) -> Result<Self> {
        let schedule = Self {
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.validate()?;
        self.beta.validate()?;
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::invalid("gamma", format!("{} not in [0, 1)", self.gamma)));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::invalid("delta", format!("{} not in [0, 1)", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", format!("{} must be positive", self.epsilon)));
        }
        Ok(())
    }

    pub fn eval_alpha(&self, n: u64) -> f64 {
        match self.alpha {
            AlphaRule::Constant { alpha } => alpha,
            AlphaRule::InversePower { scale, eta } => {
                if n <= 1 {
                    scale
                } else {
                    scale / (n as f64).powf(eta)
                }
            }
        }
    }

    pub fn eval_beta(&self, n: u64) -> f64 {
        match self.beta {
            BetaRule::Constant { beta } => beta,
            BetaRule::Geometric { lambda } => pow_u64(lambda, n.max(1)),
        }
    }

    /// `1 - gamma^(n+1)`, the first-moment bias-correction divisor.
    pub fn bias_divisor(&self, n: u64) -> f64 {
        crate::moment::bias_divisor(self.gamma, n)
    }

    /// `alpha_n (1 - beta_n) / (1 - gamma^(n+1))`; must be non-increasing for the
    /// finite-horizon averaged bound to apply.
    pub fn step_weight(&self, n: u64) -> f64 {
        self.eval_alpha(n) * (1.0 - self.eval_beta(n)) / self.bias_divisor(n)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.alpha, AlphaRule::Constant { .. }) && matches!(self.beta, BetaRule::Constant { .. })
    }
}

impl fmt::Display for ScheduleConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alpha {
            AlphaRule::Constant { alpha } => write!(f, "alpha={alpha}")?,
            AlphaRule::InversePower { scale, eta } => write!(f, "alpha={scale}/n^{eta}")?,
        }
        match self.beta {
            BetaRule::Constant { beta } => write!(f, ";beta={beta}")?,
            BetaRule::Geometric { lambda } => write!(f, ";beta={lambda}^n")?,
        }
        write!(f, ";gamma={};delta={};epsilon={}", self.gamma, self.delta, self.epsilon)
    }
}

fn pow_u64(base: f64, exp: u64) -> f64 {
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(exp as f64),
    }
}
