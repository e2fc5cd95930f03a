//! First-moment (momentum) and second-moment (diagonal preconditioner) estimators.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::vector::{DenseVector, DiagonalMatrix};

/// How `v_hat` is formed from the squared-gradient average `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// `v_hat_n = max(v_hat_{n-1}, v_n / (1 - delta^(n+1)))`.
    AdamMax,
    /// `v_hat_n = max(v_hat_{n-1}, v_n)`.
    AmsGrad,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::AdamMax => "adam-max",
            EstimatorKind::AmsGrad => "amsgrad",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adam-max" | "adammax" | "adam" => Ok(EstimatorKind::AdamMax),
            "amsgrad" | "ams-grad" => Ok(EstimatorKind::AmsGrad),
            other => Err(Error::config("estimator", format!("unknown estimator `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstMomentState {
    m: DenseVector,
    m_init: DenseVector,
}

impl FirstMomentState {
    /// Starts from `m_{-1} = 0`.
    pub fn zeros(d: usize) -> Self {
        Self::with_initial(DenseVector::zeros(d))
    }

    pub fn with_initial(m_init: DenseVector) -> Self {
        Self {
            m: m_init.clone(),
            m_init,
        }
    }

    pub fn m(&self) -> &DenseVector {
        &self.m
    }

    /// `m_{-1}`.
    pub fn initial(&self) -> &DenseVector {
        &self.m_init
    }

    /// `m <- beta_n m + (1 - beta_n) g`.
    pub fn update(&mut self, g: &[f64], beta_n: f64) -> Result<()> {
        check_dim(self.m.len(), g.len())?;
        let keep = 1.0 - beta_n;
        // Written as a step toward g so that m = g is an exact fixed point.
        for (m, gi) in self.m.as_mut_slice().iter_mut().zip(g) {
            *m += keep * (gi - *m);
        }
        Ok(())
    }
}

/// `m / (1 - gamma^(n+1))`.
pub fn bias_correct(m: &[f64], gamma: f64, n: u64) -> Result<DenseVector> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid("gamma", format!("{gamma} not in [0, 1)")));
    }
    let div = bias_divisor(gamma, n);
    DenseVector::new(m.iter().map(|v| v / div).collect())
}

pub(crate) fn bias_divisor(gamma: f64, n: u64) -> f64 {
    match i32::try_from(n.saturating_add(1)) {
        Ok(e) => 1.0 - gamma.powi(e),
        Err(_) => 1.0 - gamma.powf(n as f64 + 1.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondMomentState {
    kind: EstimatorKind,
    v: DenseVector,
    v_hat: DenseVector,
    delta: f64,
    epsilon: f64,
    step_index: u64,
}

impl SecondMomentState {
    /// `v_{-1} = v_hat_{-1} = 0`.
    pub fn new(kind: EstimatorKind, d: usize, delta: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::invalid("delta", format!("{delta} not in [0, 1)")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", format!("{epsilon} must be positive")));
        }
        if d == 0 {
            return Err(Error::invalid("d", "dimension must be positive"));
        }
        Ok(Self {
            kind,
            v: DenseVector::zeros(d),
            v_hat: DenseVector::zeros(d),
            delta,
            epsilon,
            step_index: 0,
        })
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn v(&self) -> &DenseVector {
        &self.v
    }

    pub fn v_hat(&self) -> &DenseVector {
        &self.v_hat
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn update(&mut self, g: &[f64]) -> Result<()> {
        check_dim(self.v.len(), g.len())?;
        let delta = self.delta;
        let keep = 1.0 - delta;
        let correction = match self.kind {
            EstimatorKind::AdamMax => bias_divisor(delta, self.step_index),
            EstimatorKind::AmsGrad => 1.0,
        };
        for ((v, vh), gi) in self
            .v
            .as_mut_slice()
            .iter_mut()
            .zip(self.v_hat.as_mut_slice().iter_mut())
            .zip(g)
        {
            *v = delta * *v + keep * gi * gi;
            *vh = vh.max(*v / correction);
        }
        self.step_index += 1;
        Ok(())
    }

    /// `H = diag(sqrt(v_hat) + epsilon)`.
    pub fn preconditioner(&self) -> DiagonalMatrix {
        let mut diag = vec![0.0; self.v.len()];
        self.preconditioner_into(&mut diag);
        DiagonalMatrix::new(diag).expect("sqrt(v_hat) + epsilon is positive")
    }

    pub(crate) fn preconditioner_into(&self, out: &mut [f64]) {
        for (h, vh) in out.iter_mut().zip(self.v_hat.iter()) {
            *h = vh.sqrt() + self.epsilon;
        }
    }
}
