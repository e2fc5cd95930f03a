//! Closed convex feasible sets with cheap projections.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::vector::{norm, DenseVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeasibleSet {
    Box { lower: DenseVector, upper: DenseVector },
    Ball { center: DenseVector, radius: f64 },
}

impl FeasibleSet {
    pub fn new_box(lower: DenseVector, upper: DenseVector) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] >= upper[i]) {
            return Err(Error::invalid(
                "box",
                format!("lower[{i}] = {} is not below upper[{i}] = {}", lower[i], upper[i]),
            ));
        }
        Ok(FeasibleSet::Box { lower, upper })
    }

    /// `[-half_width, half_width]^d`.
    pub fn symmetric_box(d: usize, half_width: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("d", "dimension must be positive"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::invalid("box_halfwidth", format!("{half_width} must be positive")));
        }
        Self::new_box(DenseVector::filled(d, -half_width), DenseVector::filled(d, half_width))
    }

    pub fn new_ball(center: DenseVector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("radius", format!("{radius} must be positive")));
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    pub fn centered_ball(d: usize, radius: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("d", "dimension must be positive"));
        }
        Self::new_ball(DenseVector::zeros(d), radius)
    }

    pub fn dimension(&self) -> usize {
        match self {
            FeasibleSet::Box { lower, .. } => lower.len(),
            FeasibleSet::Ball { center, .. } => center.len(),
        }
    }

    /// `D = max_i sup { (x_i - y_i)^2 : x, y in X }`.
    pub fn diameter_constant(&self) -> f64 {
        match self {
            FeasibleSet::Box { lower, upper } => lower
                .iter()
                .zip(upper.iter())
                .map(|(l, u)| (u - l) * (u - l))
                .fold(0.0, f64::max),
            FeasibleSet::Ball { radius, .. } => 4.0 * radius * radius,
        }
    }

    /// Range of coordinate `i` over the set.
    pub fn coordinate_range(&self, i: usize) -> (f64, f64) {
        match self {
            FeasibleSet::Box { lower, upper } => (lower[i], upper[i]),
            FeasibleSet::Ball { center, radius } => (center[i] - radius, center[i] + radius),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dimension() {
            return false;
        }
        match self {
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol),
            FeasibleSet::Ball { center, radius } => distance(x, center) <= radius + tol,
        }
    }

    /// Uniform draw from the set.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            FeasibleSet::Box { lower, upper } => lower
                .iter()
                .zip(upper.iter())
                .map(|(l, u)| l + (u - l) * rng.random::<f64>())
                .collect(),
            FeasibleSet::Ball { center, radius } => {
                let d = center.len();
                let mut dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let len = norm(&dir).max(f64::MIN_POSITIVE);
                let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
                for (v, c) in dir.iter_mut().zip(center.iter()) {
                    *v = c + r * *v / len;
                }
                dir
            }
        }
    }

    /// Minimum of `<g, y>` over `y` in the set, with a minimizer.
    pub fn linear_minimum(&self, g: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim(self.dimension(), g.len())?;
        match self {
            FeasibleSet::Box { lower, upper } => {
                let y: Vec<f64> = g
                    .iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(gi, (l, u))| if *gi > 0.0 { *l } else { *u })
                    .collect();
                let value = y.iter().zip(g).map(|(a, b)| a * b).sum();
                Ok((value, y))
            }
            FeasibleSet::Ball { center, radius } => {
                let gn = norm(g);
                let y: Vec<f64> = if gn > 0.0 {
                    center.iter().zip(g).map(|(c, gi)| c - radius * gi / gn).collect()
                } else {
                    center.to_vec()
                };
                let value = center.iter().zip(g).map(|(c, gi)| c * gi).sum::<f64>() - radius * gn;
                Ok((value, y))
            }
        }
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
