//! Metric projections onto the feasible set under a diagonal norm
//! `||z||_H^2 = sum_i h_i z_i^2`.
//!
//! For a box the weighted problem separates per coordinate, so the weighted
//! projection is the plain clamp. For a ball the KKT conditions give
//! `x_i = c_i + h_i (y_i - c_i) / (h_i + mu)` for a scalar multiplier
//! `mu >= 0`, which is found by bisection on the radius constraint.

use crate::error::{check_dim, Error, Result};
use crate::feasible::{distance, FeasibleSet};
use crate::vector::{DenseVector, DiagonalMatrix};

/// Relative bisection tolerance used by [`project`].
pub const BALL_TOLERANCE: f64 = 1e-12;
pub const MAX_BISECTION_STEPS: usize = 200;
const MAX_BRACKET_DOUBLINGS: usize = 2000;

pub fn project_box(lower: &[f64], upper: &[f64], y: &[f64]) -> Result<DenseVector> {
    check_dim(lower.len(), y.len())?;
    check_dim(upper.len(), y.len())?;
    let mut out = y.to_vec();
    clamp_in_place(lower, upper, &mut out);
    DenseVector::new(out)
}

pub fn project_ball_weighted(
    center: &[f64],
    radius: f64,
    h: &DiagonalMatrix,
    y: &[f64],
    tol: f64,
) -> Result<DenseVector> {
    check_dim(center.len(), y.len())?;
    check_dim(h.dim(), y.len())?;
    if !(radius > 0.0) {
        return Err(Error::invalid("radius", format!("{radius} must be positive")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("{tol} must be positive")));
    }
    let mut out = y.to_vec();
    ball_in_place(center, radius, h.diag(), &mut out, tol)?;
    DenseVector::new(out)
}

/// `P_{X,H}(y)`. `H` is ignored for boxes.
pub fn project(set: &FeasibleSet, h: &DiagonalMatrix, y: &[f64]) -> Result<DenseVector> {
    check_dim(set.dimension(), y.len())?;
    check_dim(h.dim(), y.len())?;
    let mut out = y.to_vec();
    project_in_place(set, h.diag(), &mut out)?;
    DenseVector::new(out)
}

/// Allocation-free form used by the engine. `h` must be strictly positive.
pub(crate) fn project_in_place(set: &FeasibleSet, h: &[f64], y: &mut [f64]) -> Result<()> {
    match set {
        FeasibleSet::Box { lower, upper } => {
            clamp_in_place(lower, upper, y);
            Ok(())
        }
        FeasibleSet::Ball { center, radius } => ball_in_place(center, *radius, h, y, BALL_TOLERANCE),
    }
}

fn clamp_in_place(lower: &[f64], upper: &[f64], y: &mut [f64]) {
    for ((v, l), u) in y.iter_mut().zip(lower).zip(upper) {
        *v = v.max(*l).min(*u);
    }
}

fn ball_in_place(center: &[f64], radius: f64, h: &[f64], y: &mut [f64], tol: f64) -> Result<()> {
    let r2 = radius * radius;
    // Squared distance from the center of the KKT point for multiplier mu.
    let excess = |mu: f64| -> f64 {
        y.iter()
            .zip(center)
            .zip(h)
            .map(|((yi, ci), hi)| {
                let s = hi * (yi - ci) / (hi + mu);
                s * s
            })
            .sum::<f64>()
            - r2
    };
    if excess(0.0) <= 0.0 {
        return Ok(());
    }

    let mut hi_mu = 1.0;
    let mut doublings = 0;
    while excess(hi_mu) > 0.0 {
        hi_mu *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi_mu.is_finite() {
            return Err(Error::ProjectionNotConverged {
                iterations: 0,
                best_mu: hi_mu,
            });
        }
    }
    let mut lo_mu = 0.0;
    let mut converged = false;
    for _ in 0..MAX_BISECTION_STEPS {
        if hi_mu - lo_mu <= tol * hi_mu {
            converged = true;
            break;
        }
        let mid = 0.5 * (lo_mu + hi_mu);
        if excess(mid) > 0.0 {
            lo_mu = mid;
        } else {
            hi_mu = mid;
        }
    }
    if !converged {
        return Err(Error::ProjectionNotConverged {
            iterations: MAX_BISECTION_STEPS,
            best_mu: hi_mu,
        });
    }

    // hi_mu is on the feasible side of the constraint.
    for ((yi, ci), hi) in y.iter_mut().zip(center).zip(h) {
        *yi = ci + hi * (*yi - ci) / (hi + hi_mu);
    }
    let dist = distance(y, center);
    if dist > radius {
        for (yi, ci) in y.iter_mut().zip(center) {
            *yi = ci + (*yi - ci) * radius / dist;
        }
    }
    Ok(())
}
