//! Projected adaptive learning-rate optimization.
//!
//! The iteration keeps an exponential moving average of stochastic gradients
//! (with an optional bias correction), a monotone diagonal preconditioner built
//! from squared gradients, and projects every step back onto a box or ball
//! under the preconditioner's norm. Sub-learning rates `alpha_n` (step size)
//! and `beta_n` (momentum weight) may be constant or diminishing.
//!
//! Modules, bottom-up:
//!
//! * [`vector`], [`schedule`], [`feasible`]: shared vocabulary.
//! * [`oracle`]: synthetic stochastic problems with known optima.
//! * [`moment`]: first- and second-moment estimators.
//! * [`projection`]: metric projections under a diagonal norm.
//! * [`engine`]: the iteration loop and trajectory recording.
//! * [`metrics`]: stationarity gap, regret, theory constants and bounds, rate fits.
//! * [`experiment`]: preset catalog, config parsing, CSV/JSON artifacts, comparisons.

pub mod engine;
pub mod error;
pub mod experiment;
pub mod feasible;
pub mod metrics;
pub mod moment;
pub mod oracle;
pub mod projection;
pub mod schedule;
pub mod vector;

pub use engine::{run, OptimizerState, RunOptions, StepOutput};
pub use error::{Error, Result};
pub use feasible::FeasibleSet;
pub use metrics::{RunRecord, Sample, TheoryConstants};
pub use moment::{EstimatorKind, FirstMomentState, SecondMomentState};
pub use oracle::{Optimum, ProblemSpec, SeedState};
pub use schedule::{AlphaRule, BetaRule, ScheduleConfig};
pub use vector::{DenseVector, DiagonalMatrix};
