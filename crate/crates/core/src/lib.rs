//! Telegraph process driven by the intensity `lambda(t) = theta tanh(theta t)`.
//!
//! A particle moves at speed `c` and reverses direction at the events of an
//! inhomogeneous Poisson process with that intensity. The crate provides the
//! special functions the closed-form law needs, samplers for switching times
//! and trajectories, the law itself (atoms, density, CDF, velocity
//! statistics), a method-of-moments estimator for `theta`, and a
//! verification harness that checks all of it numerically.

pub mod error;
pub mod estimate;
pub mod intensity;
pub mod law;
pub mod process;
pub mod quadrature;
pub mod specfun;
pub mod stream;
pub mod validate;

pub use error::{Error, Result};
pub use estimate::{estimate_replicated, estimate_single, EstimateResult, Scheme};
pub use intensity::{EventTimes, ModelParams};
pub use law::LawDecomposition;
pub use process::{simulate_batch, simulate_trajectory, Sign, SwitchTrajectory, TrajectoryRecord};
pub use validate::{run_experiment, ExperimentConfig, ExperimentReport};
