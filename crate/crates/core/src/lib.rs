// Validation deliberately writes `!(x > 0.0)` so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Simulation and Lyapunov stability analysis of 1-D non-uniform linear
//! hyperbolic systems of balance laws with additive disturbances under linear
//! boundary feedback.
//!
//! The crate advances the discretised system with a first-order upwind
//! transport step and an explicit-Euler source step, evaluates the weighted
//! discrete Lyapunov function along the run, certifies its exponential decay
//! envelope, and verifies the positivity conditions that the certificate
//! rests on. A shallow-water channel experiment (steady profile, steady-state
//! linearization and characteristic coordinates) is built in.

pub mod error;
pub mod grid;
pub mod saint_venant;
pub mod solver;
pub mod stability;
pub mod system;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{build_grid, GridSpec};
pub use solver::{
    apply_boundary, simulate, source_step, transport_step, BoundaryTiming, SimulateOptions,
    SimulationOutput,
};
pub use stability::{
    check_boundary_matrix, check_continuous, check_source_matrix, check_theta, condition_report,
    decay_rate_exponential, feedback_bounds, gronwall_envelope, iss_bound_check, lyapunov_value,
    min_eig_symmetric, weight_bounds, ConditionReport, ContinuousConditions, ContinuousModel,
    LyapunovSeries,
};
pub use system::{
    linear_example, Disturbance, FeedbackMatrix, LinearExample, StateField, SystemCoefficients,
    TimeProfile,
};
pub use weights::{realize_weights, RealizedWeights, WeightSpec};
