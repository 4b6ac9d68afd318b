//! Two-sided ergodic singular control and stationary mean-field games for
//! one-dimensional diffusions.
//!
//! The crate computes optimal reflecting barriers for a diffusion with a
//! running cost and proportional push costs, finds the barrier pairs that are
//! best responses to the stationary market they generate, checks candidates
//! against the free-boundary problem, and estimates the same quantities by
//! simulating reflected paths.

pub mod cli;
pub mod control;
pub mod error;
pub mod hjb;
pub mod mfg;
pub mod models;
pub mod numerics;
pub mod sim;

pub use control::{ergodic_cost, pi1, pi2, solve_control, ControlSolution, ThresholdPair};
pub use error::{Error, Result};
pub use models::{CostModel, Diffusion, DiffusionModel, Problem};
pub use numerics::{Tolerance, Window};
