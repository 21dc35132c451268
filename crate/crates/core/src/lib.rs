//! Planning and verification toolkit for guaranteed-detection sweeps of a
//! disk by an even swarm of line-sensor agents.
//!
//! Four strategies are covered: circular and spiral sweeps, each either as
//! back-to-back pincer pairs or with every agent turning the same way. For
//! each one the crate computes critical velocities, cycle counts and total
//! sweep times, builds a trajectory plan, and replays plans on a grid
//! simulator that models worst-case evader spread.

pub mod circular_pincer;
pub mod circular_same;
pub mod error;
pub mod model;
pub mod numeric;
pub mod plan;
pub mod sim;
pub mod spiral_pincer;
pub mod spiral_same;
pub mod study;

pub use error::{Result, SweepError};
pub use model::{
    lower_bound_velocity, spiral_radius_after_angle, spiral_tilt_angle, validate_scenario,
    ScenarioParams, SpiralGeometry, Strategy,
};
pub use plan::{Motion, Phase, PhaseKind, Pose, TrajectoryPlan};
pub use sim::{Outcome, SimWorld};
pub use spiral_same::RadiusMode;
pub use study::Family;
