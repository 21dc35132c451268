use thiserror::Error;

/// Everything that can go wrong while evaluating a scenario.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("swarm size {n} is not an even number of at least 2")]
    OddSwarm { n: u32 },

    #[error("parameter {name} must be strictly positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("region radius {r0} does not exceed the sensor half-length {r}")]
    RegionSmallerThanSensor { r0: f64, r: f64 },

    #[error("sweeper speed {v_s} does not exceed the evader speed {v_t}")]
    SlowSweeper { v_s: f64, v_t: f64 },

    #[error("sweeper speed {v_s} is not above the critical velocity {v_c}")]
    SubcriticalVelocity { v_s: f64, v_c: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("region radius {r0} must exceed twice the sensor half-length {r}")]
    SeedDomain { r0: f64, r: f64 },

    #[error("radius {radius} is at or below the end-game threshold {limit}")]
    RadiusTooSmall { radius: f64, limit: f64 },

    #[error("end-game margin violated: spread window {window} is not longer than the linear scan {linear}")]
    EndgameInfeasible { window: f64, linear: f64 },

    #[error("linear scan not applicable: {reason}")]
    LinearScanInfeasible { reason: String },

    #[error("grid resolution too coarse: {reason}")]
    ResolutionTooCoarse { reason: String },

    #[error("closed form {closed_form} disagrees with component sum {component_sum}")]
    FormulaDiscrepancy {
        closed_form: f64,
        component_sum: f64,
    },
}

pub type Result<T> = std::result::Result<T, SweepError>;
