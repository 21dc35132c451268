//! Same-direction circular sweep: every sweeper orbits counter-clockwise on a
//! circle that tracks the boundary, then finishes with a back-and-forth
//! linear scan once the region fits inside the sensor reach.

use std::f64::consts::PI;

use crate::error::{Result, SweepError};
use crate::model::{validate_scenario, ScenarioParams};
use crate::numeric::{ceil_with_tie, rel_diff};
use crate::plan::{PlanBuilder, TrajectoryPlan};

const TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalVelocities {
    /// Includes the arcsine overshoot term.
    pub exact: f64,
    /// First-order form used by all time formulas.
    pub linearized: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularSameEndgame {
    /// Radius bounding the region after the last sweep.
    pub last_radius: f64,
    pub last_sweep_time: f64,
    /// Rightward leg.
    pub outbound_time: f64,
    /// Leftward leg.
    pub return_time: f64,
    pub linear_time: f64,
    /// Time the region needs to spread past the sensor line.
    pub spread_window: f64,
}

impl CircularSameEndgame {
    pub fn feasible(&self) -> bool {
        self.spread_window > self.linear_time
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularSameReport {
    pub critical: CriticalVelocities,
    pub iterations: usize,
    pub inward_time: f64,
    pub circular_time: f64,
    pub endgame: CircularSameEndgame,
    pub total_time: f64,
    pub min_speed_margin: f64,
}

pub fn critical_velocity(params: &ScenarioParams) -> CriticalVelocities {
    let (r0, r, v_t, n) = (
        params.region_radius,
        params.sensor_half_length,
        params.evader_speed,
        params.n(),
    );
    CriticalVelocities {
        exact: (2.0 * PI / n + (r / r0).asin()) * r0 * v_t / r,
        linearized: 2.0 * PI * r0 * v_t / (r * n) + v_t,
    }
}

fn check(params: &ScenarioParams, v_s: f64) -> Result<()> {
    validate_scenario(*params)?;
    let v_c = critical_velocity(params).linearized;
    if !(v_s > v_c) {
        return Err(SweepError::SubcriticalVelocity { v_s, v_c });
    }
    Ok(())
}

struct Coefficients {
    c1: f64,
    c2: f64,
}

fn coefficients(params: &ScenarioParams, v_s: f64) -> Coefficients {
    let (r, v_t, n) = (params.sensor_half_length, params.evader_speed, params.n());
    Coefficients {
        c1: -r * (v_s - v_t) / (v_s + v_t),
        c2: 1.0 + 2.0 * PI * v_t / (n * (v_s + v_t)),
    }
}

/// Boundary radii `R_0, …, R_N` with `R_N` the first at or below `r`.
pub fn radius_sequence(params: &ScenarioParams, v_s: f64) -> Result<Vec<f64>> {
    check(params, v_s)?;
    let c = coefficients(params, v_s);
    let mut radii = vec![params.region_radius];
    while *radii.last().unwrap() > params.sensor_half_length {
        let next = c.c2 * radii.last().unwrap() + c.c1;
        radii.push(next);
    }
    Ok(radii)
}

/// `R_i` without iterating.
pub fn radius_closed_form(params: &ScenarioParams, v_s: f64, index: usize) -> f64 {
    let c = coefficients(params, v_s);
    let fixed = c.c1 / (1.0 - c.c2);
    fixed + c.c2.powi(index as i32) * (params.region_radius - fixed)
}

/// Cycle count from the logarithmic closed form.
pub fn iteration_count_closed_form(params: &ScenarioParams, v_s: f64) -> Result<usize> {
    check(params, v_s)?;
    let c = coefficients(params, v_s);
    let fixed = c.c1 / (1.0 - c.c2);
    let arg = (fixed - params.sensor_half_length) / (fixed - params.region_radius);
    Ok(ceil_with_tie(arg.ln() / c.c2.ln(), TIE).max(1.0) as usize)
}

/// Cycle count by iterating the recursion; authoritative.
pub fn iteration_count(params: &ScenarioParams, v_s: f64) -> Result<usize> {
    Ok(radius_sequence(params, v_s)?.len() - 1)
}

pub fn endgame_unchecked(params: &ScenarioParams, v_s: f64) -> CircularSameEndgame {
    let (r, v_t, n) = (params.sensor_half_length, params.evader_speed, params.n());
    let last_radius = 2.0 * PI * r * v_t / (n * v_s);
    let outbound_time = last_radius / (v_s - v_t);
    let return_time = 2.0 * v_s * last_radius / ((v_s - v_t) * (v_s - v_t));
    CircularSameEndgame {
        last_radius,
        last_sweep_time: 2.0 * PI * r / (n * v_s),
        outbound_time,
        return_time,
        linear_time: (6.0 * PI * r * v_t * v_s - 2.0 * PI * r * v_t * v_t)
            / (n * v_s * (v_s - v_t) * (v_s - v_t)),
        spread_window: (2.0 * r - last_radius) / v_t,
    }
}

pub fn endgame(params: &ScenarioParams, v_s: f64) -> Result<CircularSameEndgame> {
    check(params, v_s)?;
    let eg = endgame_unchecked(params, v_s);
    if !eg.feasible() {
        return Err(SweepError::EndgameInfeasible {
            window: eg.spread_window,
            linear: eg.linear_time,
        });
    }
    Ok(eg)
}

/// Smallest speed margin for which the linear end-game cannot be outrun.
/// Negative values mean any margin works.
pub fn min_delta_v(params: &ScenarioParams) -> f64 {
    let alpha = params.region_radius / params.sensor_half_length;
    let (v_t, n) = (params.evader_speed, params.n());
    (-4.0 * PI * v_t * alpha + PI * v_t + v_t * (PI * PI + 8.0 * PI * n).sqrt()) / (2.0 * n)
}

/// Coefficients `(b, c)` of the monic margin quadratic `ΔV² + bΔV + c`.
pub fn margin_quadratic(params: &ScenarioParams) -> (f64, f64) {
    let alpha = params.region_radius / params.sensor_half_length;
    let (v_t, n) = (params.evader_speed, params.n());
    let b = (4.0 * PI * v_t * alpha - PI * v_t) / n;
    let c = (4.0 * PI * PI * v_t * v_t * alpha * alpha
        - 2.0 * PI * PI * alpha * v_t * v_t
        - 2.0 * PI * n * v_t * v_t)
        / (n * n);
    (b, c)
}

pub fn time_breakdown(params: &ScenarioParams, v_s: f64) -> Result<CircularSameReport> {
    let big_n = iteration_count(params, v_s)?;
    let (r0, r, v_t, n) = (
        params.region_radius,
        params.sensor_half_length,
        params.evader_speed,
        params.n(),
    );
    let c2 = coefficients(params, v_s).c2;
    let nf = big_n as f64;
    let gap = 2.0 * PI * r0 * v_t - r * n * (v_s - v_t);
    let span = r * n * (v_s - v_t) / (2.0 * PI * v_t * v_s);

    let advances = r0 / v_s - span - c2.powf(nf - 1.0) * gap / (2.0 * PI * v_t * v_s);
    let last_advance = span + c2.powf(nf) * gap / (2.0 * PI * v_t * v_s);
    let circular_time = -r0 * (v_s + v_t) / (v_s * v_t)
        + r * (v_s - v_t) * (n * (v_s + v_t) + 2.0 * PI * v_t * nf) / (2.0 * PI * v_t * v_t * v_s)
        + c2.powf(nf) * (v_s + v_t) * gap / (2.0 * PI * v_t * v_t * v_s)
        + 2.0 * PI * r / (n * v_s);
    let eg = endgame_unchecked(params, v_s);
    let inward_time = advances + last_advance;
    Ok(CircularSameReport {
        critical: critical_velocity(params),
        iterations: big_n,
        inward_time,
        circular_time,
        endgame: eg,
        total_time: circular_time + inward_time + eg.linear_time,
        min_speed_margin: min_delta_v(params),
    })
}

/// Single-expression total as printed alongside the component sum. Kept as a
/// cross-check only.
pub fn closed_form_total(params: &ScenarioParams, v_s: f64) -> Result<f64> {
    let big_n = iteration_count(params, v_s)?;
    let (r0, r, v_t, n) = (
        params.region_radius,
        params.sensor_half_length,
        params.evader_speed,
        params.n(),
    );
    let c2 = coefficients(params, v_s).c2;
    let nf = big_n as f64;
    let gap = 2.0 * PI * r0 * v_t - r * n * (v_s - v_t);
    Ok(-r0 / v_t
        + r * (v_s - v_t) * (n * (v_s + v_t) + 2.0 * PI * v_t * nf) / (2.0 * PI * v_t * v_t * v_s)
        + c2.powf(nf - 1.0) * gap / v_s
            * (1.0 / (n * (v_s + v_t))
                + v_s / (2.0 * PI * v_t * v_t)
                + 1.0 / (2.0 * PI * v_t)
                + 1.0 / (n * v_t))
        + 2.0 * PI * r / (n * v_s)
        + (6.0 * PI * r * v_t * v_s - 2.0 * PI * r * v_t * v_t)
            / (n * v_s * (v_s - v_t) * (v_s - v_t)))
}

/// Total time including the end-game; fails if the linear scan can be outrun.
pub fn total_time(params: &ScenarioParams, v_s: f64) -> Result<f64> {
    let report = time_breakdown(params, v_s)?;
    endgame(params, v_s)?;
    Ok(report.total_time)
}

/// Compares the single-expression total with the component sum.
pub fn check_closed_form_total(params: &ScenarioParams, v_s: f64, tolerance: f64) -> Result<f64> {
    let component_sum = time_breakdown(params, v_s)?.total_time;
    let closed_form = closed_form_total(params, v_s)?;
    if rel_diff(closed_form, component_sum) > tolerance {
        return Err(SweepError::FormulaDiscrepancy {
            closed_form,
            component_sum,
        });
    }
    Ok(component_sum)
}

/// Agent `k` starts so that after every sweep it sits at `π/2 + 2πk/n`,
/// putting agents `0` and `n/2` tip to tip on the vertical axis.
pub(crate) fn same_direction_starts(n: u32, radius: f64, total_turn: f64) -> Vec<(f64, f64, f64)> {
    (0..n)
        .map(|k| {
            (
                radius,
                PI / 2.0 + 2.0 * PI * f64::from(k) / f64::from(n) - total_turn,
                1.0,
            )
        })
        .collect()
}

/// Arcs use the bookkept sector time, so the overshoot past each sector is
/// not traversed.
pub fn trajectory_plan(params: &ScenarioParams, v_s: f64) -> Result<TrajectoryPlan> {
    let radii = radius_sequence(params, v_s)?;
    let eg = endgame(params, v_s)?;
    let r = params.sensor_half_length;
    let sector = 2.0 * PI / params.n();
    let cycles = radii.len() - 1;
    let turn = sector * (cycles + 1) as f64;
    let mut b = PlanBuilder::new(
        r,
        same_direction_starts(params.swarm_size, params.region_radius, turn),
    );
    for i in 0..cycles {
        b.arc(sector, v_s);
        if i + 1 < cycles {
            b.radial_move(radii[i + 1], (radii[i] - radii[i + 1]) / v_s);
        }
    }
    b.radial_move(r, radii[cycles] / v_s);
    b.arc(sector, v_s);
    b.linear_leg(eg.outbound_time, [v_s, 0.0]);
    b.linear_leg(eg.return_time, [-v_s, 0.0]);
    Ok(b.finish())
}
