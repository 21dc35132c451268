//! Circular pincer sweep: pairs of sweepers leave back to back, sweep a sector
//! of `2π/n` on a circle whose radius tracks the region boundary, meet their
//! neighbours, step inward and reverse.

use std::f64::consts::PI;

use crate::error::{Result, SweepError};
use crate::model::{validate_scenario, ScenarioParams};
use crate::numeric::ceil_with_tie;
use crate::plan::{PlanBuilder, TrajectoryPlan};

const TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularPincerReport {
    pub critical_velocity: f64,
    pub iterations: usize,
    pub inward_time: f64,
    pub circular_time: f64,
    pub total_time: f64,
}

pub fn critical_velocity(params: &ScenarioParams) -> f64 {
    2.0 * PI * params.region_radius * params.evader_speed / (params.n() * params.sensor_half_length)
}

fn check(params: &ScenarioParams, v_s: f64) -> Result<()> {
    validate_scenario(*params)?;
    let v_c = critical_velocity(params);
    if !(v_s > v_c) {
        return Err(SweepError::SubcriticalVelocity { v_s, v_c });
    }
    Ok(())
}

/// Growth factor of the boundary radius per cycle.
fn growth(params: &ScenarioParams, v_s: f64) -> f64 {
    1.0 + 2.0 * PI * params.evader_speed / (params.n() * (v_s + params.evader_speed))
}

/// Number of sector sweeps until the boundary radius drops to the sensor half-length.
pub fn iteration_count(params: &ScenarioParams, v_s: f64) -> Result<usize> {
    check(params, v_s)?;
    let (r0, r, v_t, n) = (
        params.region_radius,
        params.sensor_half_length,
        params.evader_speed,
        params.n(),
    );
    let ratio = (2.0 * PI * r * v_t - n * r * v_s) / (2.0 * PI * r0 * v_t - n * r * v_s);
    let count = ceil_with_tie(ratio.ln() / growth(params, v_s).ln(), TIE);
    Ok(count.max(1.0) as usize)
}

/// Boundary radii `R_0 = R0, …, R_N` with `R_N` the first at or below `r`.
pub fn radius_sequence(params: &ScenarioParams, v_s: f64) -> Result<Vec<f64>> {
    check(params, v_s)?;
    let c2 = growth(params, v_s);
    let c1 = -params.sensor_half_length * v_s / (v_s + params.evader_speed);
    let mut radii = vec![params.region_radius];
    while *radii.last().unwrap() > params.sensor_half_length {
        let next = c2 * radii.last().unwrap() + c1;
        radii.push(next);
    }
    Ok(radii)
}

pub fn time_breakdown(params: &ScenarioParams, v_s: f64) -> Result<CircularPincerReport> {
    let big_n = iteration_count(params, v_s)?;
    let (r0, r, v_t, n) = (
        params.region_radius,
        params.sensor_half_length,
        params.evader_speed,
        params.n(),
    );
    let c2 = growth(params, v_s);
    let nf = big_n as f64;
    let gap = 2.0 * PI * r0 * v_t - n * r * v_s;
    let inward_time = r0 / v_s + gap / (n * v_s * (v_s + v_t)) * c2.powf(nf - 1.0);
    let circular_time = -r0 * (v_s + v_t) / (v_t * v_s)
        + (n * r * (v_s + v_t) + 2.0 * PI * r * v_t) / (2.0 * PI * v_t * v_t)
        + c2.powf(nf) * (v_s + v_t) * gap / (2.0 * PI * v_s * v_t * v_t)
        + r * (nf - 1.0) / v_t
        + 2.0 * PI * r / (n * v_s);
    Ok(CircularPincerReport {
        critical_velocity: critical_velocity(params),
        iterations: big_n,
        inward_time,
        circular_time,
        total_time: inward_time + circular_time,
    })
}

/// Pair `k` starts at angle `4πk/n`; its first agent turns counter-clockwise,
/// the second clockwise.
pub(crate) fn pincer_starts(n: u32, radius: f64) -> Vec<(f64, f64, f64)> {
    (0..n / 2)
        .flat_map(|k| {
            let angle = 4.0 * PI * f64::from(k) / f64::from(n);
            [(radius, angle, 1.0), (radius, angle, -1.0)]
        })
        .collect()
}

pub fn trajectory_plan(params: &ScenarioParams, v_s: f64) -> Result<TrajectoryPlan> {
    let radii = radius_sequence(params, v_s)?;
    let r = params.sensor_half_length;
    let sector = 2.0 * PI / params.n();
    let cycles = radii.len() - 1;
    let mut b = PlanBuilder::new(r, pincer_starts(params.swarm_size, params.region_radius));
    for i in 0..cycles {
        b.arc(sector, v_s);
        if i + 1 < cycles {
            b.radial_move(radii[i + 1], (radii[i] - radii[i + 1]) / v_s);
            b.switch_direction();
        }
    }
    // inner tips to the center, then one more sector sweep
    b.radial_move(r, radii[cycles] / v_s);
    b.switch_direction();
    b.arc(sector, v_s);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::lower_bound_velocity;
    use approx::assert_relative_eq;

    #[test]
    fn critical_velocity_values() {
        let p = ScenarioParams::reference(2);
        assert_relative_eq!(critical_velocity(&p), 10.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(
            critical_velocity(&p.with_swarm_size(4)),
            5.0 * PI,
            max_relative = 1e-15
        );
        assert_eq!(critical_velocity(&p) / lower_bound_velocity(&p), 2.0);
    }

    #[test]
    fn iteration_count_example() {
        let p = ScenarioParams::reference(2);
        assert_eq!(iteration_count(&p, 40.0).unwrap(), 20);
        assert_eq!(radius_sequence(&p, 40.0).unwrap().len() - 1, 20);
    }

    #[test]
    fn subcritical_rejected() {
        let p = ScenarioParams::reference(2);
        assert!(matches!(
            iteration_count(&p, 31.0),
            Err(SweepError::SubcriticalVelocity { .. })
        ));
        assert!(matches!(
            time_breakdown(&p, 10.0 * PI),
            Err(SweepError::SubcriticalVelocity { .. })
        ));
    }

    #[test]
    fn near_critical_is_large_but_finite() {
        let p = ScenarioParams::reference(2);
        let n = iteration_count(&p, 10.0 * PI * (1.0 + 1e-6)).unwrap();
        assert!(n > 100);
    }

    #[test]
    fn more_agents_fewer_cycles() {
        let p = ScenarioParams::reference(2);
        let counts: Vec<usize> = [2, 4, 8]
            .iter()
            .map(|&n| iteration_count(&p.with_swarm_size(n), 40.0).unwrap())
            .collect();
        assert!(counts[0] > counts[1] && counts[1] > counts[2], "{counts:?}");
    }

    #[test]
    fn plan_matches_total_and_pairs_meet() {
        let p = ScenarioParams::reference(4);
        let v_s = 20.0;
        let plan = trajectory_plan(&p, v_s).unwrap();
        let report = time_breakdown(&p, v_s).unwrap();
        assert_relative_eq!(
            plan.total_duration(),
            report.total_time,
            max_relative = 1e-9
        );
        // end of first arc: agent 0 (pair 0, ccw) meets agent 3 (pair 1, cw)
        let t = plan.phases[0].duration;
        let poses = plan.poses_at(t);
        assert!((poses[0].center[0] - poses[3].center[0]).abs() < 1e-9);
        assert!((poses[0].center[1] - poses[3].center[1]).abs() < 1e-9);
    }
}
