//! Same-direction spiral sweep. Each cycle is an outward spiral over one
//! sector followed by an inward spiral that chases the wavefront spreading
//! from the inner tip of the neighbouring sensor's start point.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::circular_same::same_direction_starts;
use crate::error::{Result, SweepError};
use crate::model::{lower_bound_velocity, sector_growth, validate_scenario, ScenarioParams};
use crate::numeric::bisect;
use crate::plan::{PlanBuilder, TrajectoryPlan};

const MAX_NEWTON: usize = 100;
const MAX_ROUNDS: usize = 50;
const MAX_CYCLES: usize = 1_000_000;
const ANGLE_SCAN_STEP: f64 = 2e-3;

/// How the region radius is updated after a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusMode {
    /// Shrinks by the full spread during the cycle.
    #[default]
    Verbatim,
    /// Grows by the spread and loses the `2r` band the sensor cleaned.
    Band,
    /// Like `Band`, but also counts the spread during the inward advance.
    Tracked,
}

impl fmt::Display for RadiusMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RadiusMode::Verbatim => "verbatim",
            RadiusMode::Band => "band",
            RadiusMode::Tracked => "tracked",
        })
    }
}

impl FromStr for RadiusMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "verbatim" => Ok(RadiusMode::Verbatim),
            "band" => Ok(RadiusMode::Band),
            "tracked" => Ok(RadiusMode::Tracked),
            other => Err(format!("unknown radius mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralSameIteration {
    pub radius: f64,
    pub main_time: f64,
    pub overshoot_angle: f64,
    pub overshoot_time: f64,
    /// Angle of the tip point seen from the region center (diagnostic).
    pub wavefront_angle: f64,
    pub next_radius: f64,
    /// Radial repositioning before the next cycle; zero after the last one.
    pub advance_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralSameEndgame {
    pub final_advance_time: f64,
    pub last_spiral_time: f64,
    pub last_radius: f64,
    pub reposition_time: f64,
    pub linear_start_radius: f64,
    pub outbound_time: f64,
    pub return_time: f64,
    pub linear_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpiralSameReport {
    pub critical_velocity: f64,
    pub mode: RadiusMode,
    pub iterations: Vec<SpiralSameIteration>,
    pub spiral_time: f64,
    pub inward_time: f64,
    pub endgame: SpiralSameEndgame,
    pub total_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalSolution {
    pub velocity: f64,
    pub overshoot_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OvershootSolution {
    pub angle: f64,
    pub time: f64,
    pub wavefront_angle: f64,
}

/// Per-cycle geometry at one radius and speed.
#[derive(Debug, Clone, Copy)]
struct Cycle {
    radius: f64,
    half: f64,
    v_t: f64,
    /// Growth exponent per radian.
    k: f64,
    main_time: f64,
    /// Center radius at the end of the outward spiral.
    peak: f64,
}

impl Cycle {
    fn new(radius: f64, params: &ScenarioParams, v_s: f64) -> Self {
        let (r, v_t, n) = (params.sensor_half_length, params.evader_speed, params.n());
        let k = v_t / (v_s * v_s - v_t * v_t).sqrt();
        let e = (2.0 * PI * k / n).exp();
        let base = radius - r;
        Cycle {
            radius,
            half: r,
            v_t,
            k,
            main_time: base * (e - 1.0) / v_t,
            peak: base * e,
        }
    }

    fn overshoot_time(&self, angle: f64) -> f64 {
        self.peak * (1.0 - (-angle * self.k).exp()) / self.v_t
    }

    fn tip(&self, angle: f64) -> (f64, f64) {
        let t_phi = self.overshoot_time(angle);
        let (s, c) = angle.sin_cos();
        (
            -self.v_t * t_phi * s,
            (self.radius + self.v_t * self.main_time - self.v_t * t_phi) * c,
        )
    }

    fn spread(&self, angle: f64) -> f64 {
        self.v_t * (self.main_time + self.overshoot_time(angle))
    }

    /// Zero when the outer tip lies on the wavefront from the dangerous point.
    fn wavefront_gap(&self, angle: f64) -> f64 {
        let (x, y) = self.tip(angle);
        let dy = y - self.radius + 2.0 * self.half;
        let w = self.spread(angle);
        x * x + dy * dy - w * w
    }

    fn wavefront_gap_slope(&self, angle: f64) -> f64 {
        let h = 1e-7 * (1.0 + angle);
        (self.wavefront_gap(angle + h) - self.wavefront_gap(angle - h)) / (2.0 * h)
    }
}

/// Time to spiral through one sector starting with the outer tip at `radius`.
pub fn main_sweep_time(radius: f64, params: &ScenarioParams, v_s: f64) -> Result<f64> {
    let v_t = params.evader_speed;
    if !(v_s > v_t) {
        return Err(SweepError::SlowSweeper { v_s, v_t });
    }
    let e = sector_growth(params.n(), v_s, v_t);
    Ok((radius - params.sensor_half_length) * (e - 1.0) / v_t)
}

/// Confinement residual at radius `radius`: spread over the cycle minus `2r`.
pub fn confinement_residual(radius: f64, params: &ScenarioParams, v_s: f64, angle: f64) -> f64 {
    let (r, v_t, n) = (params.sensor_half_length, params.evader_speed, params.n());
    let q = (v_s * v_s - v_t * v_t).sqrt();
    let e = (2.0 * PI * v_t / (n * q)).exp();
    let tail = (v_t * (2.0 * PI - n * angle) / (n * q)).exp();
    (radius - r) * (2.0 * e - tail - 1.0) - 2.0 * r
}

fn residual_speed_slope(radius: f64, params: &ScenarioParams, v_s: f64, angle: f64) -> f64 {
    let (r, v_t, n) = (params.sensor_half_length, params.evader_speed, params.n());
    let q2 = v_s * v_s - v_t * v_t;
    let q = q2.sqrt();
    let e = (2.0 * PI * v_t / (n * q)).exp();
    let tail = (v_t * (2.0 * PI - n * angle) / (n * q)).exp();
    (radius - r) * v_t * v_s / (n * q2 * q) * (-4.0 * PI * e + (2.0 * PI - n * angle) * tail)
}

/// Outer tip position after the overshoot, in the frame where the cycle
/// started on the negative vertical axis.
pub fn tip_point(radius: f64, params: &ScenarioParams, v_s: f64, angle: f64) -> (f64, f64) {
    Cycle::new(radius, params, v_s).tip(angle)
}

/// Signed gap between the tip and the wavefront circle (squared-distance form).
pub fn wavefront_residual(radius: f64, params: &ScenarioParams, v_s: f64, angle: f64) -> f64 {
    Cycle::new(radius, params, v_s).wavefront_gap(angle)
}

/// Overshoot angle recovered from the overshoot duration.
pub fn angle_from_overshoot_time(radius: f64, params: &ScenarioParams, v_s: f64, time: f64) -> f64 {
    let c = Cycle::new(radius, params, v_s);
    -((c.peak - c.v_t * time) / c.peak).ln() / c.k
}

fn first_crossing(c: &Cycle) -> Option<f64> {
    let mut lo = 0.0;
    let limit = 2.0 * PI;
    while lo < limit {
        let hi = lo + ANGLE_SCAN_STEP;
        let g = c.wavefront_gap(hi);
        if g == 0.0 {
            return Some(hi);
        }
        if g < 0.0 {
            let mut x = bisect(|a| c.wavefront_gap(a), lo, hi, 1e-13, 200)?;
            for _ in 0..MAX_NEWTON {
                let slope = c.wavefront_gap_slope(x);
                if slope == 0.0 {
                    break;
                }
                let next = x - c.wavefront_gap(x) / slope;
                if !(next > lo && next < hi) || (next - x).abs() <= 1e-15 * x.max(1.0) {
                    if next > lo && next < hi {
                        x = next;
                    }
                    break;
                }
                x = next;
            }
            return Some(x);
        }
        lo = hi;
    }
    None
}

/// Overshoot angle at `radius`: the first angle at which the outer tip meets
/// the wavefront.
pub fn solve_phi_at_radius(
    radius: f64,
    params: &ScenarioParams,
    v_s: f64,
) -> Result<OvershootSolution> {
    let r = params.sensor_half_length;
    if radius <= 2.0 * r {
        return Err(SweepError::RadiusTooSmall {
            radius,
            limit: 2.0 * r,
        });
    }
    if !(v_s > params.evader_speed) {
        return Err(SweepError::SlowSweeper {
            v_s,
            v_t: params.evader_speed,
        });
    }
    let c = Cycle::new(radius, params, v_s);
    let angle = first_crossing(&c).ok_or(SweepError::NoConvergence {
        what: "overshoot angle",
        iterations: MAX_NEWTON,
    })?;
    let (x, y) = c.tip(angle);
    Ok(OvershootSolution {
        angle,
        time: c.overshoot_time(angle),
        wavefront_angle: (x / y).atan(),
    })
}

/// Seed for the overshoot angle.
pub fn overshoot_seed(params: &ScenarioParams) -> Result<f64> {
    let (r0, r) = (params.region_radius, params.sensor_half_length);
    if r0 <= 2.0 * r || 2.0 * r > r0 - 2.0 * r {
        return Err(SweepError::SeedDomain { r0, r });
    }
    Ok((2.0 * r / (r0 - 2.0 * r)).asin())
}

fn critical_gap(params: &ScenarioParams, v_s: f64) -> Option<f64> {
    let sol = solve_phi_at_radius(params.region_radius, params, v_s).ok()?;
    Some(confinement_residual(
        params.region_radius,
        params,
        v_s,
        sol.angle,
    ))
}

/// Jointly solves for the critical velocity and the first-cycle overshoot angle.
///
/// The speed is bracketed on the confinement residual evaluated at the first
/// wavefront crossing, bisected, then polished by alternating a Newton step in
/// speed with a re-solve of the angle.
pub fn solve_phi_and_critical_velocity(params: &ScenarioParams) -> Result<CriticalSolution> {
    validate_scenario(*params)?;
    overshoot_seed(params)?;
    let v_t = params.evader_speed;
    let r0 = params.region_radius;
    let floor = v_t * (1.0 + 1e-9);
    let mut lo = lower_bound_velocity(params).max(1.01 * v_t);
    // walk down until confinement fails
    while critical_gap(params, lo).is_some_and(|g| g <= 0.0) {
        lo = floor + 0.5 * (lo - floor);
        if lo - floor < 1e-9 * v_t {
            return Err(SweepError::NoConvergence {
                what: "critical velocity bracket",
                iterations: 0,
            });
        }
    }
    let mut hi = lo;
    let mut steps = 0;
    loop {
        let next = hi * 1.02;
        match critical_gap(params, next) {
            Some(g) if g < 0.0 => {
                hi = next;
                break;
            }
            _ => {
                lo = next;
                hi = next;
            }
        }
        steps += 1;
        if steps > 2000 {
            return Err(SweepError::NoConvergence {
                what: "critical velocity bracket",
                iterations: steps,
            });
        }
    }
    let lo_b = hi / 1.02;
    let gap = |v: f64| critical_gap(params, v).unwrap_or(f64::INFINITY);
    let mut v = bisect(gap, lo_b.max(lo), hi, 1e-15, 300).ok_or(SweepError::NoConvergence {
        what: "critical velocity",
        iterations: 300,
    })?;
    let mut angle = solve_phi_at_radius(r0, params, v)?.angle;

    for _ in 0..MAX_ROUNDS {
        let h = confinement_residual(r0, params, v, angle);
        let slope = residual_speed_slope(r0, params, v, angle);
        if slope == 0.0 {
            break;
        }
        let v_next = v - h / slope;
        if !(v_next > v_t) {
            break;
        }
        let angle_next = solve_phi_at_radius(r0, params, v_next)?.angle;
        let done = (v_next - v).abs() <= 1e-12 * v
            && (angle_next - angle).abs() <= 1e-12 * angle.max(1e-300);
        let better = confinement_residual(r0, params, v_next, angle_next).abs() <= h.abs();
        if better {
            v = v_next;
            angle = angle_next;
        }
        if done || !better {
            break;
        }
    }
    let h = confinement_residual(r0, params, v, angle);
    if h.abs() >= 1e-9 * (r0 - params.sensor_half_length) {
        return Err(SweepError::NoConvergence {
            what: "critical velocity",
            iterations: MAX_ROUNDS,
        });
    }
    Ok(CriticalSolution {
        velocity: v,
        overshoot_angle: angle,
    })
}

pub fn critical_velocity(params: &ScenarioParams) -> Result<f64> {
    Ok(solve_phi_and_critical_velocity(params)?.velocity)
}

fn check(params: &ScenarioParams, v_s: f64) -> Result<f64> {
    let v_c = critical_velocity(params)?;
    if !(v_s > v_c) {
        return Err(SweepError::SubcriticalVelocity { v_s, v_c });
    }
    Ok(v_c)
}

fn evolve(params: &ScenarioParams, v_s: f64, mode: RadiusMode) -> Result<Vec<SpiralSameIteration>> {
    let r = params.sensor_half_length;
    let v_t = params.evader_speed;
    let mut out: Vec<SpiralSameIteration> = Vec::new();
    let mut radius = params.region_radius;
    while radius > 2.0 * r {
        if out.len() >= MAX_CYCLES {
            return Err(SweepError::NoConvergence {
                what: "radius evolution",
                iterations: MAX_CYCLES,
            });
        }
        let main_time = main_sweep_time(radius, params, v_s)?;
        let sol = solve_phi_at_radius(radius, params, v_s)?;
        let spread = v_t * (main_time + sol.time);
        // center after the inward spiral, then to the next tangency position
        let end_center = radius - r + v_t * main_time - v_t * sol.time;
        let next_radius = match mode {
            RadiusMode::Verbatim => radius - spread,
            RadiusMode::Band => radius + spread - 2.0 * r,
            RadiusMode::Tracked => {
                tracked_radius(radius + spread - 2.0 * r, end_center, r, v_s, v_t)
            }
        };
        if !(next_radius < radius) {
            return Err(SweepError::SubcriticalVelocity { v_s, v_c: f64::NAN });
        }
        let advance_time = if next_radius > 2.0 * r {
            (end_center - (next_radius - r)).abs() / v_s
        } else {
            0.0
        };
        out.push(SpiralSameIteration {
            radius,
            main_time,
            overshoot_angle: sol.angle,
            overshoot_time: sol.time,
            wavefront_angle: sol.wavefront_angle,
            next_radius,
            advance_time,
        });
        radius = next_radius;
    }
    Ok(out)
}

/// Boundary radius once the sensor has moved from `end_center` to its
/// tangency position, given the band radius `band` at the end of the sweep.
fn tracked_radius(band: f64, end_center: f64, r: f64, v_s: f64, v_t: f64) -> f64 {
    let q = v_t / v_s;
    if end_center >= band - r {
        (band + q * (end_center + r)) / (1.0 + q)
    } else {
        (band - q * (end_center + r)) / (1.0 - q)
    }
}

/// Cycles until the region fits within `2r`.
pub fn radius_evolution(
    params: &ScenarioParams,
    v_s: f64,
    mode: RadiusMode,
) -> Result<Vec<SpiralSameIteration>> {
    check(params, v_s)?;
    evolve(params, v_s, mode)
}

/// Feasibility threshold on `R0/r` for the exponential end-game condition,
/// valid for sweeper speeds of at least `πR0V_T/r`.
pub fn linear_scan_ratio_threshold(swarm_size: u32) -> f64 {
    let n = f64::from(swarm_size);
    let ln2 = std::f64::consts::LN_2;
    (4.0 / (n * ln2).powi(2) + 1.0 / (PI * PI)).sqrt()
}

/// Smallest speed for which the linear scan keeps ahead of the spread, given
/// the radius at which the scan starts.
pub fn linear_scan_speed_bound(params: &ScenarioParams, start_radius: f64) -> f64 {
    let (r, v_t) = (params.sensor_half_length, params.evader_speed);
    let a = 2.0 * r - start_radius;
    let b = v_t * (4.0 * r + start_radius);
    let disc = (start_radius * start_radius + 16.0 * r * start_radius).sqrt();
    (b + v_t * disc) / (2.0 * a)
}

pub fn endgame(
    params: &ScenarioParams,
    v_s: f64,
    residual_radius: f64,
) -> Result<SpiralSameEndgame> {
    let (r, v_t) = (params.sensor_half_length, params.evader_speed);
    if residual_radius > 2.0 * r {
        return Err(SweepError::LinearScanInfeasible {
            reason: format!("region radius {residual_radius} exceeds twice the sensor half-length"),
        });
    }
    if !(v_s > v_t) {
        return Err(SweepError::SlowSweeper { v_s, v_t });
    }
    let e = sector_growth(params.n(), v_s, v_t);
    if !(e < 2.0) {
        return Err(SweepError::LinearScanInfeasible {
            reason: format!("sector growth factor {e} is not below 2"),
        });
    }
    let last_spiral_time = r * (e - 1.0) / v_t;
    let last_radius = last_spiral_time * v_t;
    let reposition_time = (2.0 * r - last_radius) / v_s;
    let start = reposition_time * v_t + last_radius;
    let outbound_time = start / (v_s - v_t);
    let return_time = 2.0 * v_s * start / ((v_s - v_t) * (v_s - v_t));
    let printed_bound = (2.0 * r * v_t + v_t * start) / (2.0 * r - start);
    if !(v_s >= printed_bound) || !((2.0 * r - start) / v_t > outbound_time + return_time) {
        return Err(SweepError::LinearScanInfeasible {
            reason: format!(
                "speed {v_s} below the linear-scan bound {}",
                linear_scan_speed_bound(params, start).max(printed_bound)
            ),
        });
    }
    Ok(SpiralSameEndgame {
        final_advance_time: residual_radius / v_s,
        last_spiral_time,
        last_radius,
        reposition_time,
        linear_start_radius: start,
        outbound_time,
        return_time,
        linear_time: outbound_time + return_time,
    })
}

pub fn total_time(params: &ScenarioParams, v_s: f64, mode: RadiusMode) -> Result<SpiralSameReport> {
    let v_c = check(params, v_s)?;
    let iterations = evolve(params, v_s, mode)?;
    let residual = iterations
        .last()
        .map_or(params.region_radius, |it| it.next_radius);
    let eg = endgame(params, v_s, residual)?;
    let spiral_time: f64 = iterations
        .iter()
        .map(|it| it.main_time + it.overshoot_time)
        .sum();
    let inward_time: f64 = iterations.iter().map(|it| it.advance_time).sum();
    let total_time = spiral_time
        + inward_time
        + eg.final_advance_time
        + eg.last_spiral_time
        + eg.reposition_time
        + eg.linear_time;
    Ok(SpiralSameReport {
        critical_velocity: v_c,
        mode,
        iterations,
        spiral_time,
        inward_time,
        endgame: eg,
        total_time,
    })
}

pub fn trajectory_plan(
    params: &ScenarioParams,
    v_s: f64,
    mode: RadiusMode,
) -> Result<TrajectoryPlan> {
    let report = total_time(params, v_s, mode)?;
    let (r, v_t) = (params.sensor_half_length, params.evader_speed);
    let tangential = (v_s * v_s - v_t * v_t).sqrt();
    let sector = 2.0 * PI / params.n();
    let turn: f64 = report
        .iterations
        .iter()
        .map(|it| sector + it.overshoot_angle)
        .sum::<f64>()
        + sector;
    let mut b = PlanBuilder::new(
        r,
        same_direction_starts(params.swarm_size, params.region_radius - r, turn),
    );
    for it in &report.iterations {
        b.spiral(it.main_time, v_t, tangential);
        b.spiral(it.overshoot_time, -v_t, tangential);
        if it.next_radius > 2.0 * r {
            b.radial_move(it.next_radius - r, it.advance_time);
        }
    }
    let eg = report.endgame;
    b.radial_move(r, eg.final_advance_time);
    b.spiral(eg.last_spiral_time, v_t, tangential);
    b.radial_move(r, eg.reposition_time);
    b.linear_leg(eg.outbound_time, [v_s, 0.0]);
    b.linear_leg(eg.return_time, [-v_s, 0.0]);
    Ok(b.finish())
}
