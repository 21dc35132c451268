//! Grid simulator that replays a trajectory plan against worst-case evader
//! spread.
//!
//! Occupancy spreads cell to cell at the evader speed. Each contaminated cell
//! remembers the point and time its contamination originated from, and a
//! clean neighbour is reached at `origin_time + distance / V_T`, which keeps
//! the wavefront round rather than grid-shaped. Sensors clear every cell whose
//! center lies within half a cell of the area swept between two poses.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use crate::circular_pincer::pincer_starts;
use crate::error::{Result, SweepError};
use crate::model::{sector_growth, ScenarioParams, Strategy};
use crate::plan::{PlanBuilder, Pose, TrajectoryPlan};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Cleaned(f64),
    Escape(f64),
    Timeout(f64),
}

impl Outcome {
    pub fn time(&self) -> f64 {
        match *self {
            Outcome::Cleaned(t) | Outcome::Escape(t) | Outcome::Timeout(t) => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Seed {
    x: f64,
    y: f64,
    t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Event {
    time: f64,
    target: u32,
    source: u32,
    version: u32,
    seed: Seed,
}

impl Eq for Event {}

impl Ord for Event {
    // reversed so the max-heap pops the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.target.cmp(&self.target))
            .then_with(|| other.source.cmp(&self.source))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NEIGHBOURS: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

#[derive(Debug, Clone)]
pub struct SimWorld {
    pub cell: f64,
    pub dt: f64,
    pub clock: f64,
    pub agents: Vec<Pose>,
    half_length: f64,
    evader_speed: f64,
    escape_radius: f64,
    extent: f64,
    dim: usize,
    occupied: Vec<bool>,
    seeds: Vec<Seed>,
    versions: Vec<u32>,
    stamp: Vec<u32>,
    stamp_id: u32,
    events: BinaryHeap<Event>,
    count: usize,
    escaped: bool,
}

impl SimWorld {
    /// Disk of `region_radius` fully occupied, no agents yet.
    pub fn new(
        region_radius: f64,
        sensor_half_length: f64,
        evader_speed: f64,
        cell: f64,
        dt: f64,
    ) -> Result<Self> {
        if !(cell > 0.0) || !(dt > 0.0) {
            return Err(SweepError::ResolutionTooCoarse {
                reason: "cell size and time step must be positive".into(),
            });
        }
        if cell > sensor_half_length {
            return Err(SweepError::ResolutionTooCoarse {
                reason: format!(
                    "cell {cell} is larger than the sensor half-length {sensor_half_length}"
                ),
            });
        }
        if evader_speed * dt > cell {
            return Err(SweepError::ResolutionTooCoarse {
                reason: format!(
                    "spread per step {} exceeds the cell size {cell}",
                    evader_speed * dt
                ),
            });
        }
        let escape_radius = region_radius + 2.0 * sensor_half_length + 2.0 * cell;
        // odd dimension so one cell is centered on the origin
        let half_cells = ((escape_radius + 3.0 * cell) / cell).ceil() as usize;
        let dim = 2 * half_cells + 1;
        let extent = (half_cells as f64 + 0.5) * cell;
        let total = dim * dim;
        let mut world = SimWorld {
            cell,
            dt,
            clock: 0.0,
            agents: Vec::new(),
            half_length: sensor_half_length,
            evader_speed,
            escape_radius,
            extent,
            dim,
            occupied: vec![false; total],
            seeds: vec![
                Seed {
                    x: 0.0,
                    y: 0.0,
                    t: 0.0
                };
                total
            ],
            versions: vec![0; total],
            stamp: vec![0; total],
            stamp_id: 0,
            events: BinaryHeap::new(),
            count: 0,
            escaped: false,
        };
        for idx in 0..total {
            let (x, y) = world.center(idx);
            if region_radius > 0.0 && x.hypot(y) <= region_radius {
                world.occupied[idx] = true;
                world.seeds[idx] = Seed { x, y, t: 0.0 };
                world.count += 1;
            }
        }
        for idx in 0..total {
            if world.occupied[idx] {
                world.schedule_from(idx, 0.0);
            }
        }
        Ok(world)
    }

    pub fn occupied_count(&self) -> usize {
        self.count
    }

    pub fn occupied_area(&self) -> f64 {
        self.count as f64 * self.cell * self.cell
    }

    pub fn is_occupied_at(&self, x: f64, y: f64) -> bool {
        self.index_of(x, y).is_some_and(|i| self.occupied[i])
    }

    pub fn escaped(&self) -> bool {
        self.escaped
    }

    /// Occupied cells as center coordinates.
    pub fn occupied_cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.occupied.len())
            .filter(|&i| self.occupied[i])
            .map(|i| self.center(i))
    }

    fn center(&self, idx: usize) -> (f64, f64) {
        let (i, j) = (idx % self.dim, idx / self.dim);
        (
            -self.extent + (i as f64 + 0.5) * self.cell,
            -self.extent + (j as f64 + 0.5) * self.cell,
        )
    }

    fn index_of(&self, x: f64, y: f64) -> Option<usize> {
        let i = ((x + self.extent) / self.cell).floor();
        let j = ((y + self.extent) / self.cell).floor();
        if i < 0.0 || j < 0.0 || i >= self.dim as f64 || j >= self.dim as f64 {
            return None;
        }
        Some(j as usize * self.dim + i as usize)
    }

    fn neighbours(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = ((idx % self.dim) as i64, (idx / self.dim) as i64);
        let dim = self.dim as i64;
        NEIGHBOURS.iter().filter_map(move |&(di, dj)| {
            let (a, b) = (i + di, j + dj);
            (a >= 0 && b >= 0 && a < dim && b < dim).then_some((b * dim + a) as usize)
        })
    }

    /// Queues arrivals at the free neighbours of a cell reached at `reached`.
    /// A neighbour the inherited origin would have reached earlier lies
    /// behind a cleared gap, so it is timed from this cell instead.
    fn schedule_from(&mut self, idx: usize, reached: f64) {
        if self.evader_speed <= 0.0 {
            return;
        }
        let inherited = self.seeds[idx];
        let (cx, cy) = self.center(idx);
        let local = Seed {
            x: cx,
            y: cy,
            t: reached,
        };
        let version = self.versions[idx];
        let targets: Vec<usize> = self
            .neighbours(idx)
            .filter(|&n| !self.occupied[n])
            .collect();
        for n in targets {
            let (x, y) = self.center(n);
            let arrival = |s: Seed| s.t + (x - s.x).hypot(y - s.y) / self.evader_speed;
            let far = arrival(inherited);
            let (time, seed) = if far >= reached {
                (far, inherited)
            } else {
                (arrival(local), local)
            };
            self.events.push(Event {
                time,
                target: n as u32,
                source: idx as u32,
                version,
                seed,
            });
        }
    }

    fn spread_until(&mut self, until: f64) {
        while let Some(ev) = self.events.peek().copied() {
            if ev.time > until {
                break;
            }
            self.events.pop();
            let (src, tgt) = (ev.source as usize, ev.target as usize);
            if !self.occupied[src] || self.versions[src] != ev.version || self.occupied[tgt] {
                continue;
            }
            self.occupied[tgt] = true;
            self.seeds[tgt] = ev.seed;
            self.versions[tgt] = self.versions[tgt].wrapping_add(1);
            self.count += 1;
            let (x, y) = self.center(tgt);
            if x.hypot(y) > self.escape_radius {
                self.escaped = true;
            }
            self.schedule_from(tgt, ev.time);
        }
    }

    /// Clears the cells swept while each agent moves from its current pose to
    /// the matching pose in `next`, and restarts spread along the cut.
    fn erase(&mut self, next: &[Pose]) {
        self.stamp_id = self.stamp_id.wrapping_add(1);
        if self.stamp_id == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.stamp_id = 1;
        }
        let mut cut: Vec<usize> = Vec::new();
        let prev = if self.agents.len() == next.len() {
            self.agents.clone()
        } else {
            next.to_vec()
        };
        let pad = 0.5 * self.cell;
        for (p0, p1) in prev.iter().zip(next) {
            let (a0, b0) = p0.endpoints(self.half_length);
            let (a1, b1) = p1.endpoints(self.half_length);
            let pts = [a0, b0, b1, a1];
            let xmin = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min) - pad;
            let xmax = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max) + pad;
            let ymin = pts.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min) - pad;
            let ymax = pts.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max) + pad;
            let lower = |v: f64| ((v + self.extent) / self.cell - 0.5).ceil().max(0.0) as usize;
            let upper =
                |v: f64| (((v + self.extent) / self.cell - 0.5).floor() + 1.0).max(0.0) as usize;
            let (i0, i1) = (lower(xmin), upper(xmax).min(self.dim));
            let (j0, j1) = (lower(ymin), upper(ymax).min(self.dim));
            for j in j0..j1 {
                for i in i0..i1 {
                    let idx = j * self.dim + i;
                    if self.stamp[idx] == self.stamp_id {
                        continue;
                    }
                    let (x, y) = self.center(idx);
                    let q = [x, y];
                    if triangle_distance(q, a0, b0, b1) <= pad
                        || triangle_distance(q, a0, b1, a1) <= pad
                    {
                        self.stamp[idx] = self.stamp_id;
                        if self.occupied[idx] {
                            self.occupied[idx] = false;
                            self.versions[idx] = self.versions[idx].wrapping_add(1);
                            self.count -= 1;
                        }
                        cut.push(idx);
                    }
                }
            }
        }
        // contaminated cells bordering the cleared area restart from their own center
        let restart = self.clock - 0.5 * self.cell / self.evader_speed.max(f64::MIN_POSITIVE);
        let mut fronts: Vec<usize> = Vec::new();
        for &idx in &cut {
            let around: Vec<usize> = self.neighbours(idx).collect();
            for n in around {
                if self.occupied[n] && self.stamp[n] != self.stamp_id {
                    self.stamp[n] = self.stamp_id;
                    fronts.push(n);
                }
            }
        }
        for n in fronts {
            let (x, y) = self.center(n);
            self.seeds[n] = Seed { x, y, t: restart };
            self.versions[n] = self.versions[n].wrapping_add(1);
            self.schedule_from(n, self.clock);
        }
        self.agents = next.to_vec();
    }

    /// Places agents and clears their footprints without advancing time.
    pub fn place_agents(&mut self, poses: &[Pose]) {
        self.agents = poses.to_vec();
        self.erase(poses);
    }

    /// One time step: spread for `dt`, then sweep every agent to `next`.
    pub fn step(&mut self, next: &[Pose]) {
        self.step_by(next, self.dt);
    }

    fn step_by(&mut self, next: &[Pose], dt: f64) {
        let until = self.clock + dt;
        self.spread_until(until);
        self.clock = until;
        self.erase(next);
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

fn triangle_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let (d1, d2, d3) = (cross(a, b, p), cross(b, c, p), cross(c, a, p));
    let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    let area = cross(a, b, c).abs();
    if area > 0.0 && !(has_neg && has_pos) {
        return 0.0;
    }
    segment_distance(p, a, b)
        .min(segment_distance(p, b, c))
        .min(segment_distance(p, c, a))
}

/// World for a scenario at the given resolution.
pub fn init_world(params: &ScenarioParams, cell: f64, dt: f64) -> Result<SimWorld> {
    SimWorld::new(
        params.region_radius,
        params.sensor_half_length,
        params.evader_speed,
        cell,
        dt,
    )
}

/// Largest time step that honours both resolution limits for this plan.
pub fn stable_time_step(plan: &TrajectoryPlan, evader_speed: f64, cell: f64) -> f64 {
    cell / plan
        .max_endpoint_speed()
        .max(evader_speed)
        .max(f64::MIN_POSITIVE)
}

/// Fails if the plan moves a sensor endpoint more than one cell per step.
pub fn check_plan_resolution(world: &SimWorld, plan: &TrajectoryPlan) -> Result<()> {
    let speed = plan.max_endpoint_speed();
    if speed * world.dt > world.cell * (1.0 + 1e-9) {
        return Err(SweepError::ResolutionTooCoarse {
            reason: format!(
                "sensor moves {} per step, more than the cell size {}",
                speed * world.dt,
                world.cell
            ),
        });
    }
    Ok(())
}

#[derive(Default)]
pub struct RunOptions<'a> {
    pub wall_budget: Option<Duration>,
    /// Receives one CSV row per `trace_every` steps.
    pub trace: Option<&'a mut dyn Write>,
    pub trace_every: usize,
}

/// Replays `plan` on `world` until the region is clean, an evader escapes, or
/// the plan ends with cells still occupied.
pub fn run(plan: &TrajectoryPlan, world: &mut SimWorld) -> Outcome {
    run_with(plan, world, RunOptions::default()).unwrap_or(Outcome::Timeout(world.clock))
}

pub fn run_with(
    plan: &TrajectoryPlan,
    world: &mut SimWorld,
    options: RunOptions<'_>,
) -> std::io::Result<Outcome> {
    let started = Instant::now();
    let mut trace = options.trace.map(csv::Writer::from_writer);
    let every = options.trace_every.max(1);
    let agents = plan.agent_count();
    if let Some(w) = trace.as_mut() {
        let mut header = vec!["t".to_string(), "area".to_string()];
        for i in 0..agents {
            header.extend([
                format!("agent_{i}_x"),
                format!("agent_{i}_y"),
                format!("agent_{i}_angle"),
            ]);
        }
        w.write_record(&header)?;
    }
    let write_row =
        |w: &mut csv::Writer<&mut dyn Write>, world: &SimWorld| -> std::io::Result<()> {
            let mut row = vec![
                crate::study::format_number(world.clock),
                crate::study::format_number(world.occupied_area()),
            ];
            for p in &world.agents {
                row.extend([
                    crate::study::format_number(p.center[0]),
                    crate::study::format_number(p.center[1]),
                    crate::study::format_number(p.heading),
                ]);
            }
            w.write_record(&row)?;
            Ok(())
        };

    world.place_agents(&plan.poses_at(0.0));
    if let Some(w) = trace.as_mut() {
        write_row(w, world)?;
    }
    let end = plan.total_duration();
    let mut steps = 0usize;
    let outcome = loop {
        if world.escaped() {
            break Outcome::Escape(world.clock);
        }
        if world.occupied_count() == 0 {
            break Outcome::Cleaned(world.clock);
        }
        if world.clock >= end - 1e-12 {
            break Outcome::Escape(world.clock);
        }
        if options.wall_budget.is_some_and(|b| started.elapsed() > b) {
            break Outcome::Timeout(world.clock);
        }
        let dt = world.dt.min(end - world.clock);
        let next = plan.poses_at(world.clock + dt);
        world.step_by(&next, dt);
        steps += 1;
        if let Some(w) = trace.as_mut() {
            if steps.is_multiple_of(every) {
                write_row(w, world)?;
            }
        }
    };
    if let Some(w) = trace.as_mut() {
        if !steps.is_multiple_of(every) {
            write_row(w, world)?;
        }
        w.flush()?;
    }
    Ok(outcome)
}

/// Builds a world, picks a stable step if none is given, and runs the plan.
pub fn simulate(
    params: &ScenarioParams,
    plan: &TrajectoryPlan,
    cell: f64,
    dt: Option<f64>,
) -> Result<Outcome> {
    let dt = dt.unwrap_or_else(|| stable_time_step(plan, params.evader_speed, cell));
    let mut world = init_world(params, cell, dt)?;
    check_plan_resolution(&world, plan)?;
    Ok(run(plan, &mut world))
}

/// The opening cycle of a strategy repeated without ever stepping inward.
/// Usable at any speed, including below the critical velocity.
pub fn confinement_probe_plan(
    strategy: Strategy,
    params: &ScenarioParams,
    v_s: f64,
    cycles: usize,
) -> TrajectoryPlan {
    let (r0, r, v_t) = (
        params.region_radius,
        params.sensor_half_length,
        params.evader_speed,
    );
    let n = params.n();
    let sector = 2.0 * PI / n;
    let spiral = strategy.is_spiral() && v_s > v_t;
    let start_radius = if spiral { r0 - r } else { r0 };
    let starts = if strategy.is_pincer() {
        pincer_starts(params.swarm_size, start_radius)
    } else {
        (0..params.swarm_size)
            .map(|k| (start_radius, sector * f64::from(k), 1.0))
            .collect()
    };
    let mut b = PlanBuilder::new(r, starts);
    for _ in 0..cycles {
        if spiral {
            let e = sector_growth(n, v_s, v_t);
            let tangential = (v_s * v_s - v_t * v_t).sqrt();
            b.spiral((r0 - r) * (e - 1.0) / v_t, v_t, tangential);
            b.radial_move(r0 - r, (r0 - r) * (e - 1.0) / v_s);
        } else {
            b.arc(sector, v_s);
        }
        if strategy.is_pincer() {
            b.switch_direction();
        }
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_area() {
        let w = SimWorld::new(100.0, 10.0, 1.0, 0.5, 0.1).unwrap();
        let area = w.occupied_area();
        assert!((area - PI * 1e4).abs() / (PI * 1e4) < 0.02);
    }

    #[test]
    fn empty_region_is_clean() {
        let plan = PlanBuilder::new(1.0, [(0.0, 0.0, 1.0)]).finish();
        let mut w = SimWorld::new(0.0, 1.0, 1.0, 0.1, 0.05).unwrap();
        assert_eq!(run(&plan, &mut w), Outcome::Cleaned(0.0));
    }

    #[test]
    fn rejects_coarse_settings() {
        assert!(SimWorld::new(10.0, 1.0, 1.0, 2.0, 0.1).is_err());
        assert!(SimWorld::new(10.0, 1.0, 1.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn no_agents_never_shrinks() {
        let mut w = SimWorld::new(5.0, 1.0, 1.0, 0.1, 0.05).unwrap();
        let mut last = w.occupied_count();
        for _ in 0..20 {
            w.step(&[]);
            assert!(w.occupied_count() >= last);
            last = w.occupied_count();
        }
        assert!(last > (PI * 25.0 / 0.01) as usize);
    }

    #[test]
    fn frozen_evaders_only_erased_locally() {
        let mut w = SimWorld::new(5.0, 1.0, 0.0, 0.1, 0.05).unwrap();
        let before = w.occupied_count();
        let pose = Pose {
            center: [0.0, 0.0],
            heading: 0.0,
        };
        w.place_agents(&[pose]);
        w.step(&[pose]);
        let cleared = before - w.occupied_count();
        // a 2-long segment with half-cell padding covers about 21 x 1 cells
        assert!((15..=70).contains(&cleared), "{cleared}");
        assert!(!w.is_occupied_at(0.5, 0.0));
        assert!(w.is_occupied_at(0.0, 0.5));
        for _ in 0..5 {
            w.step(&[pose]);
        }
        assert_eq!(before - w.occupied_count(), cleared);
    }

    #[test]
    fn spread_is_round() {
        let mut w = SimWorld::new(1.0, 1.0, 1.0, 0.05, 0.05).unwrap();
        for _ in 0..40 {
            w.step(&[]);
        }
        // radius should now be about 1 + 2 = 3
        let area = w.occupied_area();
        let expected = PI * 9.0;
        assert!(
            (area - expected).abs() / expected < 0.05,
            "{area} vs {expected}"
        );
    }

    #[test]
    fn deterministic() {
        let p = ScenarioParams::new(10.0, 2.0, 1.0, 2, 0.0);
        let plan = confinement_probe_plan(Strategy::CircularPincer, &p, 20.0, 2);
        let a = simulate(&p, &plan, 0.1, None).unwrap();
        let b = simulate(&p, &plan, 0.1, None).unwrap();
        assert_eq!(a, b);
    }
}
