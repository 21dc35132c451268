//! Trajectory plans: timed phases of per-agent motions that the simulator replays.

use std::fmt;

/// Sensor pose: segment center and the direction the segment points along.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub center: [f64; 2],
    pub heading: f64,
}

impl Pose {
    /// Segment endpoints for a sensor of half-length `half`.
    pub fn endpoints(&self, half: f64) -> ([f64; 2], [f64; 2]) {
        let (s, c) = self.heading.sin_cos();
        let [x, y] = self.center;
        ([x - half * c, y - half * s], [x + half * c, y + half * s])
    }

    /// Pose with a radially pointing sensor centered at polar (radius, angle).
    pub fn radial(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Pose {
            center: [radius * c, radius * s],
            heading: angle,
        }
    }
}

/// One agent's motion during a phase. All polar motions keep the sensor radial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Motion {
    Arc {
        radius: f64,
        start_angle: f64,
        angular_rate: f64,
    },
    /// Center radius changes linearly at `radial_rate`; the angle follows the
    /// log-spiral law with the given signed tangential speed.
    Spiral {
        start_radius: f64,
        start_angle: f64,
        radial_rate: f64,
        tangential_speed: f64,
    },
    Line {
        from: [f64; 2],
        velocity: [f64; 2],
        heading: f64,
    },
    Hold(Pose),
}

impl Motion {
    pub fn pose_at(&self, t: f64) -> Pose {
        match *self {
            Motion::Arc {
                radius,
                start_angle,
                angular_rate,
            } => Pose::radial(radius, start_angle + angular_rate * t),
            Motion::Spiral {
                start_radius,
                start_angle,
                radial_rate,
                tangential_speed,
            } => {
                let (rho, angle) =
                    spiral_state(start_radius, start_angle, radial_rate, tangential_speed, t);
                Pose::radial(rho, angle)
            }
            Motion::Line {
                from,
                velocity,
                heading,
            } => Pose {
                center: [from[0] + velocity[0] * t, from[1] + velocity[1] * t],
                heading,
            },
            Motion::Hold(pose) => pose,
        }
    }

    /// Upper bound on the speed of either sensor endpoint over `duration`.
    pub fn endpoint_speed_bound(&self, half: f64, duration: f64) -> f64 {
        match *self {
            Motion::Arc {
                radius,
                angular_rate,
                ..
            } => angular_rate.abs() * (radius + half),
            Motion::Spiral {
                start_radius,
                radial_rate,
                tangential_speed,
                ..
            } => {
                let end = start_radius + radial_rate * duration;
                let rho_min = start_radius.min(end).max(1e-12);
                radial_rate.hypot(tangential_speed) + tangential_speed.abs() * half / rho_min
            }
            Motion::Line { velocity, .. } => velocity[0].hypot(velocity[1]),
            Motion::Hold(_) => 0.0,
        }
    }
}

fn spiral_state(
    start_radius: f64,
    start_angle: f64,
    radial_rate: f64,
    tangential_speed: f64,
    t: f64,
) -> (f64, f64) {
    let rho = start_radius + radial_rate * t;
    if radial_rate == 0.0 {
        return (rho, start_angle + tangential_speed * t / start_radius);
    }
    (
        rho,
        start_angle + tangential_speed / radial_rate * (rho / start_radius).ln(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseKind {
    Arc,
    SpiralOut,
    SpiralIn,
    InwardAdvance,
    DirectionSwitch,
    LinearLeg,
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PhaseKind::Arc => "arc",
            PhaseKind::SpiralOut => "spiral-out",
            PhaseKind::SpiralIn => "spiral-in",
            PhaseKind::InwardAdvance => "inward-advance",
            PhaseKind::DirectionSwitch => "direction-switch",
            PhaseKind::LinearLeg => "linear-leg",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phase {
    pub kind: PhaseKind,
    pub duration: f64,
    pub motions: Vec<Motion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPlan {
    pub sensor_half_length: f64,
    pub phases: Vec<Phase>,
}

impl TrajectoryPlan {
    pub fn agent_count(&self) -> usize {
        self.phases.first().map_or(0, |p| p.motions.len())
    }

    pub fn total_duration(&self) -> f64 {
        self.phases.iter().map(|p| p.duration).sum()
    }

    /// Poses of all agents at absolute time `t`, clamped to the plan span.
    pub fn poses_at(&self, t: f64) -> Vec<Pose> {
        let mut start = 0.0;
        for (idx, phase) in self.phases.iter().enumerate() {
            let last = idx + 1 == self.phases.len();
            if t < start + phase.duration || last {
                let local = (t - start).clamp(0.0, phase.duration);
                return phase.motions.iter().map(|m| m.pose_at(local)).collect();
            }
            start += phase.duration;
        }
        Vec::new()
    }

    /// Largest endpoint speed over all phases.
    pub fn max_endpoint_speed(&self) -> f64 {
        self.phases
            .iter()
            .filter(|p| p.duration > 0.0)
            .flat_map(|p| {
                p.motions
                    .iter()
                    .map(move |m| m.endpoint_speed_bound(self.sensor_half_length, p.duration))
            })
            .fold(0.0, f64::max)
    }

    /// Start and end time of each phase.
    pub fn phase_spans(&self) -> Vec<(f64, f64)> {
        let mut t = 0.0;
        self.phases
            .iter()
            .map(|p| {
                let span = (t, t + p.duration);
                t += p.duration;
                span
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct AgentState {
    radius: f64,
    angle: f64,
    /// +1 counter-clockwise, -1 clockwise.
    turn: f64,
    cartesian: Option<Pose>,
}

/// Incremental plan construction that keeps poses continuous between phases.
#[derive(Debug, Clone)]
pub struct PlanBuilder {
    half: f64,
    agents: Vec<AgentState>,
    phases: Vec<Phase>,
}

impl PlanBuilder {
    /// Agents start with radial sensors at the given (center radius, angle, turn).
    pub fn new(half: f64, starts: impl IntoIterator<Item = (f64, f64, f64)>) -> Self {
        let agents = starts
            .into_iter()
            .map(|(radius, angle, turn)| AgentState {
                radius,
                angle,
                turn,
                cartesian: None,
            })
            .collect();
        Self {
            half,
            agents,
            phases: Vec::new(),
        }
    }

    fn push(&mut self, kind: PhaseKind, duration: f64, motions: Vec<Motion>) {
        self.phases.push(Phase {
            kind,
            duration: duration.max(0.0),
            motions,
        });
    }

    fn polar(agent: &AgentState) -> (f64, f64) {
        debug_assert!(agent.cartesian.is_none(), "polar motion after a linear leg");
        (agent.radius, agent.angle)
    }

    /// Every agent sweeps `angle` along its current turn direction with center speed `speed`.
    pub fn arc(&mut self, angle: f64, speed: f64) {
        let radius = self.agents[0].radius;
        let duration = angle * radius / speed;
        let motions = self
            .agents
            .iter_mut()
            .map(|a| {
                let (rho, theta) = Self::polar(a);
                let rate = a.turn * speed / rho;
                a.angle = theta + rate * duration;
                Motion::Arc {
                    radius: rho,
                    start_angle: theta,
                    angular_rate: rate,
                }
            })
            .collect();
        self.push(PhaseKind::Arc, duration, motions);
    }

    /// Spiral for `duration` with signed radial rate; the angle advances along each agent's turn.
    pub fn spiral(&mut self, duration: f64, radial_rate: f64, tangential_speed: f64) {
        let kind = if radial_rate >= 0.0 {
            PhaseKind::SpiralOut
        } else {
            PhaseKind::SpiralIn
        };
        let motions = self
            .agents
            .iter_mut()
            .map(|a| {
                let (rho, theta) = Self::polar(a);
                let tangential = a.turn * tangential_speed;
                let (end_rho, end_angle) =
                    spiral_state(rho, theta, radial_rate, tangential, duration);
                a.radius = end_rho;
                a.angle = end_angle;
                Motion::Spiral {
                    start_radius: rho,
                    start_angle: theta,
                    radial_rate,
                    tangential_speed: tangential,
                }
            })
            .collect();
        self.push(kind, duration, motions);
    }

    /// Straight radial move of every sensor center to `radius`.
    pub fn radial_move(&mut self, radius: f64, duration: f64) {
        let motions = self
            .agents
            .iter_mut()
            .map(|a| {
                let (rho, theta) = Self::polar(a);
                let from = Pose::radial(rho, theta);
                a.radius = radius;
                let (s, c) = theta.sin_cos();
                let v = if duration > 0.0 {
                    (radius - rho) / duration
                } else {
                    0.0
                };
                if duration > 0.0 {
                    Motion::Line {
                        from: from.center,
                        velocity: [v * c, v * s],
                        heading: theta,
                    }
                } else {
                    Motion::Hold(Pose::radial(radius, theta))
                }
            })
            .collect();
        self.push(PhaseKind::InwardAdvance, duration, motions);
    }

    /// Zero-duration reversal of every agent's turn direction.
    pub fn switch_direction(&mut self) {
        let motions = self
            .agents
            .iter_mut()
            .map(|a| {
                a.turn = -a.turn;
                Motion::Hold(
                    a.cartesian
                        .unwrap_or_else(|| Pose::radial(a.radius, a.angle)),
                )
            })
            .collect();
        self.push(PhaseKind::DirectionSwitch, 0.0, motions);
    }

    /// Common translation of every sensor.
    pub fn linear_leg(&mut self, duration: f64, velocity: [f64; 2]) {
        let motions = self
            .agents
            .iter_mut()
            .map(|a| {
                let pose = a
                    .cartesian
                    .unwrap_or_else(|| Pose::radial(a.radius, a.angle));
                let end = Pose {
                    center: [
                        pose.center[0] + velocity[0] * duration,
                        pose.center[1] + velocity[1] * duration,
                    ],
                    heading: pose.heading,
                };
                a.cartesian = Some(end);
                Motion::Line {
                    from: pose.center,
                    velocity,
                    heading: pose.heading,
                }
            })
            .collect();
        self.push(PhaseKind::LinearLeg, duration, motions);
    }

    pub fn current_radius(&self) -> f64 {
        self.agents[0].radius
    }

    pub fn current_angles(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.angle).collect()
    }

    pub fn finish(self) -> TrajectoryPlan {
        TrajectoryPlan {
            sensor_half_length: self.half,
            phases: self.phases,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Pose, b: Pose) -> bool {
        (a.center[0] - b.center[0]).abs() < 1e-9
            && (a.center[1] - b.center[1]).abs() < 1e-9
            && ((a.heading - b.heading).sin()).abs() < 1e-9
    }

    #[test]
    fn builder_poses_are_continuous() {
        let mut b = PlanBuilder::new(10.0, [(90.0, 0.0, 1.0), (90.0, 0.0, -1.0)]);
        b.arc(PI, 20.0);
        b.radial_move(80.0, 0.5);
        b.switch_direction();
        b.spiral(3.0, 1.0, 19.0);
        b.spiral(1.0, -1.0, 19.0);
        b.linear_leg(1.0, [20.0, 0.0]);
        let plan = b.finish();
        for (i, pair) in plan.phases.windows(2).enumerate() {
            for (m0, m1) in pair[0].motions.iter().zip(&pair[1].motions) {
                assert!(
                    close(m0.pose_at(pair[0].duration), m1.pose_at(0.0)),
                    "discontinuity after phase {i}"
                );
            }
        }
    }

    #[test]
    fn arc_keeps_center_speed() {
        let mut b = PlanBuilder::new(10.0, [(50.0, 0.3, 1.0)]);
        b.arc(1.0, 7.0);
        let plan = b.finish();
        assert!((plan.total_duration() - 50.0 / 7.0).abs() < 1e-12);
        let m = plan.phases[0].motions[0];
        let (a, c) = (m.pose_at(1.0), m.pose_at(1.0 + 1e-6));
        let v = (c.center[0] - a.center[0]).hypot(c.center[1] - a.center[1]) / 1e-6;
        assert!((v - 7.0).abs() < 1e-4);
    }

    #[test]
    fn spiral_speed_is_total_speed() {
        let m = Motion::Spiral {
            start_radius: 40.0,
            start_angle: 0.0,
            radial_rate: 1.0,
            tangential_speed: 3.0,
        };
        let (a, c) = (m.pose_at(2.0), m.pose_at(2.0 + 1e-6));
        let v = (c.center[0] - a.center[0]).hypot(c.center[1] - a.center[1]) / 1e-6;
        assert!((v - 10f64.sqrt()).abs() < 1e-4);
    }
}
