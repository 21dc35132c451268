//! Scenario parameters, spiral geometry and the strategy-independent speed bound.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Result, SweepError};

/// Geometry and speeds that define one search scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    /// Initial radius of the region that may hold evaders.
    pub region_radius: f64,
    /// Half the sensor length.
    pub sensor_half_length: f64,
    pub evader_speed: f64,
    pub swarm_size: u32,
    /// Speed added on top of a strategy's critical velocity.
    pub speed_margin: f64,
}

impl ScenarioParams {
    pub fn new(
        region_radius: f64,
        sensor_half_length: f64,
        evader_speed: f64,
        swarm_size: u32,
        speed_margin: f64,
    ) -> Self {
        Self {
            region_radius,
            sensor_half_length,
            evader_speed,
            swarm_size,
            speed_margin,
        }
    }

    /// The reference scenario: radius 100, half-length 10, unit evader speed.
    pub fn reference(swarm_size: u32) -> Self {
        Self::new(100.0, 10.0, 1.0, swarm_size, 0.0)
    }

    pub fn with_swarm_size(self, swarm_size: u32) -> Self {
        Self { swarm_size, ..self }
    }

    pub fn with_margin(self, speed_margin: f64) -> Self {
        Self {
            speed_margin,
            ..self
        }
    }

    pub(crate) fn n(&self) -> f64 {
        f64::from(self.swarm_size)
    }
}

/// The four sweep strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    CircularPincer,
    SpiralPincer,
    CircularSame,
    SpiralSame,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::CircularPincer,
        Strategy::SpiralPincer,
        Strategy::CircularSame,
        Strategy::SpiralSame,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::CircularPincer => "circular-pincer",
            Strategy::SpiralPincer => "spiral-pincer",
            Strategy::CircularSame => "circular-same",
            Strategy::SpiralSame => "spiral-same",
        }
    }

    pub fn is_pincer(self) -> bool {
        matches!(self, Strategy::CircularPincer | Strategy::SpiralPincer)
    }

    pub fn is_spiral(self) -> bool {
        matches!(self, Strategy::SpiralPincer | Strategy::SpiralSame)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

/// Returns the parameters unchanged if they describe a scenario the analytics can handle.
pub fn validate_scenario(params: ScenarioParams) -> Result<ScenarioParams> {
    for (name, value) in [
        ("region_radius", params.region_radius),
        ("sensor_half_length", params.sensor_half_length),
        ("evader_speed", params.evader_speed),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(SweepError::NonPositiveParameter { name, value });
        }
    }
    if !(params.speed_margin >= 0.0) || !params.speed_margin.is_finite() {
        return Err(SweepError::NonPositiveParameter {
            name: "speed_margin",
            value: params.speed_margin,
        });
    }
    if params.swarm_size < 2 || !params.swarm_size.is_multiple_of(2) {
        return Err(SweepError::OddSwarm {
            n: params.swarm_size,
        });
    }
    if params.region_radius <= params.sensor_half_length {
        return Err(SweepError::RegionSmallerThanSensor {
            r0: params.region_radius,
            r: params.sensor_half_length,
        });
    }
    Ok(params)
}

/// No sweep process with this swarm can confine the region below this speed.
pub fn lower_bound_velocity(params: &ScenarioParams) -> f64 {
    PI * params.region_radius * params.evader_speed / (params.n() * params.sensor_half_length)
}

/// Heading offset from the region normal that keeps a spiraling sensor tangent
/// to a boundary growing at the evader speed.
pub fn spiral_tilt_angle(sweeper_speed: f64, evader_speed: f64) -> Result<f64> {
    if !(sweeper_speed > evader_speed) {
        return Err(SweepError::SlowSweeper {
            v_s: sweeper_speed,
            v_t: evader_speed,
        });
    }
    Ok((evader_speed / sweeper_speed).asin())
}

/// Motion of a sensor center that follows a boundary growing at the evader speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralGeometry {
    pub tilt: f64,
    pub radial_rate: f64,
    pub tangential_speed: f64,
}

impl SpiralGeometry {
    pub fn new(sweeper_speed: f64, evader_speed: f64) -> Result<Self> {
        let tilt = spiral_tilt_angle(sweeper_speed, evader_speed)?;
        Ok(Self {
            tilt,
            radial_rate: evader_speed,
            tangential_speed: (sweeper_speed * sweeper_speed - evader_speed * evader_speed).sqrt(),
        })
    }

    /// Angular rate at the given center radius.
    pub fn angular_rate(&self, radius: f64) -> f64 {
        self.tangential_speed / radius
    }

    /// Growth exponent per radian of swept angle.
    pub fn log_rate(&self) -> f64 {
        self.radial_rate / self.tangential_speed
    }
}

/// Result of following the outward spiral through some angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralAdvance {
    /// Center radius reached.
    pub radius: f64,
    pub elapsed: f64,
}

/// Follows the outward spiral that starts with its outer tip at `start_radius`.
pub fn spiral_radius_after_angle(
    start_radius: f64,
    sensor_half_length: f64,
    angle: f64,
    sweeper_speed: f64,
    evader_speed: f64,
) -> Result<SpiralAdvance> {
    let geom = SpiralGeometry::new(sweeper_speed, evader_speed)?;
    let center0 = start_radius - sensor_half_length;
    let radius = center0 * (angle * geom.log_rate()).exp();
    Ok(SpiralAdvance {
        radius,
        elapsed: (radius - center0) / evader_speed,
    })
}

/// Growth factor of the spiral center radius over one sector of `2π/n`.
pub fn sector_growth(swarm_size: f64, sweeper_speed: f64, evader_speed: f64) -> f64 {
    let tangential = (sweeper_speed * sweeper_speed - evader_speed * evader_speed).sqrt();
    (2.0 * PI * evader_speed / (swarm_size * tangential)).exp()
}
