//! Shared fixtures for the benchmarks.

use sweep_core::ScenarioParams;

/// Reference scenario with the given swarm size.
pub fn scenario(swarm_size: u32) -> ScenarioParams {
    ScenarioParams::reference(swarm_size)
}
