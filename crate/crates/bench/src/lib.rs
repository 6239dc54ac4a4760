//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use fleetsim_core::mapf::AgentTask;
use fleetsim_core::maps::{benchmark_map, sample_distinct_cells};
use fleetsim_core::{AgentState, DistanceOracle, MapfInstance, Orientation, PlanModel, Semantics, Window};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn oracle(map_name: &str) -> DistanceOracle {
    let map = benchmark_map(map_name).expect("known benchmark map");
    DistanceOracle::new(Arc::new(map))
}

/// One-shot instance with distinct random starts and goals.
pub fn random_instance(oracle: &DistanceOracle, agents: usize, window: Window, seed: u64) -> MapfInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = sample_distinct_cells(oracle.map(), agents, &mut rng).expect("enough free cells");
    let goals = sample_distinct_cells(oracle.map(), agents, &mut rng).expect("enough free cells");
    MapfInstance {
        agents: starts
            .into_iter()
            .zip(goals)
            .map(|(s, g)| AgentTask {
                start: AgentState::new(s, Orientation::North),
                goals: vec![g],
            })
            .collect(),
        model: PlanModel::Pebble,
        window,
        semantics: Semantics::Standard,
        budget: 1.0,
    }
}
