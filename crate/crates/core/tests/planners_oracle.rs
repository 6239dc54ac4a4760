//! Planners checked against exhaustive search on tiny maps.

use std::sync::Arc;

use fleetsim_core::gridmap::bfs_distance;
use fleetsim_core::mapf::{check_conflicts, space_time_astar, AgentTask, LowLevelQuery, ReservationTable, SearchBudget};
use fleetsim_core::maps::sample_distinct_cells;
use fleetsim_core::planners::{joint_optimal_soc, plan_pbs, plan_prioritized};
use fleetsim_core::{AgentState, CellKind, DistanceOracle, GridMap, MapfInstance, Orientation, PlanModel, Semantics, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_map(side: u32, obstacle_ratio: f64, rng: &mut ChaCha8Rng) -> GridMap {
    let kinds = (0..side * side)
        .map(|_| if rng.random_bool(obstacle_ratio) { CellKind::Obstacle } else { CellKind::Free })
        .collect();
    let mut map = GridMap::from_kinds(side, side, kinds).unwrap_or_else(|_| GridMap::empty(side, side));
    map.keep_largest_component();
    map
}

fn instance(oracle: &DistanceOracle, agents: usize, rng: &mut ChaCha8Rng) -> Option<MapfInstance> {
    let starts = sample_distinct_cells(oracle.map(), agents, rng)?;
    let goals = sample_distinct_cells(oracle.map(), agents, rng)?;
    Some(MapfInstance {
        agents: starts
            .into_iter()
            .zip(goals)
            .map(|(s, g)| AgentTask {
                start: AgentState::new(s, Orientation::North),
                goals: vec![g],
            })
            .collect(),
        model: PlanModel::Pebble,
        window: Window::Unbounded,
        semantics: Semantics::Standard,
        budget: 1.0,
    })
}

#[test]
fn pbs_and_pp_against_joint_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut pbs_solved = 0;
    let mut pbs_optimal = 0;
    let mut pp_solved = 0;
    let mut worst_ratio: f64 = 1.0;
    while checked < 200 {
        let side = rng.random_range(4..=5);
        let map = random_map(side, 0.15, &mut rng);
        let oracle = DistanceOracle::new(Arc::new(map));
        let agents = rng.random_range(2..=3);
        let Some(inst) = instance(&oracle, agents, &mut rng) else { continue };
        let starts: Vec<_> = inst.agents.iter().map(|a| a.start.cell).collect();
        let goals: Vec<_> = inst.agents.iter().map(|a| a.goals[0]).collect();
        let Some(optimum) = joint_optimal_soc(&oracle, &starts, &goals, 2_000_000) else { continue };
        checked += 1;

        let pbs = plan_pbs(&oracle, &inst, &mut SearchBudget::unlimited());
        if pbs.is_success() {
            pbs_solved += 1;
            assert!(check_conflicts(&pbs.paths, Window::Unbounded, Semantics::Standard).is_empty());
            let soc = pbs.sum_of_costs(Semantics::Standard);
            assert!(soc >= optimum, "pbs {soc} beats the optimum {optimum}");
            if soc == optimum {
                pbs_optimal += 1;
            }
            if optimum > 0 {
                worst_ratio = worst_ratio.max(soc as f64 / optimum as f64);
            }
        }
        let order: Vec<usize> = (0..agents).collect();
        let pp = plan_prioritized(&oracle, &inst, &order, &mut SearchBudget::unlimited());
        if pp.is_success() {
            pp_solved += 1;
            assert!(check_conflicts(&pp.paths, Window::Unbounded, Semantics::Standard).is_empty());
            assert!(pp.sum_of_costs(Semantics::Standard) >= optimum);
        }
    }
    println!("pbs solved {pbs_solved}/200, optimal on {pbs_optimal}/200, worst ratio {worst_ratio:.3}, pp solved {pp_solved}/200");
    assert!(pbs_optimal >= 100);
}

#[test]
fn astar_matches_bfs_on_every_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let map = random_map(8, 0.2, &mut rng);
    let oracle = DistanceOracle::new(Arc::new(map.clone()));
    let cells: Vec<_> = map.traversable_cells().collect();
    let reservations = ReservationTable::new();
    for &goal in &cells {
        let table = bfs_distance(&map, goal).unwrap();
        for &start in &cells {
            let goals = [goal];
            let query = LowLevelQuery {
                start: AgentState::new(start, Orientation::East),
                goals: &goals,
                model: PlanModel::Pebble,
                window: Window::Unbounded,
                semantics: Semantics::Standard,
                horizon: 0,
            };
            let path = space_time_astar(&oracle, query, &reservations, &mut SearchBudget::unlimited()).unwrap();
            assert_eq!(path.len(), table.get(start).unwrap(), "{start} -> {goal}");
            assert_eq!(path.last().cell, goal);
        }
    }
}
