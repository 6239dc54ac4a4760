use crate::gridmap::DistanceOracle;
use crate::mapf::{
    check_conflicts, space_time_astar, AgentTask, LowLevelQuery, MapfInstance, Path, Plan,
    ReservationTable, SearchBudget, SearchError,
};

pub(crate) fn query<'a>(instance: &MapfInstance, task: &'a AgentTask, horizon: u32) -> LowLevelQuery<'a> {
    LowLevelQuery {
        start: task.start,
        goals: &task.goals,
        model: instance.model,
        window: instance.window,
        semantics: instance.semantics,
        horizon,
    }
}

/// Shortest path ignoring other agents; the agent's start pose if even that fails.
pub fn unconstrained_path(oracle: &DistanceOracle, instance: &MapfInstance, agent: usize) -> Path {
    let task = &instance.agents[agent];
    space_time_astar(
        oracle,
        query(instance, task, 0),
        &ReservationTable::new(),
        &mut SearchBudget::unlimited(),
    )
    .unwrap_or_else(|_| Path::stationary(task.start, 0))
}

/// Plan agents one at a time in `order`, each avoiding every earlier path.
pub fn plan_prioritized(
    oracle: &DistanceOracle,
    instance: &MapfInstance,
    order: &[usize],
    budget: &mut SearchBudget,
) -> Plan {
    let n = instance.num_agents();
    debug_assert_eq!(order.len(), n);
    let map = oracle.map();
    let mut paths: Vec<Option<Path>> = vec![None; n];
    let mut res = ReservationTable::new();
    let mut failed = false;
    for &a in order {
        let task = &instance.agents[a];
        match space_time_astar(oracle, query(instance, task, res.max_time()), &res, budget) {
            Ok(p) => {
                res.add_path(map, &p, instance.semantics);
                paths[a] = Some(p);
            }
            Err(SearchError::NoPath | SearchError::ExpansionCapExceeded | SearchError::BudgetExhausted) => {
                failed = true;
                break;
            }
        }
    }
    let paths: Vec<Path> = paths
        .into_iter()
        .enumerate()
        .map(|(a, p)| p.unwrap_or_else(|| unconstrained_path(oracle, instance, a)))
        .collect();
    if failed {
        let conflicts = check_conflicts(&paths, instance.window, instance.semantics);
        Plan::failed(paths, conflicts)
    } else {
        debug_assert!(check_conflicts(&paths, instance.window, instance.semantics).is_empty());
        Plan::success(paths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{parse_map, Cell, Dialect, GridMap, Orientation};
    use crate::mapf::{AgentState, PlanModel, Semantics, Window};
    use std::sync::Arc;

    pub(crate) fn instance(agents: &[((u32, u32), (u32, u32))]) -> MapfInstance {
        MapfInstance {
            agents: agents
                .iter()
                .map(|&((sr, sc), (gr, gc))| AgentTask {
                    start: AgentState::new(Cell::new(sr, sc), Orientation::North),
                    goals: vec![Cell::new(gr, gc)],
                })
                .collect(),
            model: PlanModel::Pebble,
            window: Window::Unbounded,
            semantics: Semantics::Standard,
            budget: 1.0,
        }
    }

    #[test]
    fn single_agent_matches_unconstrained_search() {
        let o = DistanceOracle::new(Arc::new(GridMap::empty(5, 5)));
        let inst = instance(&[((0, 0), (4, 3))]);
        let plan = plan_prioritized(&o, &inst, &[0], &mut SearchBudget::unlimited());
        assert!(plan.is_success());
        assert_eq!(plan.paths[0], unconstrained_path(&o, &inst, 0));
        assert_eq!(plan.paths[0].len(), 7);
    }

    #[test]
    fn crossing_agents_lower_priority_yields() {
        // both would reach (2,2) at t=2
        let o = DistanceOracle::new(Arc::new(GridMap::empty(5, 5)));
        let inst = instance(&[((2, 0), (2, 4)), ((0, 2), (4, 2))]);
        let plan = plan_prioritized(&o, &inst, &[0, 1], &mut SearchBudget::unlimited());
        assert!(plan.is_success());
        assert_eq!(plan.paths[0].len(), 4);
        assert_eq!(plan.sum_of_costs(Semantics::Standard), 9);
    }

    #[test]
    fn corridor_swap_fails_both_orders() {
        let map = parse_map("type octile\nheight 1\nwidth 4\nmap\n....\n", Dialect::Movingai).unwrap();
        let o = DistanceOracle::new(Arc::new(map));
        let inst = instance(&[((0, 0), (0, 3)), ((0, 3), (0, 0))]);
        for order in [[0, 1], [1, 0]] {
            let plan = plan_prioritized(&o, &inst, &order, &mut SearchBudget::unlimited());
            assert!(!plan.is_success());
            assert!(!plan.conflicts.is_empty());
            assert_eq!(plan.paths.len(), 2);
        }
    }
}
