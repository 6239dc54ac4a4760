//! Priority inheritance with backtracking, one synchronized step at a time.

use crate::gridmap::{Cell, DistanceOracle, GridMap, Orientation};
use crate::mapf::{AgentState, MapfInstance, Path, Plan};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct PibtState {
    pub priorities: Vec<f64>,
    base: Vec<f64>,
}

impl PibtState {
    pub fn new(num_agents: usize) -> Self {
        let base: Vec<f64> = (0..num_agents)
            .map(|i| i as f64 / (num_agents as f64 + 1.0))
            .collect();
        PibtState {
            priorities: base.clone(),
            base,
        }
    }

    /// Agents away from their goal gain priority; agents at their goal reset.
    pub fn update(&mut self, at_goal: &[bool]) {
        for (a, &done) in at_goal.iter().enumerate() {
            if done {
                self.priorities[a] = self.base[a];
            } else {
                self.priorities[a] += 1.0;
            }
        }
    }

    /// Agent ids by descending priority.
    fn order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.priorities.len()).collect();
        order.sort_by(|&a, &b| {
            self.priorities[b]
                .total_cmp(&self.priorities[a])
                .then(a.cmp(&b))
        });
        order
    }
}

struct Step<'a, F> {
    map: &'a GridMap,
    current: &'a [Cell],
    rank: F,
    occupied_now: Vec<usize>,
    occupied_next: Vec<usize>,
    next: Vec<Option<Cell>>,
}

impl<F: Fn(usize, Cell) -> u64> Step<'_, F> {
    fn candidates(&self, a: usize) -> Vec<Cell> {
        let here = self.current[a];
        let mut c = self.map.neighbors(here);
        c.push(here);
        // stable: ties keep N, E, S, W, stay
        c.sort_by_key(|&v| (self.rank)(a, v));
        c
    }

    fn plan(&mut self, a: usize, parent: Option<usize>) -> bool {
        for v in self.candidates(a) {
            let vi = self.map.index(v);
            if self.occupied_next[vi] != NONE {
                continue;
            }
            if parent.is_some_and(|p| self.current[p] == v) {
                continue;
            }
            self.occupied_next[vi] = a;
            self.next[a] = Some(v);
            let occupant = self.occupied_now[vi];
            if occupant != NONE && occupant != a && self.next[occupant].is_none() && !self.plan(occupant, Some(a)) {
                continue;
            }
            return true;
        }
        let here = self.current[a];
        self.occupied_next[self.map.index(here)] = a;
        self.next[a] = Some(here);
        false
    }
}

/// One step where each agent ranks `{neighbors, stay}` by `rank(agent, cell)`
/// (smaller is better). Rotation cycles among movers are broken by making the
/// cycle, and anyone then blocked behind it, stay.
pub fn pibt_step_ranked<F: Fn(usize, Cell) -> u64>(
    map: &GridMap,
    state: &PibtState,
    current: &[Cell],
    rank: F,
) -> Vec<Cell> {
    let n = current.len();
    let mut step = Step {
        map,
        current,
        rank,
        occupied_now: vec![NONE; map.num_cells()],
        occupied_next: vec![NONE; map.num_cells()],
        next: vec![None; n],
    };
    for (a, &c) in current.iter().enumerate() {
        step.occupied_now[map.index(c)] = a;
    }
    for a in state.order() {
        if step.next[a].is_none() {
            step.plan(a, None);
        }
    }
    let mut next: Vec<Cell> = step.next.into_iter().map(|c| c.expect("every agent decided")).collect();
    break_rotations(map, current, &mut next, &step.occupied_now);
    next
}

fn break_rotations(map: &GridMap, current: &[Cell], next: &mut [Cell], occupied_now: &[usize]) {
    let n = current.len();
    let mut state = vec![0u8; n];
    for start in 0..n {
        if state[start] != 0 || next[start] == current[start] {
            continue;
        }
        let mut trail = Vec::new();
        let mut cur = start;
        loop {
            if state[cur] == 2 || next[cur] == current[cur] {
                break;
            }
            if state[cur] == 1 {
                let pos = trail.iter().position(|&x| x == cur).expect("on trail");
                for &x in &trail[pos..] {
                    next[x] = current[x];
                }
                break;
            }
            state[cur] = 1;
            trail.push(cur);
            let occ = occupied_now[map.index(next[cur])];
            if occ == NONE {
                break;
            }
            cur = occ;
        }
        for x in trail {
            state[x] = 2;
        }
    }
    // movers now targeting a cell whose holder stays must stay too
    loop {
        let mut changed = false;
        for a in 0..n {
            if next[a] == current[a] {
                continue;
            }
            let occ = occupied_now[map.index(next[a])];
            if occ != NONE && next[occ] == current[occ] {
                next[a] = current[a];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

pub fn pibt_step(oracle: &DistanceOracle, goals: &[Cell], state: &PibtState, current: &[Cell]) -> Vec<Cell> {
    let tables: Vec<_> = goals.iter().map(|&g| oracle.pebble(g)).collect();
    let map = oracle.map();
    pibt_step_ranked(map, state, current, |a, v| tables[a].at(map.index(v)) as u64)
}

/// Roll PIBT forward `horizon` steps on the cell projection of the instance.
/// Agents move on to their next goal as soon as they reach one.
pub fn plan_pibt(oracle: &DistanceOracle, instance: &MapfInstance, horizon: u32) -> Plan {
    let n = instance.num_agents();
    let mut current: Vec<Cell> = instance.agents.iter().map(|a| a.start.cell).collect();
    let mut headings: Vec<Orientation> = instance.agents.iter().map(|a| a.start.heading).collect();
    let mut goal_idx: Vec<usize> = instance
        .agents
        .iter()
        .map(|a| a.goals.iter().take_while(|&&g| g == a.start.cell).count().min(a.goals.len() - 1))
        .collect();
    let mut states: Vec<Vec<AgentState>> = instance.agents.iter().map(|a| vec![a.start]).collect();
    let mut pibt = PibtState::new(n);
    for _ in 0..horizon {
        let goals: Vec<Cell> = (0..n).map(|a| instance.agents[a].goals[goal_idx[a]]).collect();
        let next = pibt_step(oracle, &goals, &pibt, &current);
        let mut at_goal = vec![false; n];
        for a in 0..n {
            if let Some(o) = Orientation::between(current[a], next[a]) {
                headings[a] = o;
            }
            states[a].push(AgentState::new(next[a], headings[a]));
            at_goal[a] = next[a] == goals[a];
            if at_goal[a] && goal_idx[a] + 1 < instance.agents[a].goals.len() {
                goal_idx[a] += 1;
            }
        }
        pibt.update(&at_goal);
        current = next;
    }
    let paths = states
        .into_iter()
        .zip(&instance.agents)
        .map(|(s, task)| Path::new(s, &task.goals))
        .collect();
    Plan::success(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{parse_map, Dialect};
    use crate::mapf::{check_conflicts, AgentTask, PlanModel, Semantics, Window};
    use std::sync::Arc;

    fn valid_step(current: &[Cell], next: &[Cell]) -> bool {
        let n = current.len();
        for a in 0..n {
            for b in a + 1..n {
                if next[a] == next[b] || (next[a] == current[b] && next[b] == current[a]) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn single_agent_descends() {
        let o = DistanceOracle::new(Arc::new(crate::gridmap::GridMap::empty(5, 5)));
        let next = pibt_step(&o, &[Cell::new(0, 3)], &PibtState::new(1), &[Cell::new(0, 0)]);
        assert_eq!(next, vec![Cell::new(0, 1)]);
    }

    #[test]
    fn head_on_lower_priority_sidesteps() {
        let o = DistanceOracle::new(Arc::new(crate::gridmap::GridMap::empty(5, 5)));
        let current = [Cell::new(2, 1), Cell::new(2, 2)];
        let goals = [Cell::new(2, 4), Cell::new(2, 0)];
        let state = PibtState::new(2);
        let next = pibt_step(&o, &goals, &state, &current);
        assert!(valid_step(&current, &next));
        // agent 1 has the higher base priority and makes progress
        assert_eq!(o.pebble(goals[1]).get(next[1]), Some(1));
    }

    #[test]
    fn pushes_agent_off_its_goal() {
        let map = parse_map("type octile\nheight 1\nwidth 3\nmap\n...\n", Dialect::Movingai).unwrap();
        let o = DistanceOracle::new(Arc::new(map));
        let current = [Cell::new(0, 1), Cell::new(0, 0)];
        let goals = [Cell::new(0, 1), Cell::new(0, 2)];
        let mut state = PibtState::new(2);
        state.priorities[1] = 5.0;
        let next = pibt_step(&o, &goals, &state, &current);
        assert!(valid_step(&current, &next));
        assert_eq!(next, vec![Cell::new(0, 2), Cell::new(0, 1)]);
    }

    #[test]
    fn rotation_cycle_is_broken() {
        let map = crate::gridmap::GridMap::empty(2, 2);
        let o = DistanceOracle::new(Arc::new(map));
        // every agent wants the next cell clockwise
        let current = [Cell::new(0, 0), Cell::new(0, 1), Cell::new(1, 1), Cell::new(1, 0)];
        let goals = [Cell::new(0, 1), Cell::new(1, 1), Cell::new(1, 0), Cell::new(0, 0)];
        let next = pibt_step(&o, &goals, &PibtState::new(4), &current);
        assert!(valid_step(&current, &next));
        let movers: Vec<usize> = (0..4).filter(|&a| next[a] != current[a]).collect();
        assert!(movers.len() < 4);
    }

    #[test]
    fn plan_pibt_reaches_goal_and_records_visit() {
        let o = DistanceOracle::new(Arc::new(crate::gridmap::GridMap::empty(5, 5)));
        let inst = MapfInstance {
            agents: vec![AgentTask {
                start: AgentState::new(Cell::new(0, 0), Orientation::North),
                goals: vec![Cell::new(0, 3)],
            }],
            model: PlanModel::Pebble,
            window: Window::Unbounded,
            semantics: Semantics::Standard,
            budget: 1.0,
        };
        let plan = plan_pibt(&o, &inst, 5);
        assert!(plan.is_success());
        assert_eq!(plan.paths[0].len(), 5);
        assert_eq!(plan.paths[0].goal_visit_times, vec![3]);
        let empty = MapfInstance { agents: vec![], ..inst };
        assert!(plan_pibt(&o, &empty, 5).paths.is_empty());
    }

    #[test]
    fn random_steps_are_valid() {
        use rand::{Rng, SeedableRng};
        let map = crate::gridmap::GridMap::empty(8, 8);
        let o = DistanceOracle::new(Arc::new(map));
        let cells: Vec<Cell> = o.map().traversable_cells().collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let a = cells[rng.random_range(0..cells.len())];
            let mut b = a;
            while b == a {
                b = cells[rng.random_range(0..cells.len())];
            }
            let goals = [cells[rng.random_range(0..cells.len())], cells[rng.random_range(0..cells.len())]];
            let mut state = PibtState::new(2);
            state.priorities[0] += rng.random_range(0..3) as f64;
            let next = pibt_step(&o, &goals, &state, &[a, b]);
            assert!(valid_step(&[a, b], &next));
        }
    }

    #[test]
    fn ten_agent_rollout_is_conflict_free() {
        use rand::SeedableRng;
        let map = crate::gridmap::GridMap::empty(8, 8);
        let o = DistanceOracle::new(Arc::new(map));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let starts = crate::maps::sample_distinct_cells(o.map(), 10, &mut rng).unwrap();
            let goals = crate::maps::sample_distinct_cells(o.map(), 10, &mut rng).unwrap();
            let inst = MapfInstance {
                agents: starts
                    .iter()
                    .zip(&goals)
                    .map(|(&s, &g)| AgentTask {
                        start: AgentState::new(s, Orientation::North),
                        goals: vec![g],
                    })
                    .collect(),
                model: PlanModel::Pebble,
                window: Window::Unbounded,
                semantics: Semantics::Standard,
                budget: 1.0,
            };
            let plan = plan_pibt(&o, &inst, 20);
            assert!(check_conflicts(&plan.paths, Window::Unbounded, Semantics::Standard).is_empty());
        }
    }
}
