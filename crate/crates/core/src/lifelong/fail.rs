//! Recovery when the planner fails.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::gridmap::{Cell, DistanceOracle, GridMap, Orientation, UNREACHABLE};
use crate::mapf::{AgentState, MapfInstance, Path, Plan};
use crate::planners::{pibt_step_ranked, plan_pibt, PibtState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailPolicy {
    AllWait,
    PibtReplan,
    Lrgw,
    GuidedPibt,
}

impl FailPolicy {
    pub fn needs_colliding_paths(self) -> bool {
        matches!(self, FailPolicy::Lrgw | FailPolicy::GuidedPibt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub plan: Plan,
    /// Wait-insertion repair deadlocked and PIBT replanning was used instead.
    pub fell_back: bool,
}

/// Conflict-free replacement plan over `horizon` timesteps.
pub fn recover(
    policy: FailPolicy,
    oracle: &DistanceOracle,
    instance: &MapfInstance,
    failed: &Plan,
    horizon: u32,
) -> Recovery {
    let done = |plan| Recovery { plan, fell_back: false };
    match policy {
        FailPolicy::AllWait => done(all_wait(instance, horizon)),
        FailPolicy::PibtReplan => done(plan_pibt(oracle, instance, horizon)),
        FailPolicy::Lrgw => match lrgw(&failed.paths, horizon) {
            Some(plan) => done(plan),
            None => Recovery {
                plan: plan_pibt(oracle, instance, horizon),
                fell_back: true,
            },
        },
        FailPolicy::GuidedPibt => done(guided_pibt(oracle.map(), instance, &failed.paths, horizon)),
    }
}

pub fn all_wait(instance: &MapfInstance, horizon: u32) -> Plan {
    Plan::success(
        instance
            .agents
            .iter()
            .map(|a| Path::stationary(a.start, horizon))
            .collect(),
    )
}

/// Route cells with the timestep at which the source path enters each.
fn timed_route(path: &Path) -> Vec<(Cell, u32)> {
    let mut out: Vec<(Cell, u32)> = Vec::new();
    for (t, s) in path.states.iter().enumerate() {
        if out.last().map(|&(c, _)| c) != Some(s.cell) {
            out.push((s.cell, t as u32));
        }
    }
    out
}

fn headed_path(cells: &[Cell], start: AgentState) -> Path {
    let mut heading = start.heading;
    let mut states = Vec::with_capacity(cells.len());
    let mut prev = start.cell;
    for &c in cells {
        if let Some(o) = Orientation::between(prev, c) {
            heading = o;
        }
        states.push(AgentState::new(c, heading));
        prev = c;
    }
    Path::new(states, &[])
}

/// Retime colliding paths by inserting waits. Each round, agents in order of
/// (planned entry of their next cell, id) advance one cell along their own
/// route if that cell is free right now. Following into a cell vacated in the
/// same round is allowed. Returns `None` on deadlock.
pub fn lrgw(paths: &[Path], horizon: u32) -> Option<Plan> {
    let n = paths.len();
    let routes: Vec<Vec<(Cell, u32)>> = paths.iter().map(timed_route).collect();
    let mut progress = vec![0usize; n];
    let mut pos: Vec<Cell> = routes.iter().map(|r| r[0].0).collect();
    let mut cells: Vec<Vec<Cell>> = pos.iter().map(|&c| vec![c]).collect();
    let mut occupied: rustc_hash::FxHashMap<Cell, usize> = pos.iter().enumerate().map(|(a, &c)| (c, a)).collect();
    for _ in 0..horizon {
        let unfinished: Vec<usize> = (0..n).filter(|&a| progress[a] + 1 < routes[a].len()).collect();
        if unfinished.is_empty() {
            for (a, c) in cells.iter_mut().enumerate() {
                c.push(pos[a]);
            }
            continue;
        }
        let mut order = unfinished;
        order.sort_by_key(|&a| (routes[a][progress[a] + 1].1, a));
        let round_start = pos.clone();
        let mut moved_from: rustc_hash::FxHashMap<Cell, usize> = Default::default();
        let mut advanced = 0;
        let mut moved = vec![false; n];
        // repeat passes so an agent may follow one processed after it
        loop {
            let before = advanced;
            for &a in &order {
                if moved[a] {
                    continue;
                }
                let target = routes[a][progress[a] + 1].0;
                if occupied.contains_key(&target) {
                    continue;
                }
                // nobody may have left `target` for our cell this round
                if moved_from.get(&target).is_some_and(|&b| pos[b] == round_start[a]) {
                    continue;
                }
                occupied.remove(&pos[a]);
                moved_from.insert(pos[a], a);
                occupied.insert(target, a);
                pos[a] = target;
                progress[a] += 1;
                moved[a] = true;
                advanced += 1;
            }
            if advanced == before {
                break;
            }
        }
        if advanced == 0 {
            return None;
        }
        for (a, c) in cells.iter_mut().enumerate() {
            c.push(pos[a]);
        }
    }
    Some(Plan::success(
        cells
            .iter()
            .zip(paths)
            .map(|(c, p)| headed_path(c, p.start()))
            .collect(),
    ))
}

/// Distance-to-go along a guide: min over guide index k of
/// bfs(v, guide[k]) + (steps left on the guide after k).
pub fn guide_heuristic(map: &GridMap, guide: &[Cell]) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; map.num_cells()];
    let mut heap = BinaryHeap::new();
    let last = guide.len() - 1;
    for (k, &c) in guide.iter().enumerate() {
        let i = map.index(c);
        let d = (last - k) as u32;
        if d < dist[i] {
            dist[i] = d;
            heap.push(Reverse((d, i)));
        }
    }
    while let Some(Reverse((d, i))) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        for n in map.neighbors(map.cell(i)) {
            let j = map.index(n);
            if d + 1 < dist[j] {
                dist[j] = d + 1;
                heap.push(Reverse((d + 1, j)));
            }
        }
    }
    dist
}

/// PIBT steered along the colliding paths as guides.
pub fn guided_pibt(map: &GridMap, instance: &MapfInstance, guides: &[Path], horizon: u32) -> Plan {
    let n = instance.num_agents();
    let routes: Vec<Vec<Cell>> = guides.iter().map(Path::route).collect();
    let h: Vec<Vec<u32>> = routes.iter().map(|r| guide_heuristic(map, r)).collect();
    let mut on_guide: Vec<Vec<bool>> = vec![vec![false; map.num_cells()]; n];
    for (a, r) in routes.iter().enumerate() {
        for &c in r {
            on_guide[a][map.index(c)] = true;
        }
    }
    let ends: Vec<Cell> = routes.iter().map(|r| *r.last().expect("nonempty route")).collect();
    let mut current: Vec<Cell> = instance.agents.iter().map(|a| a.start.cell).collect();
    let mut cells: Vec<Vec<Cell>> = current.iter().map(|&c| vec![c]).collect();
    let mut state = PibtState::new(n);
    for _ in 0..horizon {
        let next = pibt_step_ranked(map, &state, &current, |a, v| {
            let i = map.index(v);
            (h[a][i] as u64) << 1 | u64::from(!on_guide[a][i])
        });
        let at_goal: Vec<bool> = (0..n).map(|a| next[a] == ends[a]).collect();
        state.update(&at_goal);
        for (a, c) in cells.iter_mut().enumerate() {
            c.push(next[a]);
        }
        current = next;
    }
    Plan::success(
        cells
            .iter()
            .zip(&instance.agents)
            .map(|(c, t)| headed_path(c, t.start))
            .collect(),
    )
}
