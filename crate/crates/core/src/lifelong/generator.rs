use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use super::goals::{GoalBook, GoalError, GoalStream};
use crate::gridmap::{Cell, DistanceOracle, GridMap};
use crate::mapf::{AgentState, AgentTask, MapfInstance, PlanModel, Semantics, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    DistinctOneGoal,
    OneGoal,
    WindowedMultiGoals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub instance: MapfInstance,
    /// Agents sent to a stand-in goal because their own was taken.
    pub temporary: Vec<bool>,
}

/// Nearest traversable cell to `origin` outside `taken`, by BFS layer then row-major.
pub fn nearest_free_goal(map: &GridMap, origin: Cell, taken: &FxHashSet<Cell>) -> Option<Cell> {
    let mut seen = vec![false; map.num_cells()];
    seen[map.index(origin)] = true;
    let mut layer = vec![origin];
    while !layer.is_empty() {
        layer.sort();
        if let Some(&c) = layer.iter().find(|c| !taken.contains(c)) {
            return Some(c);
        }
        let mut next = Vec::new();
        for &c in &layer {
            for n in map.neighbors(c) {
                let i = map.index(n);
                if !seen[i] {
                    seen[i] = true;
                    next.push(n);
                }
            }
        }
        layer = next;
    }
    None
}

/// Queued goals an agent will pass before `start`, matched in order along
/// `cells` (its current cell followed by the committed action ends).
pub fn goals_passed(book: &GoalBook, agent: usize, cells: impl IntoIterator<Item = Cell>) -> usize {
    let queued = book.queued(agent);
    let mut k = 0;
    for c in cells {
        while queued.get(k) == Some(&c) {
            k += 1;
        }
    }
    k
}

#[allow(clippy::too_many_arguments)]
/// `skip[a]` queued goals are left out because agent `a` reaches them inside
/// its committed prefix.
pub fn generate_instance(
    kind: GeneratorKind,
    starts: &[AgentState],
    skip: &[usize],
    book: &mut GoalBook,
    stream: &mut GoalStream,
    oracle: &DistanceOracle,
    model: PlanModel,
    window: Window,
    budget: f64,
) -> Result<GeneratedInstance, GoalError> {
    let n = starts.len();
    let mut temporary = vec![false; n];
    let mut agents = Vec::with_capacity(n);
    let (semantics, inst_window) = match kind {
        GeneratorKind::DistinctOneGoal => {
            let mut intended = Vec::with_capacity(n);
            for (a, s) in starts.iter().enumerate() {
                let k = skip[a];
                book.ensure(a, k + 1, s.cell, stream)?;
                intended.push(book.queued(a)[k]);
            }
            let all: FxHashSet<Cell> = intended.iter().copied().collect();
            let mut assigned: FxHashSet<Cell> = FxHashSet::default();
            for (a, s) in starts.iter().enumerate() {
                let mut g = intended[a];
                if assigned.contains(&g) {
                    let taken: FxHashSet<Cell> = all.union(&assigned).copied().collect();
                    g = nearest_free_goal(oracle.map(), g, &taken).ok_or(GoalError::NoEligibleCells { agent: a })?;
                    temporary[a] = true;
                }
                assigned.insert(g);
                agents.push(AgentTask { start: *s, goals: vec![g] });
            }
            (Semantics::Standard, Window::Unbounded)
        }
        GeneratorKind::OneGoal => {
            for (a, s) in starts.iter().enumerate() {
                let k = skip[a];
                book.ensure(a, k + 1, s.cell, stream)?;
                agents.push(AgentTask {
                    start: *s,
                    goals: vec![book.queued(a)[k]],
                });
            }
            (Semantics::Transient, Window::Unbounded)
        }
        GeneratorKind::WindowedMultiGoals => {
            let w = window.steps().unwrap_or(1);
            for (a, s) in starts.iter().enumerate() {
                let k = skip[a];
                let mut goals = Vec::new();
                let mut from = s.cell;
                let mut total = 0u32;
                while goals.is_empty() || total < w {
                    book.ensure(a, k + goals.len() + 1, s.cell, stream)?;
                    let g = book.queued(a)[k + goals.len()];
                    total += oracle.distance(from, g).ok_or(GoalError::NoEligibleCells { agent: a })?;
                    goals.push(g);
                    from = g;
                }
                agents.push(AgentTask { start: *s, goals });
            }
            (Semantics::Standard, Window::Steps(w))
        }
    };
    Ok(GeneratedInstance {
        instance: MapfInstance {
            agents,
            model,
            window: inst_window,
            semantics,
            budget,
        },
        temporary,
    })
}

/// Cumulative BFS distance along `start → goals`.
pub fn chain_distance(oracle: &DistanceOracle, start: Cell, goals: &[Cell]) -> Option<u32> {
    let mut from = start;
    let mut total = 0;
    for &g in goals {
        total += oracle.distance(from, g)?;
        from = g;
    }
    Some(total)
}
