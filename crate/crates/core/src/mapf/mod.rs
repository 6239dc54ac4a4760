//! Planning-side domain types: instances, timestep paths, plans and conflicts.

mod conflicts;
pub mod format;
mod monitor;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::{Cell, DistanceOracle, Orientation};

pub use conflicts::{
    check_conflicts, first_conflict, paths_collide, rotation_cycles, ConflictChecker,
};
pub use monitor::{monitor_execution, Occupancy, OccupancyLog, Violation};
pub use search::{
    space_time_astar, LowLevelQuery, ReservationTable, SearchBudget, SearchError,
    DEFAULT_EXPANSION_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanModel {
    Pebble,
    Rotation,
}

/// Planning horizon within which conflicts must be resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Window {
    Unbounded,
    /// Conflicts at arrival timesteps `1..=n` are resolved.
    Steps(u32),
}

impl Window {
    #[inline]
    pub fn covers(self, t: u32) -> bool {
        match self {
            Window::Unbounded => true,
            Window::Steps(w) => t <= w,
        }
    }

    pub fn steps(self) -> Option<u32> {
        match self {
            Window::Unbounded => None,
            Window::Steps(w) => Some(w),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Unbounded => f.write_str("inf"),
            Window::Steps(w) => write!(f, "{w}"),
        }
    }
}

/// Standard: agents stay at their last goal forever. Transient: a path is
/// complete once it has visited its goals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    Standard,
    Transient,
}

/// Grid pose used by both motion models. Pebble paths carry the heading of
/// the most recent move, which the planner itself ignores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AgentState {
    pub cell: Cell,
    pub heading: Orientation,
}

impl AgentState {
    pub const fn new(cell: Cell, heading: Orientation) -> Self {
        AgentState { cell, heading }
    }
}

impl fmt::Display for AgentState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.cell.row, self.cell.col, self.heading.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentTask {
    pub start: AgentState,
    pub goals: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapfInstance {
    pub agents: Vec<AgentTask>,
    pub model: PlanModel,
    pub window: Window,
    pub semantics: Semantics,
    /// Planner runtime limit in seconds.
    pub budget: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("agent {0} has no goals")]
    NoGoals(usize),
    #[error("agent {agent} start {cell} is not traversable")]
    BlockedStart { agent: usize, cell: Cell },
    #[error("agents {0} and {1} share a start cell")]
    SharedStart(usize, usize),
    #[error("agent {agent} goal {cell} unreachable")]
    UnreachableGoal { agent: usize, cell: Cell },
    #[error("agents {0} and {1} share a goal under standard semantics")]
    SharedGoal(usize, usize),
}

impl MapfInstance {
    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn starts(&self) -> Vec<AgentState> {
        self.agents.iter().map(|a| a.start).collect()
    }

    pub fn validate(&self, oracle: &DistanceOracle) -> Result<(), InstanceError> {
        let map = oracle.map();
        let mut seen = rustc_hash::FxHashMap::default();
        let mut last_goals = rustc_hash::FxHashMap::default();
        for (i, task) in self.agents.iter().enumerate() {
            if task.goals.is_empty() {
                return Err(InstanceError::NoGoals(i));
            }
            if !map.is_traversable(task.start.cell) {
                return Err(InstanceError::BlockedStart {
                    agent: i,
                    cell: task.start.cell,
                });
            }
            if let Some(j) = seen.insert(task.start.cell, i) {
                return Err(InstanceError::SharedStart(j, i));
            }
            let mut from = task.start.cell;
            for &g in &task.goals {
                if !map.is_traversable(g) || oracle.distance(from, g).is_none() {
                    return Err(InstanceError::UnreachableGoal { agent: i, cell: g });
                }
                from = g;
            }
            if self.semantics == Semantics::Standard && task.goals.len() == 1 {
                if let Some(j) = last_goals.insert(task.goals[0], i) {
                    return Err(InstanceError::SharedGoal(j, i));
                }
            }
        }
        Ok(())
    }
}

/// One agent's timestep path. `states[t]` is the pose at timestep `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub states: Vec<AgentState>,
    /// Timestep of the first in-order visit of each goal.
    pub goal_visit_times: Vec<u32>,
}

impl Path {
    /// Build a path and record in-order goal visits.
    pub fn new(states: Vec<AgentState>, goals: &[Cell]) -> Self {
        assert!(!states.is_empty(), "a path has at least its start state");
        let mut goal_visit_times = Vec::with_capacity(goals.len());
        let mut next = 0;
        for (t, s) in states.iter().enumerate() {
            while next < goals.len() && s.cell == goals[next] {
                goal_visit_times.push(t as u32);
                next += 1;
            }
        }
        Path {
            states,
            goal_visit_times,
        }
    }

    pub fn stationary(start: AgentState, steps: u32) -> Self {
        Path {
            states: vec![start; steps as usize + 1],
            goal_visit_times: Vec::new(),
        }
    }

    /// Number of timesteps (states minus one).
    pub fn len(&self) -> u32 {
        (self.states.len() - 1) as u32
    }

    pub fn is_empty(&self) -> bool {
        self.states.len() <= 1
    }

    pub fn start(&self) -> AgentState {
        self.states[0]
    }

    pub fn last(&self) -> AgentState {
        *self.states.last().expect("nonempty path")
    }

    /// Pose at `t`, padded with the final state.
    #[inline]
    pub fn at(&self, t: u32) -> AgentState {
        self.states[(t as usize).min(self.states.len() - 1)]
    }

    #[inline]
    pub fn cell_at(&self, t: u32) -> Cell {
        self.at(t).cell
    }

    /// Arrival time at the final goal, if it was visited.
    pub fn arrival(&self) -> Option<u32> {
        self.goal_visit_times.last().copied()
    }

    /// Cell sequence with consecutive repeats removed.
    pub fn route(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = Vec::with_capacity(self.states.len());
        for s in &self.states {
            if out.last() != Some(&s.cell) {
                out.push(s.cell);
            }
        }
        out
    }

    /// Keep timesteps `0..=t`.
    pub fn truncate(&mut self, t: u32) {
        self.states.truncate(t as usize + 1);
        self.goal_visit_times.retain(|&v| v <= t);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanStatus {
    Success,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConflictKind {
    Vertex,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConflictLocation {
    Vertex(Cell),
    /// The first agent moves from the first cell to the second.
    Edge(Cell, Cell),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Conflict {
    pub kind: ConflictKind,
    /// Ordered so that `agents.0 < agents.1`.
    pub agents: (usize, usize),
    pub location: ConflictLocation,
    /// Arrival timestep at which the collision happens.
    pub timestep: u32,
}

impl Conflict {
    pub fn sort_key(&self) -> (u32, usize, usize, ConflictKind, ConflictLocation) {
        (
            self.timestep,
            self.agents.0,
            self.agents.1,
            self.kind,
            self.location,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub status: PlanStatus,
    pub paths: Vec<Path>,
    pub conflicts: Vec<Conflict>,
}

impl Plan {
    pub fn success(paths: Vec<Path>) -> Self {
        Plan {
            status: PlanStatus::Success,
            paths,
            conflicts: Vec::new(),
        }
    }

    pub fn failed(paths: Vec<Path>, conflicts: Vec<Conflict>) -> Self {
        Plan {
            status: PlanStatus::Failed,
            paths,
            conflicts,
        }
    }

    pub fn is_success(&self) -> bool {
        self.status == PlanStatus::Success
    }

    /// Standard: per agent, the timestep after which it never leaves its final
    /// cell. Transient: the final-goal arrival time.
    pub fn sum_of_costs(&self, semantics: Semantics) -> u64 {
        self.paths
            .iter()
            .map(|p| match semantics {
                Semantics::Standard => p.settle_time(),
                Semantics::Transient => p.arrival().unwrap_or(p.len()),
            } as u64)
            .sum()
    }
}

impl Path {
    /// First timestep from which the agent stays at its final cell.
    pub fn settle_time(&self) -> u32 {
        let last = self.last().cell;
        self.states
            .iter()
            .rposition(|s| s.cell != last)
            .map_or(0, |i| i as u32 + 1)
    }
}
