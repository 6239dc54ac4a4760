use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::{Cell, CellKind, GridMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GoalError {
    #[error("no eligible goal cell for agent {agent}")]
    NoEligibleCells { agent: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalMode {
    /// Alternate between workstations and endpoints.
    WorkstationEndpointAlternating,
    /// Any traversable cell other than the agent's current one.
    UniformFree,
}

impl GoalMode {
    /// Alternating when the map has both workstations and endpoints.
    pub fn for_map(map: &GridMap) -> Self {
        if map.count(CellKind::Workstation) > 0 && map.count(CellKind::Endpoint) > 0 {
            GoalMode::WorkstationEndpointAlternating
        } else {
            GoalMode::UniformFree
        }
    }
}

/// Random goal assigner with its own rng stream.
#[derive(Debug, Clone)]
pub struct GoalStream {
    rng: ChaCha8Rng,
    mode: GoalMode,
    /// Kind of each agent's last goal; agents start as if they just left a workstation.
    last_kind: Vec<CellKind>,
    workstations: Vec<Cell>,
    endpoints: Vec<Cell>,
    free: Vec<Cell>,
}

impl GoalStream {
    pub fn new(map: &GridMap, mode: GoalMode, num_agents: usize, seed: u64) -> Self {
        GoalStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            mode,
            last_kind: vec![CellKind::Workstation; num_agents],
            workstations: map.cells_of_kind(CellKind::Workstation),
            endpoints: map.cells_of_kind(CellKind::Endpoint),
            free: map.traversable_cells().collect(),
        }
    }

    pub fn mode(&self) -> GoalMode {
        self.mode
    }

    fn pick(&mut self, pool_kind: Option<CellKind>, current: Cell, agent: usize) -> Result<Cell, GoalError> {
        let pool = match pool_kind {
            Some(CellKind::Workstation) => &self.workstations,
            Some(CellKind::Endpoint) => &self.endpoints,
            _ => &self.free,
        };
        let eligible = pool.len() - usize::from(pool.contains(&current));
        if eligible == 0 {
            return Err(GoalError::NoEligibleCells { agent });
        }
        loop {
            let c = pool[self.rng.random_range(0..pool.len())];
            if c != current {
                return Ok(c);
            }
        }
    }

    pub fn next_goal(&mut self, agent: usize, current: Cell) -> Result<Cell, GoalError> {
        match self.mode {
            GoalMode::UniformFree => self.pick(None, current, agent),
            GoalMode::WorkstationEndpointAlternating => {
                let kind = if self.last_kind[agent] == CellKind::Workstation {
                    CellKind::Endpoint
                } else {
                    CellKind::Workstation
                };
                let g = self.pick(Some(kind), current, agent)?;
                self.last_kind[agent] = kind;
                Ok(g)
            }
        }
    }
}

/// Per-agent queues of original (throughput-counting) goals.
#[derive(Debug, Clone)]
pub struct GoalBook {
    queues: Vec<VecDeque<Cell>>,
}

impl GoalBook {
    pub fn new(num_agents: usize) -> Self {
        GoalBook {
            queues: vec![VecDeque::new(); num_agents],
        }
    }

    /// The goal the agent is currently heading for, drawing one if needed.
    pub fn current(&mut self, agent: usize, at: Cell, stream: &mut GoalStream) -> Result<Cell, GoalError> {
        self.ensure(agent, 1, at, stream)?;
        Ok(self.queues[agent][0])
    }

    pub fn peek(&self, agent: usize) -> Option<Cell> {
        self.queues[agent].front().copied()
    }

    /// Make sure at least `count` goals are queued.
    pub fn ensure(&mut self, agent: usize, count: usize, at: Cell, stream: &mut GoalStream) -> Result<(), GoalError> {
        while self.queues[agent].len() < count {
            let from = self.queues[agent].back().copied().unwrap_or(at);
            let g = stream.next_goal(agent, from)?;
            self.queues[agent].push_back(g);
        }
        Ok(())
    }

    pub fn queued(&self, agent: usize) -> &VecDeque<Cell> {
        &self.queues[agent]
    }

    /// Queue a specific goal behind the existing ones.
    pub fn push(&mut self, agent: usize, goal: Cell) {
        self.queues[agent].push_back(goal);
    }

    /// Drop the current goal after it has been reached.
    pub fn complete(&mut self, agent: usize) -> Option<Cell> {
        self.queues[agent].pop_front()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{parse_map, Dialect};

    #[test]
    fn alternates_between_kinds() {
        let map = parse_map("type octile\nheight 2\nwidth 4\nmap\nw..e\nw..e\n", Dialect::Warehouse).unwrap();
        let mut s = GoalStream::new(&map, GoalMode::for_map(&map), 1, 1);
        assert_eq!(s.mode(), GoalMode::WorkstationEndpointAlternating);
        let mut at = Cell::new(0, 1);
        for k in 0..10 {
            let g = s.next_goal(0, at).unwrap();
            let want = if k % 2 == 0 { CellKind::Endpoint } else { CellKind::Workstation };
            assert_eq!(map.kind(g), want);
            at = g;
        }
    }

    #[test]
    fn single_cell_map_has_no_goal() {
        let map = parse_map("type octile\nheight 1\nwidth 2\nmap\n.@\n", Dialect::Movingai).unwrap();
        let mut s = GoalStream::new(&map, GoalMode::UniformFree, 1, 0);
        assert_eq!(s.next_goal(0, Cell::new(0, 0)), Err(GoalError::NoEligibleCells { agent: 0 }));
    }

    #[test]
    fn seeded_sequences_repeat() {
        let map = GridMap::empty(8, 8);
        let draw = || {
            let mut s = GoalStream::new(&map, GoalMode::UniformFree, 2, 42);
            (0..20).map(|i| s.next_goal(i % 2, Cell::new(0, 0)).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }
}
