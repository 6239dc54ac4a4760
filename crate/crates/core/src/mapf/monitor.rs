use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use crate::gridmap::Cell;

/// One agent's stay on a cell over the half-open interval `[enter, exit)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occupancy {
    pub agent: usize,
    pub enter: f64,
    pub exit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub cell: Cell,
    pub first: Occupancy,
    pub second: Occupancy,
}

/// Per-cell occupancy intervals collected during execution.
#[derive(Debug, Clone, Default)]
pub struct OccupancyLog {
    closed: BTreeMap<Cell, Vec<Occupancy>>,
    open: FxHashMap<(usize, Cell), f64>,
}

impl OccupancyLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Start occupying `cell`. Re-entering a cell the agent already holds is a no-op.
    pub fn enter(&mut self, agent: usize, cell: Cell, t: f64) {
        self.open.entry((agent, cell)).or_insert(t);
    }

    pub fn exit(&mut self, agent: usize, cell: Cell, t: f64) {
        if let Some(enter) = self.open.remove(&(agent, cell)) {
            self.closed.entry(cell).or_default().push(Occupancy {
                agent,
                enter,
                exit: t,
            });
        }
    }

    /// Close every open interval at time `t`.
    pub fn close_all(&mut self, t: f64) {
        let mut open: Vec<_> = self.open.drain().collect();
        open.sort_by_key(|a| a.0);
        for ((agent, cell), enter) in open {
            self.closed.entry(cell).or_default().push(Occupancy {
                agent,
                enter,
                exit: t,
            });
        }
    }

    pub fn record(&mut self, cell: Cell, occupancy: Occupancy) {
        self.closed.entry(cell).or_default().push(occupancy);
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Cell, &Vec<Occupancy>)> {
        self.closed.iter()
    }

    pub fn num_intervals(&self) -> usize {
        self.closed.values().map(Vec::len).sum()
    }
}

/// Pairs of distinct agents whose intervals on the same cell overlap.
pub fn monitor_execution(log: &OccupancyLog) -> Vec<Violation> {
    let mut violations = Vec::new();
    for (&cell, intervals) in log.cells() {
        let mut sorted = intervals.clone();
        sorted.sort_by(|a, b| a.enter.total_cmp(&b.enter).then(a.agent.cmp(&b.agent)));
        let mut active: Vec<Occupancy> = Vec::new();
        for occ in sorted {
            active.retain(|a| a.exit > occ.enter);
            for a in &active {
                if a.agent != occ.agent && occ.exit > occ.enter && a.exit > a.enter {
                    violations.push(Violation {
                        cell,
                        first: *a,
                        second: occ,
                    });
                }
            }
            active.push(occ);
        }
    }
    violations
}
