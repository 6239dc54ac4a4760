//! Single-agent space-time A* over reserved vertices and edges.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use super::{AgentState, Path, PlanModel, Semantics, Window};
use crate::gridmap::{Cell, DistanceOracle, GridMap, Orientation, UNREACHABLE};

/// Node expansions allowed in one low-level call.
pub const DEFAULT_EXPANSION_CAP: u64 = 200_000;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum SearchError {
    #[error("no path satisfies the constraints")]
    NoPath,
    #[error("node expansion cap exceeded")]
    ExpansionCapExceeded,
    #[error("planner expansion budget exhausted")]
    BudgetExhausted,
}

/// Deterministic stand-in for a wall-clock limit: a per-call expansion cap plus
/// an optional total shared by every call of one planner invocation.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    pub per_call_cap: u64,
    remaining: Option<u64>,
    used: u64,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        SearchBudget {
            per_call_cap: DEFAULT_EXPANSION_CAP,
            remaining: None,
            used: 0,
        }
    }

    pub fn with_total(per_call_cap: u64, total: u64) -> Self {
        SearchBudget {
            per_call_cap,
            remaining: Some(total),
            used: 0,
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn exhausted(&self) -> bool {
        self.remaining == Some(0)
    }

    #[inline]
    fn charge(&mut self) -> Result<(), SearchError> {
        if let Some(r) = self.remaining.as_mut() {
            if *r == 0 {
                return Err(SearchError::BudgetExhausted);
            }
            *r -= 1;
        }
        self.used += 1;
        Ok(())
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self::unlimited()
    }
}

#[inline]
fn vertex_key(cell: u32, t: u32) -> u64 {
    ((cell as u64) << 32) | t as u64
}

#[inline]
fn edge_key(from: u32, to: u32, t: u32) -> u64 {
    debug_assert!(from < (1 << 20) && to < (1 << 20) && t < (1 << 24));
    ((from as u64) << 44) | ((to as u64) << 24) | t as u64
}

/// Space-time occupancy of already planned agents.
#[derive(Debug, Clone, Default)]
pub struct ReservationTable {
    vertex: FxHashSet<u64>,
    /// Forbidden (from, to, arrival) moves: the reverse of a reserved move.
    edge: FxHashSet<u64>,
    /// Cells held forever from the given timestep on.
    parked: FxHashMap<u32, u32>,
    last_occupied: FxHashMap<u32, u32>,
    max_time: u32,
}

impl ReservationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex.is_empty() && self.parked.is_empty()
    }

    /// Reserve a path. Under standard semantics its final cell stays reserved forever.
    pub fn add_path(&mut self, map: &GridMap, path: &Path, semantics: Semantics) {
        let mut prev: Option<u32> = None;
        for (t, s) in path.states.iter().enumerate() {
            let t = t as u32;
            let c = map.index(s.cell) as u32;
            self.vertex.insert(vertex_key(c, t));
            let lo = self.last_occupied.entry(c).or_insert(t);
            *lo = (*lo).max(t);
            if let Some(p) = prev {
                if p != c {
                    self.edge.insert(edge_key(c, p, t));
                }
            }
            prev = Some(c);
        }
        self.max_time = self.max_time.max(path.len());
        if semantics == Semantics::Standard {
            let c = map.index(path.last().cell) as u32;
            let p = self.parked.entry(c).or_insert(path.len());
            *p = (*p).min(path.len());
        }
    }

    pub fn max_time(&self) -> u32 {
        self.max_time
    }

    #[inline]
    fn vertex_blocked(&self, cell: u32, t: u32) -> bool {
        self.vertex.contains(&vertex_key(cell, t))
            || self.parked.get(&cell).is_some_and(|&p| p <= t)
    }

    #[inline]
    fn edge_blocked(&self, from: u32, to: u32, t: u32) -> bool {
        self.edge.contains(&edge_key(from, to, t))
    }

    #[inline]
    fn parked_blocked(&self, cell: u32, t: u32) -> bool {
        self.parked.get(&cell).is_some_and(|&p| p <= t)
    }

    /// Whether an agent may stop at `cell` at `t` and remain there, considering
    /// reservations up to `until` (inclusive; `None` = forever).
    fn can_settle(&self, cell: u32, t: u32, until: Option<u32>) -> bool {
        match until {
            None => {
                !self.parked.contains_key(&cell)
                    && self.last_occupied.get(&cell).is_none_or(|&lo| lo < t)
            }
            Some(w) => (t + 1..=w).all(|tt| !self.vertex_blocked(cell, tt)),
        }
    }
}

/// One low-level planning request.
#[derive(Debug, Clone, Copy)]
pub struct LowLevelQuery<'a> {
    pub start: AgentState,
    pub goals: &'a [Cell],
    pub model: PlanModel,
    pub window: Window,
    pub semantics: Semantics,
    /// Transient semantics: the path extends to this timestep after its last goal.
    pub horizon: u32,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    cell: u32,
    heading: Orientation,
    goal: u16,
    t: u32,
    aux: u32,
    arrival: u32,
    /// Heading changes so far; ties prefer straighter paths.
    turns: u32,
    parent: u32,
}

type OpenEntry = Reverse<(u32, Reverse<u32>, u32, u32, u64, u32)>;

struct Search<'a> {
    oracle: &'a DistanceOracle,
    map: &'a GridMap,
    q: LowLevelQuery<'a>,
    suffix: Vec<u32>,
    constraint_end: u32,
}

impl<'a> Search<'a> {
    fn leg(&self, cell: u32, heading: Orientation, goal: usize) -> u32 {
        let g = self.q.goals[goal];
        match self.q.model {
            PlanModel::Pebble => self.oracle.pebble(g).at(cell as usize),
            PlanModel::Rotation => self.oracle.rotation(g).at(cell as usize, heading),
        }
    }

    fn h(&self, cell: u32, heading: Orientation, goal: usize) -> u32 {
        let n = self.q.goals.len();
        if goal < n {
            let d = self.leg(cell, heading, goal);
            if d == UNREACHABLE {
                return UNREACHABLE;
            }
            d + self.suffix[goal]
        } else if self.q.semantics == Semantics::Standard {
            self.leg(cell, heading, n - 1)
        } else {
            0
        }
    }

    fn state_key(&self, n: &Node) -> u64 {
        let heading = match self.q.model {
            PlanModel::Pebble => 0,
            PlanModel::Rotation => n.heading.index() as u64,
        };
        ((n.cell as u64) << 24) | (heading << 16) | n.goal as u64
    }

    fn closed_key(&self, n: &Node) -> (u64, u32) {
        (self.state_key(n), n.t.min(self.constraint_end + 1))
    }

    fn advance_goals(&self, cell: u32, mut goal: usize) -> usize {
        while goal < self.q.goals.len() && self.map.index(self.q.goals[goal]) as u32 == cell {
            goal += 1;
        }
        goal
    }

    fn f(&self, n: &Node) -> u32 {
        let done = n.goal as usize == self.q.goals.len();
        match (done, self.q.semantics) {
            (true, Semantics::Transient) => n.arrival,
            _ => n.t.saturating_add(self.h(n.cell, n.heading, n.goal as usize)),
        }
    }

    /// Moves available from a pose: (cell, heading, is_wait).
    fn successors(&self, cell: u32, heading: Orientation) -> Vec<(u32, Orientation, bool)> {
        let here = self.map.cell(cell as usize);
        let mut out = vec![(cell, heading, true)];
        match self.q.model {
            PlanModel::Pebble => {
                for o in Orientation::ALL {
                    if let Some(n) = self.map.step(here, o) {
                        if self.map.is_traversable(n) {
                            out.push((self.map.index(n) as u32, o, false));
                        }
                    }
                }
            }
            PlanModel::Rotation => {
                if let Some(n) = self.map.step(here, heading) {
                    if self.map.is_traversable(n) {
                        out.push((self.map.index(n) as u32, heading, false));
                    }
                }
                out.push((cell, heading.clockwise(), false));
                out.push((cell, heading.counter_clockwise(), false));
            }
        }
        out
    }

    /// Unconstrained shortest completion through the remaining goals.
    fn greedy_tail(&self, mut cell: u32, mut heading: Orientation, mut goal: usize) -> Vec<AgentState> {
        let mut tail = Vec::new();
        while goal < self.q.goals.len() {
            let d = self.leg(cell, heading, goal);
            let (nc, nh, _) = self
                .successors(cell, heading)
                .into_iter()
                .filter(|&(c, h, wait)| !wait && self.leg(c, h, goal) + 1 == d)
                .min_by_key(|&(_, h, _)| h != heading)
                .expect("distance table admits a descent");
            cell = nc;
            heading = nh;
            tail.push(AgentState::new(self.map.cell(cell as usize), heading));
            goal = self.advance_goals(cell, goal);
        }
        tail
    }

    fn reconstruct(&self, nodes: &[Node], mut idx: usize) -> Vec<AgentState> {
        let mut states = Vec::new();
        loop {
            let n = nodes[idx];
            states.push(AgentState::new(self.map.cell(n.cell as usize), n.heading));
            if n.parent == u32::MAX {
                break;
            }
            idx = n.parent as usize;
        }
        states.reverse();
        states
    }

    fn finish(&self, mut states: Vec<AgentState>, pad_to_horizon: bool) -> Path {
        if pad_to_horizon {
            let last = *states.last().expect("nonempty");
            while (states.len() as u32) <= self.q.horizon {
                states.push(last);
            }
        }
        Path::new(states, self.q.goals)
    }
}

/// Minimal-arrival path visiting `query.goals` in order while avoiding the
/// reservations at timesteps covered by the query window.
pub fn space_time_astar(
    oracle: &DistanceOracle,
    query: LowLevelQuery<'_>,
    reservations: &ReservationTable,
    budget: &mut SearchBudget,
) -> Result<Path, SearchError> {
    let map = oracle.map();
    let n_goals = query.goals.len();
    let mut suffix = vec![0u32; n_goals + 1];
    for k in (0..n_goals.saturating_sub(1)).rev() {
        let d = oracle
            .distance(query.goals[k], query.goals[k + 1])
            .ok_or(SearchError::NoPath)?;
        suffix[k] = suffix[k + 1] + d;
    }
    let constraint_end = match query.window {
        Window::Unbounded => reservations.max_time(),
        Window::Steps(w) => reservations.max_time().min(w),
    };
    let search = Search {
        oracle,
        map,
        q: query,
        suffix,
        constraint_end,
    };
    let transient = query.semantics == Semantics::Transient;
    let start_cell = map.index(query.start.cell) as u32;
    let start_goal = search.advance_goals(start_cell, 0);
    let root = Node {
        cell: start_cell,
        heading: query.start.heading,
        goal: start_goal as u16,
        t: 0,
        aux: 0,
        arrival: 0,
        turns: 0,
        parent: u32::MAX,
    };
    if search.f(&root) == u32::MAX || search.h(start_cell, root.heading, start_goal) == UNREACHABLE {
        return Err(SearchError::NoPath);
    }

    let mut nodes = vec![root];
    let mut open: BinaryHeap<OpenEntry> = BinaryHeap::new();
    let mut closed: FxHashSet<(u64, u32)> = FxHashSet::default();
    open.push(Reverse((search.f(&root), Reverse(0), 0, 0, search.state_key(&root), 0)));
    let mut expansions = 0u64;

    while let Some(Reverse((_, _, _, _, _, idx))) = open.pop() {
        let node = nodes[idx as usize];
        if !closed.insert(search.closed_key(&node)) {
            continue;
        }
        expansions += 1;
        if expansions > budget.per_call_cap {
            return Err(SearchError::ExpansionCapExceeded);
        }
        budget.charge()?;

        let done = node.goal as usize == n_goals;
        // beyond the window every remaining move is unconstrained
        if let Window::Steps(w) = query.window {
            if node.t >= w {
                let mut states = search.reconstruct(&nodes, idx as usize);
                states.extend(search.greedy_tail(node.cell, node.heading, node.goal as usize));
                return Ok(search.finish(states, transient));
            }
        }
        if done {
            match query.semantics {
                Semantics::Standard => {
                    let at_goal = map.index(query.goals[n_goals - 1]) as u32 == node.cell;
                    if at_goal && reservations.can_settle(node.cell, node.t, query.window.steps()) {
                        return Ok(search.finish(search.reconstruct(&nodes, idx as usize), false));
                    }
                }
                Semantics::Transient => {
                    if node.t >= query.horizon
                        || (node.t > constraint_end && !reservations.parked_blocked(node.cell, node.t))
                    {
                        return Ok(search.finish(search.reconstruct(&nodes, idx as usize), true));
                    }
                }
            }
        }

        let t = node.t + 1;
        let constrained = query.window.covers(t);
        for (cell, heading, wait) in search.successors(node.cell, node.heading) {
            if constrained {
                if reservations.vertex_blocked(cell, t) {
                    continue;
                }
                if cell != node.cell && reservations.edge_blocked(node.cell, cell, t) {
                    continue;
                }
            }
            let goal = search.advance_goals(cell, node.goal as usize);
            let reached_now = goal == n_goals && (node.goal as usize) < n_goals;
            let child = Node {
                cell,
                heading,
                goal: goal as u16,
                t,
                aux: if done && !wait { node.aux + 1 } else { node.aux },
                arrival: if reached_now { t } else { node.arrival },
                turns: node.turns + u32::from(!wait && heading != node.heading),
                parent: idx,
            };
            let f = search.f(&child);
            if f == u32::MAX || (goal < n_goals && search.h(cell, heading, goal) == UNREACHABLE) {
                continue;
            }
            if closed.contains(&search.closed_key(&child)) {
                continue;
            }
            let key = search.state_key(&child);
            nodes.push(child);
            open.push(Reverse((f, Reverse(t), child.aux, child.turns, key, (nodes.len() - 1) as u32)));
        }
    }
    Err(SearchError::NoPath)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn oracle(map: GridMap) -> DistanceOracle {
        DistanceOracle::new(Arc::new(map))
    }

    fn query(start: Cell, heading: Orientation, goals: &[Cell], model: PlanModel) -> LowLevelQuery<'_> {
        LowLevelQuery {
            start: AgentState::new(start, heading),
            goals,
            model,
            window: Window::Unbounded,
            semantics: Semantics::Standard,
            horizon: 0,
        }
    }

    fn cells(p: &Path) -> Vec<Cell> {
        p.states.iter().map(|s| s.cell).collect()
    }

    #[test]
    fn straight_line() {
        let o = oracle(GridMap::empty(4, 4));
        let goals = [Cell::new(0, 3)];
        let p = space_time_astar(
            &o,
            query(Cell::new(0, 0), Orientation::North, &goals, PlanModel::Pebble),
            &ReservationTable::new(),
            &mut SearchBudget::unlimited(),
        )
        .unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.goal_visit_times, vec![3]);
    }

    #[test]
    fn vertex_reservation_forces_detour_or_wait() {
        let o = oracle(GridMap::empty(4, 4));
        let mut res = ReservationTable::new();
        // another agent sits on (0,1) only at t=1
        let blocker = Path::new(
            vec![
                AgentState::new(Cell::new(1, 1), Orientation::North),
                AgentState::new(Cell::new(0, 1), Orientation::North),
                AgentState::new(Cell::new(1, 1), Orientation::South),
            ],
            &[],
        );
        res.add_path(o.map(), &blocker, Semantics::Transient);
        let goals = [Cell::new(0, 3)];
        let p = space_time_astar(
            &o,
            query(Cell::new(0, 0), Orientation::North, &goals, PlanModel::Pebble),
            &res,
            &mut SearchBudget::unlimited(),
        )
        .unwrap();
        assert_eq!(p.arrival(), Some(4));
        assert_ne!(p.cell_at(1), Cell::new(0, 1));
    }

    #[test]
    fn rotation_model_turns_first() {
        let o = oracle(GridMap::empty(4, 4));
        let goals = [Cell::new(0, 1)];
        let p = space_time_astar(
            &o,
            query(Cell::new(0, 0), Orientation::North, &goals, PlanModel::Rotation),
            &ReservationTable::new(),
            &mut SearchBudget::unlimited(),
        )
        .unwrap();
        assert_eq!(p.arrival(), Some(2));
        assert_eq!(p.states[1], AgentState::new(Cell::new(0, 0), Orientation::East));
    }

    #[test]
    fn standard_goal_must_stay_free() {
        // goal (0,1) is crossed by a reserved path at t=3; arrival must come after
        let o = oracle(GridMap::empty(3, 3));
        let mut res = ReservationTable::new();
        let crosser = Path::new(
            [(2, 1), (2, 1), (1, 1), (0, 1), (0, 2)]
                .iter()
                .map(|&(r, c)| AgentState::new(Cell::new(r, c), Orientation::North))
                .collect(),
            &[],
        );
        res.add_path(o.map(), &crosser, Semantics::Standard);
        let goals = [Cell::new(0, 1)];
        let p = space_time_astar(
            &o,
            query(Cell::new(0, 0), Orientation::North, &goals, PlanModel::Pebble),
            &res,
            &mut SearchBudget::unlimited(),
        )
        .unwrap();
        assert!(p.len() > 3, "{:?}", cells(&p));
        assert_eq!(p.last().cell, Cell::new(0, 1));
    }

    #[test]
    fn parked_agent_blocks_corridor() {
        let map = crate::gridmap::parse_map(
            "type octile\nheight 1\nwidth 3\nmap\n...\n",
            crate::gridmap::Dialect::Movingai,
        )
        .unwrap();
        let o = oracle(map);
        let mut res = ReservationTable::new();
        res.add_path(
            o.map(),
            &Path::stationary(AgentState::new(Cell::new(0, 1), Orientation::North), 0),
            Semantics::Standard,
        );
        let goals = [Cell::new(0, 2)];
        let r = space_time_astar(
            &o,
            query(Cell::new(0, 0), Orientation::North, &goals, PlanModel::Pebble),
            &res,
            &mut SearchBudget::unlimited(),
        );
        assert_eq!(r, Err(SearchError::NoPath));
    }

    #[test]
    fn transient_extends_to_horizon() {
        let o = oracle(GridMap::empty(4, 4));
        let goals = [Cell::new(0, 2)];
        let mut q = query(Cell::new(0, 0), Orientation::North, &goals, PlanModel::Pebble);
        q.semantics = Semantics::Transient;
        q.horizon = 6;
        let p = space_time_astar(&o, q, &ReservationTable::new(), &mut SearchBudget::unlimited()).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p.arrival(), Some(2));
        assert!(p.states[2..].iter().all(|s| s.cell == Cell::new(0, 2)));
    }

    #[test]
    fn multi_goal_order() {
        let o = oracle(GridMap::empty(5, 5));
        let goals = [Cell::new(0, 4), Cell::new(4, 4)];
        let p = space_time_astar(
            &o,
            query(Cell::new(0, 0), Orientation::North, &goals, PlanModel::Pebble),
            &ReservationTable::new(),
            &mut SearchBudget::unlimited(),
        )
        .unwrap();
        assert_eq!(p.goal_visit_times, vec![4, 8]);
    }

    #[test]
    fn budget_exhaustion() {
        let o = oracle(GridMap::empty(8, 8));
        let goals = [Cell::new(7, 7)];
        let mut budget = SearchBudget::with_total(DEFAULT_EXPANSION_CAP, 3);
        let r = space_time_astar(
            &o,
            query(Cell::new(0, 0), Orientation::North, &goals, PlanModel::Pebble),
            &ReservationTable::new(),
            &mut budget,
        );
        assert_eq!(r, Err(SearchError::BudgetExhausted));
        let mut capped = SearchBudget { per_call_cap: 2, ..SearchBudget::unlimited() };
        let r = space_time_astar(
            &o,
            query(Cell::new(0, 0), Orientation::North, &goals, PlanModel::Pebble),
            &ReservationTable::new(),
            &mut capped,
        );
        assert_eq!(r, Err(SearchError::ExpansionCapExceeded));
    }
}
