//! Action dependency graph: per-agent action sequences plus the passing order
//! at every shared cell.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::gridmap::{Cell, Orientation};
use crate::mapf::{AgentState, Path};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActionKind {
    /// In-place turn by 90 or 180 degrees.
    Rotate { from: Orientation, to: Orientation },
    MoveForward { from: Cell, to: Cell },
}

impl ActionKind {
    /// Rotation angle in degrees (0 for moves).
    pub fn angle_deg(&self) -> f64 {
        match *self {
            ActionKind::Rotate { from, to } => 90.0 * from.quarter_turns_to(to).unsigned_abs() as f64,
            ActionKind::MoveForward { .. } => 0.0,
        }
    }

    pub fn is_move(&self) -> bool {
        matches!(self, ActionKind::MoveForward { .. })
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ActionKind::Rotate { from, to } => write!(f, "R{}{}", from.letter(), to.letter()),
            ActionKind::MoveForward { from, to } => write!(f, "M{from}{to}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionStatus {
    Pending,
    Released,
    InProgress,
    Completed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId {
    pub agent: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub agent: usize,
    pub index: usize,
    pub kind: ActionKind,
    /// Timestep of the source path at which this action ends.
    pub planned_enter: u32,
    /// Merge generation that produced the action.
    pub epoch: u32,
    pub status: ActionStatus,
    /// Pose once the action is done.
    pub end: AgentState,
    /// Actions of other agents that must complete before this one is released.
    pub deps: Vec<ActionId>,
}

impl Action {
    pub fn id(&self) -> ActionId {
        ActionId {
            agent: self.agent,
            index: self.index,
        }
    }
}

/// A template action produced from a path, before it joins a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannedAction {
    pub kind: ActionKind,
    pub planned_enter: u32,
    pub end: AgentState,
}

/// Convert a path into rotate/move actions. Waits are dropped; a pebble move
/// in a new direction is preceded by the rotation that faces it.
pub fn actions_from_path(path: &Path, entry: Orientation) -> Vec<PlannedAction> {
    let mut out = Vec::new();
    let mut heading = entry;
    for (t, w) in path.states.windows(2).enumerate() {
        let t = t as u32 + 1;
        let (prev, cur) = (w[0], w[1]);
        if prev.cell != cur.cell {
            let dir = Orientation::between(prev.cell, cur.cell).expect("path steps between adjacent cells");
            if heading != dir {
                out.push(PlannedAction {
                    kind: ActionKind::Rotate { from: heading, to: dir },
                    planned_enter: t,
                    end: AgentState::new(prev.cell, dir),
                });
                heading = dir;
            }
            out.push(PlannedAction {
                kind: ActionKind::MoveForward {
                    from: prev.cell,
                    to: cur.cell,
                },
                planned_enter: t,
                end: AgentState::new(cur.cell, heading),
            });
        } else if cur.heading != prev.heading && cur.heading != heading {
            // rotation-model primitive
            out.push(PlannedAction {
                kind: ActionKind::Rotate {
                    from: heading,
                    to: cur.heading,
                },
                planned_enter: t,
                end: AgentState::new(cur.cell, cur.heading),
            });
            heading = cur.heading;
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdgError {
    #[error("dependency cycle through agent {agent} action {index}")]
    CyclicDependencies { agent: usize, index: usize },
    #[error("agent {agent} plan starts at {found} but the cut projects {expected}")]
    StartMismatch {
        agent: usize,
        expected: AgentState,
        found: AgentState,
    },
    #[error("agent {entering} enters {cell} where agent {parked} stays for good")]
    EntersParkedCell {
        cell: Cell,
        parked: usize,
        entering: usize,
    },
    #[error("agent {agent} action {index} completed out of order")]
    OutOfOrderCompletion { agent: usize, index: usize },
    #[error("plan covers {found} agents, graph has {expected}")]
    AgentCountMismatch { expected: usize, found: usize },
}

/// Committed prefix per agent and the poses the next instance starts from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitCut {
    /// Number of actions (from the start of the sequence) that are committed.
    pub committed: Vec<usize>,
    pub starts: Vec<AgentState>,
}

#[derive(Debug, Clone)]
struct AgentLane {
    origin: AgentState,
    actions: Vec<Action>,
    completed: usize,
    released: usize,
}

impl AgentLane {
    fn pose_after(&self, k: usize) -> AgentState {
        if k == 0 {
            self.origin
        } else {
            self.actions[k - 1].end
        }
    }
}

#[derive(Debug, Clone)]
pub struct ActionGraph {
    lanes: Vec<AgentLane>,
    epoch: u32,
    /// Release limits installed by a commit cut until the next merge.
    frozen: Option<Vec<usize>>,
}

/// A stay of one agent on one cell, bounded by the moves entering and leaving it.
#[derive(Debug, Clone, Copy)]
struct Episode {
    key: (u32, u32, usize),
    agent: usize,
    enter: Option<usize>,
    vacate: Option<usize>,
}

impl ActionGraph {
    pub fn new(starts: &[AgentState]) -> Self {
        ActionGraph {
            lanes: starts
                .iter()
                .map(|&origin| AgentLane {
                    origin,
                    actions: Vec::new(),
                    completed: 0,
                    released: 0,
                })
                .collect(),
            epoch: 0,
            frozen: None,
        }
    }

    pub fn num_agents(&self) -> usize {
        self.lanes.len()
    }

    pub fn epoch(&self) -> u32 {
        self.epoch
    }

    pub fn actions(&self, agent: usize) -> &[Action] {
        &self.lanes[agent].actions
    }

    pub fn action(&self, id: ActionId) -> &Action {
        &self.lanes[id.agent].actions[id.index]
    }

    pub fn completed(&self, agent: usize) -> usize {
        self.lanes[agent].completed
    }

    pub fn released(&self, agent: usize) -> usize {
        self.lanes[agent].released
    }

    /// Actions not yet completed.
    pub fn remaining(&self, agent: usize) -> usize {
        let l = &self.lanes[agent];
        l.actions.len() - l.completed
    }

    /// Pose after the completed prefix.
    pub fn current_pose(&self, agent: usize) -> AgentState {
        let l = &self.lanes[agent];
        l.pose_after(l.completed)
    }

    pub fn pose_after(&self, agent: usize, k: usize) -> AgentState {
        self.lanes[agent].pose_after(k)
    }

    /// Every inter-agent edge as (source, target).
    pub fn edges(&self) -> Vec<(ActionId, ActionId)> {
        let mut out = Vec::new();
        for l in &self.lanes {
            for a in &l.actions[l.completed..] {
                for &d in &a.deps {
                    out.push((d, a.id()));
                }
            }
        }
        out
    }

    /// Commit the next `lookahead` open actions per agent (never less than what
    /// is already released), then close the prefix under dependencies.
    pub fn commit_cut(&self, lookahead: usize) -> CommitCut {
        let mut committed: Vec<usize> = self
            .lanes
            .iter()
            .map(|l| (l.completed + lookahead).max(l.released).min(l.actions.len()))
            .collect();
        let mut scanned: Vec<usize> = self.lanes.iter().map(|l| l.completed).collect();
        loop {
            let mut changed = false;
            for a in 0..self.lanes.len() {
                while scanned[a] < committed[a] {
                    for d in &self.lanes[a].actions[scanned[a]].deps {
                        if d.index >= committed[d.agent] {
                            committed[d.agent] = d.index + 1;
                            changed = true;
                        }
                    }
                    scanned[a] += 1;
                }
            }
            if !changed {
                break;
            }
        }
        for (a, l) in self.lanes.iter().enumerate() {
            let extra = committed[a] - (l.completed + lookahead).max(l.released).min(l.actions.len());
            if lookahead > 0 && extra > 4 * lookahead {
                log::warn!("commit closure grew agent {a} by {extra} actions beyond its lookahead of {lookahead}");
            }
        }
        let starts = committed
            .iter()
            .enumerate()
            .map(|(a, &k)| self.lanes[a].pose_after(k))
            .collect();
        CommitCut { committed, starts }
    }

    /// Hold releases at the cut until the next merge.
    pub fn freeze(&mut self, cut: &CommitCut) {
        self.frozen = Some(cut.committed.clone());
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen.is_some()
    }

    /// Replace everything past the cut with the new paths and rebuild the
    /// passing order at every cell.
    pub fn merge_plan(&mut self, cut: &CommitCut, paths: &[Path]) -> Result<(), AdgError> {
        if paths.len() != self.lanes.len() {
            return Err(AdgError::AgentCountMismatch {
                expected: self.lanes.len(),
                found: paths.len(),
            });
        }
        for (a, p) in paths.iter().enumerate() {
            let expected = cut.starts[a];
            let found = p.start();
            if expected.cell != found.cell || expected.heading != found.heading {
                return Err(AdgError::StartMismatch { agent: a, expected, found });
            }
        }
        self.epoch += 1;
        for (a, p) in paths.iter().enumerate() {
            let lane = &mut self.lanes[a];
            debug_assert!(cut.committed[a] >= lane.released);
            lane.actions.truncate(cut.committed[a]);
            let base = lane.actions.len();
            for (k, pa) in actions_from_path(p, cut.starts[a].heading).into_iter().enumerate() {
                lane.actions.push(Action {
                    agent: a,
                    index: base + k,
                    kind: pa.kind,
                    planned_enter: pa.planned_enter,
                    epoch: self.epoch,
                    status: ActionStatus::Pending,
                    end: pa.end,
                    deps: Vec::new(),
                });
            }
        }
        self.frozen = None;
        self.rebuild_dependencies()?;
        self.check_acyclic()
    }

    fn rebuild_dependencies(&mut self) -> Result<(), AdgError> {
        let mut by_cell: BTreeMap<Cell, Vec<Episode>> = BTreeMap::new();
        for (a, l) in self.lanes.iter().enumerate() {
            let mut cell = l.pose_after(l.completed).cell;
            let mut ep = Episode {
                key: (0, 0, a),
                agent: a,
                enter: None,
                vacate: None,
            };
            for act in &l.actions[l.completed..] {
                if let ActionKind::MoveForward { from, to } = act.kind {
                    debug_assert_eq!(from, cell);
                    ep.vacate = Some(act.index);
                    by_cell.entry(cell).or_default().push(ep);
                    cell = to;
                    ep = Episode {
                        key: (act.epoch, act.planned_enter, a),
                        agent: a,
                        enter: Some(act.index),
                        vacate: None,
                    };
                }
            }
            by_cell.entry(cell).or_default().push(ep);
        }
        for l in &mut self.lanes {
            let done = l.completed;
            for act in &mut l.actions[done..] {
                act.deps.clear();
            }
        }
        for (cell, mut eps) in by_cell {
            eps.sort_by_key(|e| e.key);
            for w in eps.windows(2) {
                let (first, second) = (w[0], w[1]);
                if first.agent == second.agent {
                    continue;
                }
                let Some(enter) = second.enter else {
                    // only one initial episode can exist per cell
                    continue;
                };
                let Some(vacate) = first.vacate else {
                    return Err(AdgError::EntersParkedCell {
                        cell,
                        parked: first.agent,
                        entering: second.agent,
                    });
                };
                let dep = ActionId {
                    agent: first.agent,
                    index: vacate,
                };
                let target = &mut self.lanes[second.agent].actions[enter];
                if !target.deps.contains(&dep) {
                    target.deps.push(dep);
                }
            }
        }
        Ok(())
    }

    fn check_acyclic(&self) -> Result<(), AdgError> {
        let n = self.lanes.len();
        let offset: Vec<usize> = self.lanes.iter().map(|l| l.completed).collect();
        let mut base = vec![0usize; n + 1];
        for a in 0..n {
            base[a + 1] = base[a] + self.lanes[a].actions.len() - offset[a];
        }
        let id = |x: ActionId| base[x.agent] + x.index - offset[x.agent];
        let total = base[n];
        let mut indeg = vec![0u32; total];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); total];
        for (a, l) in self.lanes.iter().enumerate() {
            for act in &l.actions[offset[a]..] {
                let me = id(act.id());
                if act.index > offset[a] {
                    out[me - 1].push(me);
                    indeg[me] += 1;
                }
                for &d in &act.deps {
                    if d.index >= offset[d.agent] {
                        out[id(d)].push(me);
                        indeg[me] += 1;
                    }
                }
            }
        }
        let mut stack: Vec<usize> = (0..total).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        if seen == total {
            return Ok(());
        }
        let v = (0..total).find(|&v| indeg[v] > 0).expect("a node on a cycle");
        let agent = (0..n).rfind(|&a| base[a] <= v).expect("in range");
        Err(AdgError::CyclicDependencies {
            agent,
            index: v - base[agent] + offset[agent],
        })
    }

    fn deps_done(&self, act: &Action) -> bool {
        act.deps
            .iter()
            .all(|d| self.lanes[d.agent].actions[d.index].status == ActionStatus::Completed)
    }

    /// Release the longest prefix of unreleased actions whose dependencies are done.
    pub fn ready_actions(&mut self, agent: usize) -> Vec<Action> {
        let limit = self
            .frozen
            .as_ref()
            .map_or(usize::MAX, |f| f[agent])
            .min(self.lanes[agent].actions.len());
        let mut out = Vec::new();
        while self.lanes[agent].released < limit {
            let idx = self.lanes[agent].released;
            if !self.deps_done(&self.lanes[agent].actions[idx]) {
                break;
            }
            let lane = &mut self.lanes[agent];
            lane.actions[idx].status = ActionStatus::Released;
            lane.released += 1;
            out.push(lane.actions[idx].clone());
        }
        out
    }

    pub fn mark_in_progress(&mut self, agent: usize, index: usize) {
        let act = &mut self.lanes[agent].actions[index];
        if act.status == ActionStatus::Released {
            act.status = ActionStatus::InProgress;
        }
    }

    pub fn mark_completed(&mut self, agent: usize, index: usize) -> Result<(), AdgError> {
        let lane = &mut self.lanes[agent];
        let ok = index == lane.completed
            && index < lane.actions.len()
            && matches!(
                lane.actions[index].status,
                ActionStatus::Released | ActionStatus::InProgress
            );
        if !ok {
            return Err(AdgError::OutOfOrderCompletion { agent, index });
        }
        lane.actions[index].status = ActionStatus::Completed;
        lane.completed += 1;
        Ok(())
    }

    /// Per-agent action list and dependency edges, one record per line.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        for (a, l) in self.lanes.iter().enumerate() {
            let _ = write!(out, "agent {a} origin {}", l.origin);
            for act in &l.actions {
                let s = match act.status {
                    ActionStatus::Pending => 'P',
                    ActionStatus::Released => 'R',
                    ActionStatus::InProgress => 'I',
                    ActionStatus::Completed => 'C',
                };
                let _ = write!(out, " {}:{}@{}.{}{}", act.index, act.kind, act.epoch, act.planned_enter, s);
            }
            out.push('\n');
        }
        for (from, to) in self.edges() {
            let _ = writeln!(out, "dep {}:{} -> {}:{}", from.agent, from.index, to.agent, to.index);
        }
        out
    }
}
