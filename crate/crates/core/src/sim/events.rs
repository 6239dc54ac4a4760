use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::adg::Action;
use crate::mapf::Plan;

#[derive(Debug, Clone)]
pub enum EventKind {
    InvocationCheck,
    PlannerDone,
    ActionRelease { agent: usize, actions: Vec<Action> },
    ActionComplete { agent: usize, index: usize },
    CompletionReport { agent: usize, index: usize },
    GoalReached { agent: usize },
    SimEnd,
}

/// Result of one planner call, held until its `PlannerDone` event fires.
#[derive(Debug, Clone)]
pub(crate) struct PendingPlan {
    pub plan: Plan,
    pub within_budget: bool,
}

#[derive(Debug, Clone)]
pub struct SimEvent {
    pub time: f64,
    pub seq: u64,
    pub kind: EventKind,
}

impl PartialEq for SimEvent {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SimEvent {}

impl PartialOrd for SimEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SimEvent {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then(other.seq.cmp(&self.seq))
    }
}

/// Pending events in (time, sequence) order.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<SimEvent>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, kind: EventKind) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(SimEvent { time, seq, kind });
        seq
    }

    pub fn pop(&mut self) -> Option<SimEvent> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
