use serde::{Deserialize, Serialize};

use crate::adg::ActionGraph;
use crate::kinodynamics::action_lookahead;

/// When to call the planner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvocationPolicy {
    /// Every `period` seconds.
    Periodic { period: f64 },
    /// As soon as some agent has fewer than floor(budget/epsilon) actions left.
    EventBased { budget: f64, epsilon: f64 },
}

const TIME_TOLERANCE: f64 = 1e-9;

impl InvocationPolicy {
    pub fn is_event_based(&self) -> bool {
        matches!(self, InvocationPolicy::EventBased { .. })
    }
}

pub fn should_invoke(policy: &InvocationPolicy, now: f64, last_invocation: Option<f64>, g: &ActionGraph) -> bool {
    match *policy {
        InvocationPolicy::Periodic { period } => {
            last_invocation.is_none_or(|last| now - last + TIME_TOLERANCE >= period)
        }
        InvocationPolicy::EventBased { budget, epsilon } => {
            let threshold = action_lookahead(budget, epsilon);
            (0..g.num_agents()).any(|a| g.remaining(a) < threshold)
        }
    }
}
