//! Planner suite: prioritized planning, priority-based search and PIBT.

mod joint;
mod pbs;
mod pibt;
mod prioritized;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmap::DistanceOracle;
use crate::mapf::{MapfInstance, Plan, SearchBudget};

pub use joint::joint_optimal_soc;
pub use pbs::plan_pbs;
pub use pibt::{pibt_step, pibt_step_ranked, plan_pibt, PibtState};
pub use prioritized::{plan_prioritized, unconstrained_path};

/// Instance in, plan out. Implementations must be deterministic and must
/// return colliding paths on failure.
pub trait Planner: Send + Sync {
    fn name(&self) -> &str;
    fn plan(&self, oracle: &DistanceOracle, instance: &MapfInstance, budget: &mut SearchBudget) -> Plan;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Pp,
    Pbs,
    /// Optimal conflict-based search; only available as an external plug-in.
    Cbs,
    /// Anytime large-neighbourhood search; only available as an external plug-in.
    Lns2,
}

impl PlannerKind {
    pub fn is_builtin(self) -> bool {
        matches!(self, PlannerKind::Pp | PlannerKind::Pbs)
    }

    pub fn key(self) -> &'static str {
        match self {
            PlannerKind::Pp => "pp",
            PlannerKind::Pbs => "pbs",
            PlannerKind::Cbs => "cbs",
            PlannerKind::Lns2 => "lns2",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Prioritized planning in ascending agent-id order.
#[derive(Debug, Clone, Copy, Default)]
pub struct PrioritizedPlanner;

impl Planner for PrioritizedPlanner {
    fn name(&self) -> &str {
        "pp"
    }

    fn plan(&self, oracle: &DistanceOracle, instance: &MapfInstance, budget: &mut SearchBudget) -> Plan {
        let order: Vec<usize> = (0..instance.num_agents()).collect();
        plan_prioritized(oracle, instance, &order, budget)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PbsPlanner;

impl Planner for PbsPlanner {
    fn name(&self) -> &str {
        "pbs"
    }

    fn plan(&self, oracle: &DistanceOracle, instance: &MapfInstance, budget: &mut SearchBudget) -> Plan {
        plan_pbs(oracle, instance, budget)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegistryError {
    #[error("planner `{0}` is not built in and no plug-in is registered for it")]
    Unavailable(PlannerKind),
}

/// Maps planner kinds to implementations. CBS and LNS2 resolve only after a
/// plug-in has been registered.
#[derive(Clone)]
pub struct PlannerRegistry {
    plugins: BTreeMap<PlannerKind, Arc<dyn Planner>>,
}

impl PlannerRegistry {
    pub fn new() -> Self {
        let mut plugins: BTreeMap<PlannerKind, Arc<dyn Planner>> = BTreeMap::new();
        plugins.insert(PlannerKind::Pp, Arc::new(PrioritizedPlanner));
        plugins.insert(PlannerKind::Pbs, Arc::new(PbsPlanner));
        PlannerRegistry { plugins }
    }

    pub fn register(&mut self, kind: PlannerKind, planner: Arc<dyn Planner>) {
        self.plugins.insert(kind, planner);
    }

    pub fn get(&self, kind: PlannerKind) -> Result<Arc<dyn Planner>, RegistryError> {
        self.plugins
            .get(&kind)
            .cloned()
            .ok_or(RegistryError::Unavailable(kind))
    }
}

impl Default for PlannerRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for PlannerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.plugins.keys()).finish()
    }
}

impl PartialOrd for PlannerKind {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PlannerKind {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_refuses_plugins_until_registered() {
        let mut reg = PlannerRegistry::new();
        assert!(reg.get(PlannerKind::Pbs).is_ok());
        assert_eq!(
            reg.get(PlannerKind::Cbs).err(),
            Some(RegistryError::Unavailable(PlannerKind::Cbs))
        );
        reg.register(PlannerKind::Cbs, Arc::new(PbsPlanner));
        assert_eq!(reg.get(PlannerKind::Cbs).unwrap().name(), "pbs");
    }
}
