//! Decision modules of the lifelong loop: goals, instance generation,
//! planner invocation and failure recovery.

mod fail;
mod generator;
mod goals;
mod invocation;

pub use fail::{all_wait, guide_heuristic, guided_pibt, lrgw, recover, FailPolicy, Recovery};
pub use generator::{chain_distance, generate_instance, goals_passed, nearest_free_goal, GeneratedInstance, GeneratorKind};
pub use goals::{GoalBook, GoalError, GoalMode, GoalStream};
pub use invocation::{should_invoke, InvocationPolicy};
