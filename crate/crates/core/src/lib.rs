//! Lifelong multi-agent path finding for AGV fleets: grid maps, kinodynamic
//! timing, MAPF planners, the action dependency graph, and a deterministic
//! discrete-event simulator that runs them together.

pub mod adg;
pub mod gridmap;
pub mod kinodynamics;
pub mod lifelong;
pub mod mapf;
pub mod maps;
pub mod planners;
pub mod sim;

pub use adg::{ActionGraph, AdgError};
pub use gridmap::{Cell, CellKind, Dialect, DistanceOracle, GridMap, MapError, Orientation};
pub use kinodynamics::{AgvLimits, NoiseModel};
pub use lifelong::{FailPolicy, GeneratorKind, GoalMode, InvocationPolicy};
pub use mapf::{AgentState, MapfInstance, Path, Plan, PlanModel, Semantics, Window};
pub use planners::{Planner, PlannerKind, PlannerRegistry};
pub use sim::{run, run_with, CommLink, MetricsLog, Script, SimConfig, SimError, TimingMode};
