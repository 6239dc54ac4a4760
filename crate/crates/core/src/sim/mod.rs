//! Discrete-event engine: planner in the loop, delayed messaging, noisy
//! execution of the action dependency graph.

mod comm;
mod events;
mod metrics;
mod truncate;

use std::collections::VecDeque;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use comm::CommLink;
pub use events::{EventKind, EventQueue, SimEvent};
pub use metrics::{planner_timing, snapshot_metrics, EventRecord, MetricsLog, Snapshot, TimingMode};
pub use truncate::executable_prefix;

use comm::FifoChannel;
use events::PendingPlan;

use crate::adg::{Action, ActionGraph, ActionKind, AdgError, CommitCut};
use crate::gridmap::{DistanceOracle, GridMap, Orientation, CELL_PITCH};
use crate::kinodynamics::{
    action_lookahead, min_action_duration, rotate_duration, sample_duration, AgvLimits, KinoError, NoiseModel,
    VelocityProfile,
};
use crate::lifelong::{
    generate_instance, goals_passed, recover, should_invoke, FailPolicy, GeneratorKind, GoalBook, GoalError, GoalMode,
    GoalStream, InvocationPolicy,
};
use crate::maps::sample_distinct_cells;
use crate::mapf::{monitor_execution, AgentState, MapfInstance, Plan, PlanModel, SearchBudget, Violation, Window};
use crate::planners::{Planner, PlannerKind, PlannerRegistry, RegistryError};

/// Default planner effort per second of budget, in low-level node expansions.
pub const DEFAULT_EXPANSIONS_PER_SECOND: u64 = 100_000;

/// Everything one simulation needs besides the map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub agents: usize,
    /// Simulated seconds.
    pub duration: f64,
    pub seed: u64,
    pub planner: PlannerKind,
    pub model: PlanModel,
    /// Planning window in seconds; `None` plans to every goal.
    pub window: Option<f64>,
    /// Invocation period in seconds; `None` selects event-based invocation.
    pub period: Option<f64>,
    /// Planner runtime limit per invocation, seconds.
    pub budget: f64,
    pub generator: GeneratorKind,
    pub fail_policy: FailPolicy,
    #[serde(default)]
    pub limits: AgvLimits,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub comm: CommLink,
    #[serde(default)]
    pub timing: TimingMode,
    /// Seconds per planner timestep.
    #[serde(default = "default_timestep")]
    pub timestep: f64,
    #[serde(default = "default_expansions")]
    pub expansions_per_second: u64,
    #[serde(default = "default_cap")]
    pub expansion_cap: u64,
    /// Defaults to alternating when the map has workstations and endpoints.
    #[serde(default)]
    pub goal_mode: Option<GoalMode>,
    #[serde(default)]
    pub record_events: bool,
    /// Fixed starts and leading goals instead of random ones.
    #[serde(default)]
    pub script: Option<Script>,
}

/// Hand-placed scenario: per-agent start pose and goals served before any
/// random ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Script {
    pub starts: Vec<AgentState>,
    pub goals: Vec<Vec<crate::gridmap::Cell>>,
}

fn default_timestep() -> f64 {
    1.0
}

fn default_expansions() -> u64 {
    DEFAULT_EXPANSIONS_PER_SECOND
}

fn default_cap() -> u64 {
    crate::mapf::DEFAULT_EXPANSION_CAP
}

impl SimConfig {
    /// Windowed PBS, 1 s window/period/budget, windowed multi-goal instances, PIBT recovery.
    pub fn new(agents: usize, seed: u64) -> Self {
        SimConfig {
            agents,
            duration: 600.0,
            seed,
            planner: PlannerKind::Pbs,
            model: PlanModel::Pebble,
            window: Some(1.0),
            period: Some(1.0),
            budget: 1.0,
            generator: GeneratorKind::WindowedMultiGoals,
            fail_policy: FailPolicy::PibtReplan,
            limits: AgvLimits::default(),
            noise: NoiseModel::default(),
            comm: CommLink::default(),
            timing: TimingMode::Budget,
            timestep: 1.0,
            expansions_per_second: DEFAULT_EXPANSIONS_PER_SECOND,
            expansion_cap: crate::mapf::DEFAULT_EXPANSION_CAP,
            goal_mode: None,
            record_events: false,
            script: None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::ConfigInvalid(m));
        let positive = |name: &str, v: f64| -> Result<(), SimError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SimError::ConfigInvalid(format!("{name} must be positive, got {v}")))
            }
        };
        if self.agents == 0 {
            return bad("at least one agent is required".into());
        }
        positive("duration", self.duration)?;
        positive("budget", self.budget)?;
        positive("timestep", self.timestep)?;
        if let Some(p) = self.period {
            positive("period", p)?;
        }
        if let Some(w) = self.window {
            positive("window", w)?;
        }
        match (self.generator, self.window) {
            (GeneratorKind::WindowedMultiGoals, None) => return bad("windowed multi-goal instances need a window".into()),
            (GeneratorKind::DistinctOneGoal | GeneratorKind::OneGoal, Some(_)) => {
                return bad("only windowed multi-goal instances take a window".into())
            }
            _ => {}
        }
        if self.expansion_cap == 0 || self.expansions_per_second == 0 {
            return bad("expansion limits must be positive".into());
        }
        self.limits.validate().map_err(|e| SimError::ConfigInvalid(e.to_string()))?;
        self.noise.validate().map_err(SimError::ConfigInvalid)?;
        self.comm.validate().map_err(SimError::ConfigInvalid)?;
        if let Some(s) = &self.script {
            if s.starts.len() != self.agents || s.goals.len() != self.agents {
                return bad(format!("script covers {} starts and {} goal lists for {} agents", s.starts.len(), s.goals.len(), self.agents));
            }
        }
        Ok(())
    }

    /// Window converted to planner timesteps (at least one).
    pub fn window_steps(&self) -> Option<u32> {
        self.window.map(|w| ((w / self.timestep).round() as u32).max(1))
    }

    pub fn invocation_policy(&self) -> InvocationPolicy {
        match self.period {
            Some(period) => InvocationPolicy::Periodic { period },
            None => InvocationPolicy::EventBased {
                budget: self.budget,
                epsilon: min_action_duration(&self.limits),
            },
        }
    }

    /// Recovery horizon: max(window, ceil(budget / timestep)) timesteps.
    pub fn fail_horizon(&self) -> u32 {
        let budget_steps = (self.budget / self.timestep - 1e-9).ceil().max(1.0) as u32;
        self.window_steps().unwrap_or(0).max(budget_steps)
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    PlannerUnavailable(#[from] RegistryError),
    #[error("{count} execution collisions, first at {first:?}")]
    SafetyViolation { count: usize, first: Violation },
    #[error("action dependency graph rejected a plan: {0}")]
    AdgCycle(#[from] AdgError),
    #[error(transparent)]
    Goal(#[from] GoalError),
    #[error(transparent)]
    Kinematics(#[from] KinoError),
}

/// Run one simulation with the built-in planners.
pub fn run(map: Arc<GridMap>, cfg: &SimConfig) -> Result<MetricsLog, SimError> {
    run_with(map, cfg, &PlannerRegistry::new())
}

pub fn run_with(map: Arc<GridMap>, cfg: &SimConfig, registry: &PlannerRegistry) -> Result<MetricsLog, SimError> {
    cfg.validate()?;
    let planner = registry.get(cfg.planner)?;
    let started = Instant::now();
    let mut sim = Sim::new(map, cfg, planner)?;
    sim.run()?;
    sim.metrics.wall_clock = started.elapsed().as_secs_f64();
    Ok(sim.metrics)
}

/// Independent rng stream `k` of a run.
fn rng_stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

#[derive(Debug, Clone)]
struct Agv {
    pose: AgentState,
    /// Nominal forward speed at the current cell boundary.
    speed: f64,
    /// Speed at the end of the action in flight.
    next_speed: f64,
    /// Released actions not yet finished; the front one may be in flight.
    queue: VecDeque<Action>,
    busy: bool,
    /// Actions physically finished.
    done: usize,
}

struct Pending {
    result: PendingPlan,
    cut: CommitCut,
    instance: MapfInstance,
}

struct Sim<'a> {
    cfg: &'a SimConfig,
    oracle: DistanceOracle,
    planner: Arc<dyn Planner>,
    queue: EventQueue,
    graph: ActionGraph,
    agvs: Vec<Agv>,
    book: GoalBook,
    stream: GoalStream,
    noise_rng: ChaCha8Rng,
    comm_rng: ChaCha8Rng,
    down: Vec<FifoChannel>,
    up: Vec<FifoChannel>,
    occupancy: crate::mapf::OccupancyLog,
    metrics: MetricsLog,
    pending: Option<Pending>,
    last_invocation: Option<f64>,
    policy: InvocationPolicy,
    epsilon: f64,
    lookahead: usize,
    window: Window,
    fail_horizon: u32,
    ticks: u64,
    /// Sequence number of the event being handled.
    seq: u64,
}

impl<'a> Sim<'a> {
    fn new(map: Arc<GridMap>, cfg: &'a SimConfig, planner: Arc<dyn Planner>) -> Result<Self, SimError> {
        let n = cfg.agents;
        let starts: Vec<AgentState> = match &cfg.script {
            Some(script) => {
                let mut seen = rustc_hash::FxHashSet::default();
                for s in &script.starts {
                    if !map.contains(s.cell) || !map.is_traversable(s.cell) || !seen.insert(s.cell) {
                        return Err(SimError::ConfigInvalid(format!("scripted start {s} is blocked or shared")));
                    }
                }
                script.starts.clone()
            }
            None => {
                let mut start_rng = rng_stream(cfg.seed, 0);
                let cells = sample_distinct_cells(&map, n, &mut start_rng).ok_or_else(|| {
                    SimError::ConfigInvalid(format!(
                        "{n} agents do not fit on {} free cells",
                        map.traversable_cells().count()
                    ))
                })?;
                cells.iter().map(|&c| AgentState::new(c, Orientation::North)).collect()
            }
        };
        let mut book = GoalBook::new(n);
        if let Some(script) = &cfg.script {
            for (a, goals) in script.goals.iter().enumerate() {
                for &g in goals {
                    if !map.contains(g) || !map.is_traversable(g) {
                        return Err(SimError::ConfigInvalid(format!("scripted goal {g} is blocked")));
                    }
                    book.push(a, g);
                }
            }
        }
        let goal_mode = cfg.goal_mode.unwrap_or_else(|| GoalMode::for_map(&map));
        let stream = GoalStream::new(&map, goal_mode, n, rng_stream(cfg.seed, 1).random());
        let mut occupancy = crate::mapf::OccupancyLog::new();
        for (a, s) in starts.iter().enumerate() {
            occupancy.enter(a, s.cell, 0.0);
        }
        let epsilon = min_action_duration(&cfg.limits);
        Ok(Sim {
            cfg,
            oracle: DistanceOracle::new(map),
            planner,
            queue: EventQueue::new(),
            graph: ActionGraph::new(&starts),
            agvs: starts
                .iter()
                .map(|&pose| Agv {
                    pose,
                    speed: 0.0,
                    next_speed: 0.0,
                    queue: VecDeque::new(),
                    busy: false,
                    done: 0,
                })
                .collect(),
            book,
            stream,
            noise_rng: rng_stream(cfg.seed, 2),
            comm_rng: rng_stream(cfg.seed, 3),
            down: vec![FifoChannel::default(); n],
            up: vec![FifoChannel::default(); n],
            occupancy,
            metrics: MetricsLog::default(),
            pending: None,
            last_invocation: None,
            policy: cfg.invocation_policy(),
            epsilon,
            lookahead: action_lookahead(cfg.budget, epsilon),
            window: cfg.window_steps().map_or(Window::Unbounded, Window::Steps),
            fail_horizon: cfg.fail_horizon(),
            ticks: 0,
            seq: 0,
        })
    }

    fn log(&mut self, time: f64, kind: &'static str, agent: Option<usize>, payload: impl FnOnce() -> String) {
        if self.cfg.record_events {
            self.metrics.events.push(EventRecord {
                time,
                seq: self.seq,
                kind,
                agent,
                payload: payload(),
            });
        }
    }

    fn run(&mut self) -> Result<(), SimError> {
        let end = self.cfg.duration;
        self.queue.push(end, EventKind::SimEnd);
        self.queue.push(0.0, EventKind::InvocationCheck);
        while let Some(ev) = self.queue.pop() {
            self.seq = ev.seq;
            let now = ev.time;
            match ev.kind {
                EventKind::SimEnd => {
                    self.log(now, "end", None, String::new);
                    break;
                }
                EventKind::InvocationCheck => self.on_check(now)?,
                EventKind::PlannerDone => self.on_planner_done(now)?,
                EventKind::ActionRelease { agent, actions } => self.on_release(now, agent, actions)?,
                EventKind::ActionComplete { agent, index } => self.on_complete(now, agent, index)?,
                EventKind::CompletionReport { agent, index } => self.on_report(now, agent, index)?,
                EventKind::GoalReached { agent } => self.on_goal(now, agent)?,
            }
        }
        self.metrics.duration = end;
        self.occupancy.close_all(end);
        let violations = monitor_execution(&self.occupancy);
        if let Some(&first) = violations.first() {
            return Err(SimError::SafetyViolation {
                count: violations.len(),
                first,
            });
        }
        Ok(())
    }

    fn on_check(&mut self, now: f64) -> Result<(), SimError> {
        self.try_invoke(now)?;
        if let InvocationPolicy::Periodic { period } = self.policy {
            // multiples of the period, so no drift
            self.ticks += 1;
            self.queue.push(self.ticks as f64 * period, EventKind::InvocationCheck);
        }
        Ok(())
    }

    fn try_invoke(&mut self, now: f64) -> Result<(), SimError> {
        if self.pending.is_some() || !should_invoke(&self.policy, now, self.last_invocation, &self.graph) {
            return Ok(());
        }
        self.invoke(now)
    }

    fn invoke(&mut self, now: f64) -> Result<(), SimError> {
        self.metrics.invocations += 1;
        self.last_invocation = Some(now);
        let n = self.cfg.agents;
        let cut = self.graph.commit_cut(self.lookahead);
        self.graph.freeze(&cut);
        let skip: Vec<usize> = (0..n)
            .map(|a| {
                let agv = &self.agvs[a];
                let ahead = self.graph.actions(a)[agv.done..cut.committed[a]].iter().map(|x| x.end.cell);
                goals_passed(&self.book, a, std::iter::once(agv.pose.cell).chain(ahead))
            })
            .collect();
        let generated = generate_instance(
            self.cfg.generator,
            &cut.starts,
            &skip,
            &mut self.book,
            &mut self.stream,
            &self.oracle,
            self.cfg.model,
            self.window,
            self.cfg.budget,
        )?;
        let total = (self.cfg.expansions_per_second as f64 * self.cfg.budget).ceil() as u64;
        let mut budget = SearchBudget::with_total(self.cfg.expansion_cap, total);
        let started = Instant::now();
        let plan = self.planner.plan(&self.oracle, &generated.instance, &mut budget);
        let measured = started.elapsed().as_secs_f64();
        let (compute, within_budget) = planner_timing(self.cfg.timing, self.cfg.budget, measured);
        let min_remaining = (0..n).map(|a| self.graph.remaining(a)).min().unwrap_or(0);
        let stand_ins = generated.temporary.iter().filter(|&&t| t).count();
        self.log(now, "invoke", None, || {
            format!("min_remaining={min_remaining} stand_in_goals={stand_ins} expansions={}", budget.used())
        });
        self.pending = Some(Pending {
            result: PendingPlan { plan, within_budget },
            cut,
            instance: generated.instance,
        });
        self.queue.push(now + compute, EventKind::PlannerDone);
        Ok(())
    }

    fn on_planner_done(&mut self, now: f64) -> Result<(), SimError> {
        let Pending {
            result,
            cut,
            instance,
        } = self.pending.take().expect("planner was running");
        let accepted = result.within_budget && result.plan.is_success();
        let mut paths = if accepted {
            result.plan.paths
        } else {
            self.metrics.fail_calls += 1;
            let failed = Plan::failed(result.plan.paths, result.plan.conflicts);
            let rec = recover(self.cfg.fail_policy, &self.oracle, &instance, &failed, self.fail_horizon);
            if rec.fell_back {
                self.metrics.deadlock_fallbacks += 1;
            }
            rec.plan.paths
        };
        let truncated = executable_prefix(&mut paths);
        self.graph.merge_plan(&cut, &paths)?;
        let n = self.cfg.agents;
        let remaining: Vec<usize> = (0..n).map(|a| self.graph.remaining(a)).collect();
        self.log(now, "planned", None, || {
            let status = if accepted { "success" } else { "failed" };
            let rem: Vec<String> = remaining.iter().map(usize::to_string).collect();
            format!("{status} truncated={truncated} remaining={}", rem.join(","))
        });
        self.release_all(now);
        if self.policy.is_event_based() {
            self.try_invoke(now)?;
        }
        Ok(())
    }

    fn release_all(&mut self, now: f64) {
        for a in 0..self.cfg.agents {
            let actions = self.graph.ready_actions(a);
            if actions.is_empty() {
                continue;
            }
            let delay = self.cfg.comm.sample_delay(&mut self.comm_rng);
            let at = self.down[a].deliver_at(now, delay);
            self.queue.push(at, EventKind::ActionRelease { agent: a, actions });
        }
    }

    fn on_release(&mut self, now: f64, agent: usize, actions: Vec<Action>) -> Result<(), SimError> {
        self.log(now, "release", Some(agent), || {
            let idx: Vec<String> = actions.iter().map(|x| x.index.to_string()).collect();
            idx.join(",")
        });
        self.agvs[agent].queue.extend(actions);
        self.start_next(now, agent)
    }

    /// Begin the front released action if the AGV is idle. A run of forward
    /// moves is profiled as a whole, ending at rest where the released run
    /// ends; only the first boundary crossing is scheduled, the rest are
    /// re-profiled on arrival in case more moves were released meanwhile.
    fn start_next(&mut self, now: f64, agent: usize) -> Result<(), SimError> {
        let agv = &mut self.agvs[agent];
        if agv.busy {
            return Ok(());
        }
        let Some(front) = agv.queue.front() else {
            return Ok(());
        };
        let (index, kind) = (front.index, front.kind);
        let nominal = match kind {
            ActionKind::Rotate { .. } => {
                debug_assert!(agv.speed.abs() < 1e-9, "rotating while moving");
                agv.next_speed = 0.0;
                rotate_duration(&self.cfg.limits, kind.angle_deg())?
            }
            ActionKind::MoveForward { to, .. } => {
                let run = agv.queue.iter().take_while(|x| x.kind.is_move()).count();
                let profile = VelocityProfile::new(&self.cfg.limits, agv.speed, 0.0, run as f64 * CELL_PITCH)?;
                let t = if run == 1 {
                    agv.next_speed = 0.0;
                    profile.duration()
                } else {
                    let t = profile.time_at_position(CELL_PITCH);
                    agv.next_speed = profile.velocity_at(t);
                    t
                };
                self.occupancy.enter(agent, to, now);
                t
            }
        };
        debug_assert!(nominal + 1e-9 >= self.epsilon, "action shorter than epsilon: {nominal}");
        let duration = sample_duration(nominal, &self.cfg.noise, &mut self.noise_rng);
        agv.busy = true;
        self.graph.mark_in_progress(agent, index);
        self.queue.push(now + duration, EventKind::ActionComplete { agent, index });
        Ok(())
    }

    fn on_complete(&mut self, now: f64, agent: usize, index: usize) -> Result<(), SimError> {
        let agv = &mut self.agvs[agent];
        let act = agv.queue.pop_front().expect("completed action was queued");
        debug_assert_eq!(act.index, index);
        agv.busy = false;
        agv.pose = act.end;
        agv.speed = agv.next_speed;
        agv.done += 1;
        let pose = agv.pose;
        if let ActionKind::MoveForward { from, .. } = act.kind {
            self.occupancy.exit(agent, from, now);
        }
        self.metrics.actions_completed += 1;
        self.log(now, "complete", Some(agent), || format!("{index} {} {pose}", act.kind));
        if self.book.peek(agent) == Some(pose.cell) {
            self.queue.push(now, EventKind::GoalReached { agent });
        }
        let delay = self.cfg.comm.sample_delay(&mut self.comm_rng);
        let at = self.up[agent].deliver_at(now, delay);
        self.queue.push(at, EventKind::CompletionReport { agent, index });
        self.start_next(now, agent)
    }

    fn on_report(&mut self, now: f64, agent: usize, index: usize) -> Result<(), SimError> {
        self.graph.mark_completed(agent, index)?;
        let remaining = self.graph.remaining(agent);
        self.log(now, "report", Some(agent), || format!("{index} remaining={remaining}"));
        self.release_all(now);
        if self.policy.is_event_based() {
            self.try_invoke(now)?;
        }
        Ok(())
    }

    fn on_goal(&mut self, now: f64, agent: usize) -> Result<(), SimError> {
        let at = self.agvs[agent].pose.cell;
        if self.book.peek(agent) != Some(at) {
            return Ok(());
        }
        self.book.complete(agent);
        self.metrics.goals_reached += 1;
        self.log(now, "goal", Some(agent), || at.to_string());
        self.book.ensure(agent, 1, at, &mut self.stream)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests;
