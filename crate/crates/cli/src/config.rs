use std::path::{Path, PathBuf};

use fleetsim_core::gridmap::load_map;
use fleetsim_core::kinodynamics::{AgvLimits, NoiseModel};
use fleetsim_core::maps::{benchmark_map, BENCHMARK_MAPS};
use fleetsim_core::sim::DEFAULT_EXPANSIONS_PER_SECOND;
use fleetsim_core::{
    CommLink, Dialect, FailPolicy, GeneratorKind, GridMap, PlanModel, PlannerKind, SimConfig, TimingMode,
};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("illegal combination: {0}")]
    IllegalCombination(String),
    #[error("unknown setup {0}; setups are numbered 1 to 19")]
    UnknownSetup(u8),
    #[error("cannot read map `{path}`: {source}")]
    MapIo {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("map `{name}`: {source}")]
    Map {
        name: String,
        source: fleetsim_core::MapError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvocationKind {
    Periodic,
    EventBased,
}

/// A validated experiment: one row of the setup table plus the run parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Table row this config was expanded from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setup: Option<u8>,
    /// Benchmark name or path to a `.map` file.
    pub map: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dialect: Option<Dialect>,
    pub agents: usize,
    pub duration: f64,
    pub seed: u64,
    pub planner: PlannerKind,
    pub model: PlanModel,
    /// Seconds; `inf` plans to every goal.
    #[serde(with = "seconds_or_inf")]
    pub window: Option<f64>,
    /// Seconds; `n/a` for event-based invocation.
    #[serde(with = "seconds_or_na")]
    pub period: Option<f64>,
    pub budget: f64,
    pub invocation: InvocationKind,
    pub generator: GeneratorKind,
    pub fail_policy: FailPolicy,
    pub limits: AgvLimits,
    pub noise: NoiseModel,
    pub comm: CommLink,
    pub timing: TimingMode,
    pub timestep: f64,
    pub expansions_per_second: u64,
    pub expansion_cap: u64,
}

/// Parameter columns of one setup-table row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub model: PlanModel,
    pub planner: PlannerKind,
    pub window: Option<f64>,
    pub period: Option<f64>,
    pub budget: f64,
    pub invocation: InvocationKind,
    pub generator: GeneratorKind,
    pub fail_policy: FailPolicy,
}

/// Rows 1 to 19 of the setup table. Row 11 sweeps P = T over
/// {0.1, 0.5, 1, 2, ..., 20}; its preset carries 1 s and is overridden per run.
pub fn preset(setup: u8) -> Result<Preset, ConfigError> {
    use FailPolicy::*;
    use GeneratorKind::*;
    use InvocationKind::*;
    use PlanModel::*;
    use PlannerKind::*;
    let inf = None;
    let row = |model, planner, window: Option<f64>, period: Option<f64>, budget, invocation, generator, fail_policy| Preset {
        model,
        planner,
        window,
        period,
        budget,
        invocation,
        generator,
        fail_policy,
    };
    Ok(match setup {
        1 => row(Pebble, Pbs, inf, Some(1.0), 1.0, Periodic, DistinctOneGoal, PibtReplan),
        2 => row(Pebble, Pbs, inf, None, 1.0, EventBased, DistinctOneGoal, PibtReplan),
        3 => row(Pebble, Pbs, Some(1.0), Some(1.0), 1.0, Periodic, WindowedMultiGoals, PibtReplan),
        4 => row(Pebble, Pbs, Some(1.0), None, 1.0, EventBased, WindowedMultiGoals, PibtReplan),
        5 => row(Pebble, Pbs, inf, Some(1.0), 1.0, Periodic, OneGoal, PibtReplan),
        6 => row(Pebble, Pbs, inf, None, 1.0, EventBased, OneGoal, PibtReplan),
        7 => row(Pebble, Pbs, Some(10.0), Some(10.0), 10.0, Periodic, WindowedMultiGoals, PibtReplan),
        8 => row(Pebble, Pbs, Some(10.0), None, 10.0, EventBased, WindowedMultiGoals, PibtReplan),
        9 => row(Pebble, Pbs, Some(2.0), Some(2.0), 2.0, Periodic, WindowedMultiGoals, PibtReplan),
        10 => row(Pebble, Pbs, Some(5.0), Some(5.0), 5.0, Periodic, WindowedMultiGoals, PibtReplan),
        11 => row(Pebble, Lns2, inf, Some(1.0), 1.0, Periodic, DistinctOneGoal, AllWait),
        12 => row(Pebble, Pbs, Some(1.0), Some(1.0), 1.0, Periodic, WindowedMultiGoals, Lrgw),
        13 => row(Pebble, Pbs, Some(1.0), Some(1.0), 1.0, Periodic, WindowedMultiGoals, GuidedPibt),
        14 => row(Pebble, Pbs, Some(10.0), Some(10.0), 10.0, Periodic, WindowedMultiGoals, Lrgw),
        15 => row(Pebble, Pbs, Some(10.0), Some(10.0), 10.0, Periodic, WindowedMultiGoals, GuidedPibt),
        16 => row(Pebble, Cbs, inf, Some(20.0), 20.0, Periodic, DistinctOneGoal, AllWait),
        17 => row(Rotation, Cbs, inf, Some(20.0), 20.0, Periodic, DistinctOneGoal, AllWait),
        18 => row(Pebble, Pp, inf, Some(20.0), 20.0, Periodic, DistinctOneGoal, AllWait),
        19 => row(Rotation, Pp, inf, Some(20.0), 20.0, Periodic, DistinctOneGoal, AllWait),
        other => return Err(ConfigError::UnknownSetup(other)),
    })
}

/// Row 11's budget sweep.
pub const LNS_BUDGETS: [f64; 22] = [
    0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0,
    19.0, 20.0,
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig::from_preset(3).expect("row 3 exists")
    }
}

impl ExperimentConfig {
    pub fn from_preset(setup: u8) -> Result<Self, ConfigError> {
        let p = preset(setup)?;
        Ok(ExperimentConfig {
            setup: Some(setup),
            map: "empty-32-32".into(),
            dialect: None,
            agents: 20,
            duration: 600.0,
            seed: 0,
            planner: p.planner,
            model: p.model,
            window: p.window,
            period: p.period,
            budget: p.budget,
            invocation: p.invocation,
            generator: p.generator,
            fail_policy: p.fail_policy,
            limits: AgvLimits::default(),
            noise: NoiseModel::default(),
            comm: CommLink::default(),
            timing: TimingMode::Budget,
            timestep: 1.0,
            expansions_per_second: DEFAULT_EXPANSIONS_PER_SECOND,
            expansion_cap: fleetsim_core::mapf::DEFAULT_EXPANSION_CAP,
        })
    }

    /// Table parameters of this config, for comparison against a preset.
    pub fn parameters(&self) -> Preset {
        Preset {
            model: self.model,
            planner: self.planner,
            window: self.window,
            period: self.period,
            budget: self.budget,
            invocation: self.invocation,
            generator: self.generator,
            fail_policy: self.fail_policy,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let illegal = |m: &str| Err(ConfigError::IllegalCombination(m.into()));
        match (self.invocation, self.period) {
            (InvocationKind::Periodic, None) => return illegal("periodic invocation needs a period"),
            (InvocationKind::EventBased, Some(_)) => return illegal("event-based invocation takes no period"),
            _ => {}
        }
        match (self.generator, self.window) {
            (GeneratorKind::WindowedMultiGoals, None) => return illegal("windowed multi-goal instances need a finite window"),
            (GeneratorKind::DistinctOneGoal | GeneratorKind::OneGoal, Some(_)) => {
                return illegal("one-goal instances plan to every goal, the window must be inf")
            }
            _ => {}
        }
        self.to_sim(self.seed)
            .validate()
            .map_err(|e| ConfigError::Schema(e.to_string()))
    }

    /// Simulator parameters for one seed.
    pub fn to_sim(&self, seed: u64) -> SimConfig {
        SimConfig {
            agents: self.agents,
            duration: self.duration,
            seed,
            planner: self.planner,
            model: self.model,
            window: self.window,
            period: self.period,
            budget: self.budget,
            generator: self.generator,
            fail_policy: self.fail_policy,
            limits: self.limits,
            noise: self.noise,
            comm: self.comm,
            timing: self.timing,
            timestep: self.timestep,
            expansions_per_second: self.expansions_per_second,
            expansion_cap: self.expansion_cap,
            goal_mode: None,
            record_events: false,
            script: None,
        }
    }

    pub fn setup_name(&self) -> String {
        self.setup.map_or_else(|| "custom".into(), |s| s.to_string())
    }

    /// Resolve the map: a file named like a benchmark under `map_dir`, then
    /// the built-in generator, then a path (relative to `map_dir`).
    pub fn load_map(&self, map_dir: Option<&Path>) -> Result<GridMap, ConfigError> {
        let dialect = self.dialect.unwrap_or(if self.map.starts_with("warehouse") {
            Dialect::Warehouse
        } else {
            Dialect::Movingai
        });
        let is_benchmark = BENCHMARK_MAPS.contains(&self.map.as_str());
        if is_benchmark {
            if let Some(dir) = map_dir {
                let file = dir.join(format!("{}.map", self.map));
                if file.is_file() {
                    return read_map(&file, &self.map, dialect);
                }
            }
            return Ok(benchmark_map(&self.map).expect("listed benchmark"));
        }
        let path = PathBuf::from(&self.map);
        let path = match map_dir {
            Some(dir) if path.is_relative() && !path.exists() => dir.join(path),
            _ => path,
        };
        read_map(&path, &self.map, dialect)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn read_map(path: &Path, name: &str, dialect: Dialect) -> Result<GridMap, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::MapIo {
        path: path.to_owned(),
        source,
    })?;
    load_map(&text, dialect).map_err(|source| ConfigError::Map {
        name: name.into(),
        source,
    })
}

/// Document form: every field optional; a `setup` fills the table columns.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    setup: Option<u8>,
    map: Option<String>,
    dialect: Option<Dialect>,
    agents: Option<usize>,
    duration: Option<f64>,
    seed: Option<u64>,
    planner: Option<PlannerKind>,
    model: Option<PlanModel>,
    #[serde(default, with = "opt_seconds_or_inf")]
    window: Option<Option<f64>>,
    #[serde(default, with = "opt_seconds_or_na")]
    period: Option<Option<f64>>,
    budget: Option<f64>,
    invocation: Option<InvocationKind>,
    generator: Option<GeneratorKind>,
    fail_policy: Option<FailPolicy>,
    limits: Option<AgvLimits>,
    noise: Option<NoiseModel>,
    comm: Option<CommLink>,
    timing: Option<TimingMode>,
    timestep: Option<f64>,
    expansions_per_second: Option<u64>,
    expansion_cap: Option<u64>,
}

/// Parse a TOML document, expand its preset, apply overrides and validate.
pub fn load_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let doc: Document = toml::from_str(text).map_err(|e| ConfigError::Schema(e.to_string()))?;
    let mut c = match doc.setup {
        Some(s) => ExperimentConfig::from_preset(s)?,
        None => {
            let missing: Vec<&str> = [
                ("planner", doc.planner.is_none()),
                ("model", doc.model.is_none()),
                ("window", doc.window.is_none()),
                ("period", doc.period.is_none()),
                ("budget", doc.budget.is_none()),
                ("invocation", doc.invocation.is_none()),
                ("generator", doc.generator.is_none()),
                ("fail_policy", doc.fail_policy.is_none()),
            ]
            .iter()
            .filter(|(_, m)| *m)
            .map(|(f, _)| *f)
            .collect();
            if !missing.is_empty() {
                return Err(ConfigError::Schema(format!(
                    "without `setup` these fields are required: {}",
                    missing.join(", ")
                )));
            }
            let mut c = ExperimentConfig::default();
            c.setup = None;
            c
        }
    };
    macro_rules! apply {
        ($($f:ident),*) => { $( if let Some(v) = doc.$f { c.$f = v; } )* };
    }
    apply!(
        map, agents, duration, seed, planner, model, window, period, budget, invocation, generator, fail_policy,
        limits, noise, comm, timing, timestep, expansions_per_second, expansion_cap
    );
    if doc.dialect.is_some() {
        c.dialect = doc.dialect;
    }
    c.validate()?;
    Ok(c)
}

fn ser_opt<S: Serializer>(v: &Option<f64>, none: &str, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_str(none),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrWord {
    Num(f64),
    Int(i64),
    Word(String),
}

fn de_opt<'de, D: Deserializer<'de>>(d: D, words: &[&str]) -> Result<Option<f64>, D::Error> {
    match NumOrWord::deserialize(d)? {
        NumOrWord::Num(x) => Ok(Some(x)),
        NumOrWord::Int(x) => Ok(Some(x as f64)),
        NumOrWord::Word(w) if words.contains(&w.as_str()) => Ok(None),
        NumOrWord::Word(w) => Err(serde::de::Error::custom(format!(
            "expected seconds or one of {words:?}, found `{w}`"
        ))),
    }
}

mod seconds_or_inf {
    use super::*;
    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        ser_opt(v, "inf", s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        de_opt(d, &["inf"])
    }
}

mod seconds_or_na {
    use super::*;
    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        ser_opt(v, "n/a", s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        de_opt(d, &["n/a"])
    }
}

mod opt_seconds_or_inf {
    use super::*;
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Option<f64>>, D::Error> {
        de_opt(d, &["inf"]).map(Some)
    }
}

mod opt_seconds_or_na {
    use super::*;
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Option<f64>>, D::Error> {
        de_opt(d, &["n/a"]).map(Some)
    }
}
