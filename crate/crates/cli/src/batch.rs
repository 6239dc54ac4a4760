use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use fleetsim_core::{GridMap, MetricsLog, PlannerRegistry};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;

/// One CSV row per run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub setup: String,
    pub map: String,
    pub agents: usize,
    pub seed: u64,
    pub throughput: f64,
    pub fail_ratio: f64,
    pub goals_reached: u64,
    pub invocations: u64,
    pub fail_calls: u64,
    pub wall_clock: f64,
    /// Empty for completed runs.
    pub error: String,
}

/// A finished run: its row plus the full metrics when it succeeded.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub row: ResultRow,
    pub metrics: Option<MetricsLog>,
}

#[derive(Debug, Clone, Default)]
pub struct BatchOptions<'a> {
    pub map_dir: Option<&'a Path>,
    pub record_events: bool,
    /// 0 uses every core.
    pub parallelism: usize,
}

/// Run every config for `repetitions` seeds (config seed + 0..repetitions).
/// Records come back in (config, seed) order whatever the parallelism.
pub fn run_batch(
    configs: &[ExperimentConfig],
    repetitions: u64,
    opts: &BatchOptions<'_>,
    registry: &PlannerRegistry,
) -> Vec<RunRecord> {
    let mut maps: HashMap<(String, Option<fleetsim_core::Dialect>), Result<Arc<GridMap>, String>> = HashMap::new();
    for c in configs {
        maps.entry((c.map.clone(), c.dialect))
            .or_insert_with(|| c.load_map(opts.map_dir).map(Arc::new).map_err(|e| e.to_string()));
    }
    let jobs: Vec<(&ExperimentConfig, u64)> = configs
        .iter()
        .flat_map(|c| (0..repetitions).map(move |k| (c, c.seed + k)))
        .collect();
    let work = |&(c, seed): &(&ExperimentConfig, u64)| {
        let map = &maps[&(c.map.clone(), c.dialect)];
        run_one(c, seed, map, opts.record_events, registry)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.parallelism)
        .build()
        .expect("thread pool");
    pool.install(|| jobs.par_iter().map(work).collect())
}

fn run_one(
    c: &ExperimentConfig,
    seed: u64,
    map: &Result<Arc<GridMap>, String>,
    record_events: bool,
    registry: &PlannerRegistry,
) -> RunRecord {
    let mut row = ResultRow {
        setup: c.setup_name(),
        map: c.map.clone(),
        agents: c.agents,
        seed,
        throughput: 0.0,
        fail_ratio: 0.0,
        goals_reached: 0,
        invocations: 0,
        fail_calls: 0,
        wall_clock: 0.0,
        error: String::new(),
    };
    let map = match map {
        Ok(m) => m.clone(),
        Err(e) => {
            row.error = e.clone();
            return RunRecord { row, metrics: None };
        }
    };
    let mut sim = c.to_sim(seed);
    sim.record_events = record_events;
    match fleetsim_core::run_with(map, &sim, registry) {
        Ok(m) => {
            let snap = m.snapshot();
            row.throughput = snap.throughput;
            row.fail_ratio = snap.fail_ratio;
            row.goals_reached = m.goals_reached;
            row.invocations = m.invocations;
            row.fail_calls = m.fail_calls;
            row.wall_clock = m.wall_clock;
            RunRecord { row, metrics: Some(m) }
        }
        Err(e) => {
            log::warn!("setup {} on {} with {} agents, seed {seed}: {e}", row.setup, row.map, row.agents);
            row.error = e.to_string();
            RunRecord { row, metrics: None }
        }
    }
}

/// Header plus one record per row, RFC 4180 quoting.
pub fn write_csv<W: Write>(rows: &[ResultRow], sink: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub const CSV_HEADER: [&str; 11] = [
    "setup",
    "map",
    "agents",
    "seed",
    "throughput",
    "fail_ratio",
    "goals_reached",
    "invocations",
    "fail_calls",
    "wall_clock",
    "error",
];
