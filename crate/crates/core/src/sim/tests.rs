use super::*;
use crate::gridmap::{Cell, GridMap};
use crate::maps::benchmark_map;

fn corridor_run(latency: f64) -> MetricsLog {
    // 1x4 corridor, agent faces its goal three cells east; the next goal
    // lies behind it, so the first run ends at rest on the goal
    let map = Arc::new(GridMap::empty(4, 1));
    let mut cfg = SimConfig::new(1, 0);
    cfg.duration = 10.0;
    cfg.window = None;
    cfg.generator = GeneratorKind::DistinctOneGoal;
    cfg.noise = NoiseModel::disabled();
    cfg.comm = CommLink {
        latency,
        jitter: 0.0,
    };
    cfg.record_events = true;
    cfg.script = Some(Script {
        starts: vec![AgentState::new(Cell::new(0, 0), Orientation::East)],
        goals: vec![vec![Cell::new(0, 3)]],
    });
    run(map, &cfg).unwrap()
}

fn first_time(log: &MetricsLog, kind: &str) -> f64 {
    log.events.iter().find(|e| e.kind == kind).unwrap().time
}

#[test]
fn three_cell_run_takes_two_and_a_half_seconds() {
    let log = corridor_run(0.0);
    let start = first_time(&log, "release");
    let goal = first_time(&log, "goal");
    assert!((start - 1.0).abs() < 1e-9, "plan lands after the 1 s budget");
    assert!((goal - start - 2.5).abs() < 1e-6, "{}", goal - start);
}

#[test]
fn latency_never_speeds_up_arrival() {
    let mut prev = 0.0;
    for latency in [0.0, 0.05, 0.1, 0.3, 0.7] {
        let t = first_time(&corridor_run(latency), "goal");
        assert!(t >= prev - 1e-12, "latency {latency}: {t} < {prev}");
        prev = t;
    }
}

#[test]
fn identical_seeds_give_identical_logs() {
    let map = Arc::new(benchmark_map("empty-32-32").unwrap());
    let mut cfg = SimConfig::new(15, 7);
    cfg.duration = 30.0;
    cfg.record_events = true;
    let a = run(map.clone(), &cfg).unwrap();
    let b = run(map.clone(), &cfg).unwrap();
    assert_eq!(a.event_log(), b.event_log());
    assert!(a.goals_reached > 0);
    cfg.seed = 8;
    assert_ne!(run(map, &cfg).unwrap().event_log(), a.event_log());
}

#[test]
fn goals_reached_matches_goal_events() {
    let map = Arc::new(benchmark_map("warehouse-33-36").unwrap());
    let mut cfg = SimConfig::new(20, 3);
    cfg.duration = 40.0;
    cfg.record_events = true;
    let log = run(map, &cfg).unwrap();
    let goals = log.events.iter().filter(|e| e.kind == "goal").count() as u64;
    assert_eq!(goals, log.goals_reached);
    assert!(log.fail_calls <= log.invocations);
    let invokes = log.events.iter().filter(|e| e.kind == "invoke").count() as u64;
    assert_eq!(invokes, log.invocations);
}

#[test]
fn standard_and_transient_setups_stay_safe() {
    let map = Arc::new(benchmark_map("maze-32-32-4").unwrap());
    for (generator, window, fail) in [
        (GeneratorKind::DistinctOneGoal, None, FailPolicy::PibtReplan),
        (GeneratorKind::OneGoal, None, FailPolicy::AllWait),
        (GeneratorKind::WindowedMultiGoals, Some(1.0), FailPolicy::Lrgw),
        (GeneratorKind::WindowedMultiGoals, Some(2.0), FailPolicy::GuidedPibt),
    ] {
        let mut cfg = SimConfig::new(20, 1);
        cfg.duration = 40.0;
        cfg.generator = generator;
        cfg.window = window;
        cfg.fail_policy = fail;
        run(map.clone(), &cfg).unwrap_or_else(|e| panic!("{generator:?} {fail:?}: {e}"));
    }
}

#[test]
fn event_based_and_rotation_model_run() {
    let map = Arc::new(benchmark_map("empty-32-32").unwrap());
    let mut cfg = SimConfig::new(10, 2);
    cfg.duration = 40.0;
    cfg.period = None;
    cfg.model = PlanModel::Rotation;
    cfg.planner = PlannerKind::Pp;
    cfg.window = None;
    cfg.generator = GeneratorKind::DistinctOneGoal;
    cfg.fail_policy = FailPolicy::AllWait;
    let log = run(map, &cfg).unwrap();
    assert!(log.invocations > 0);
}

#[test]
fn rejects_bad_configs() {
    let map = Arc::new(GridMap::empty(4, 4));
    let mut cfg = SimConfig::new(3, 0);
    cfg.window = None;
    assert!(matches!(run(map.clone(), &cfg), Err(SimError::ConfigInvalid(_))));
    let mut cfg = SimConfig::new(17, 0);
    cfg.duration = 1.0;
    assert!(matches!(run(map.clone(), &cfg), Err(SimError::ConfigInvalid(_))));
    let mut cfg = SimConfig::new(2, 0);
    cfg.planner = PlannerKind::Cbs;
    assert!(matches!(run(map, &cfg), Err(SimError::PlannerUnavailable(_))));
}

#[test]
fn fail_horizon_and_window_steps() {
    let mut cfg = SimConfig::new(1, 0);
    assert_eq!(cfg.window_steps(), Some(1));
    assert_eq!(cfg.fail_horizon(), 1);
    cfg.window = Some(10.0);
    cfg.budget = 10.0;
    assert_eq!(cfg.fail_horizon(), 10);
    cfg.window = None;
    cfg.budget = 2.5;
    assert_eq!(cfg.fail_horizon(), 3);
}
