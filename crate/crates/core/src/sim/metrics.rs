use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TimingMode {
    /// Planner answers exactly `budget` seconds after invocation.
    #[default]
    Budget,
    /// Planner answers after its measured compute time, capped at `budget`.
    Wallclock,
}

/// Simulated compute duration of one planner call and whether its result counts.
pub fn planner_timing(mode: TimingMode, budget: f64, measured: f64) -> (f64, bool) {
    match mode {
        TimingMode::Budget => (budget, true),
        TimingMode::Wallclock => (measured.min(budget), measured <= budget),
    }
}

/// One line of the structured event log.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub seq: u64,
    pub kind: &'static str,
    pub agent: Option<usize>,
    pub payload: String,
}

impl fmt::Display for EventRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} {} {}", self.time, self.seq, self.kind)?;
        match self.agent {
            Some(a) => write!(f, " {a}")?,
            None => write!(f, " -")?,
        }
        if !self.payload.is_empty() {
            write!(f, " {}", self.payload)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsLog {
    /// Original goals only; stand-in goals never count.
    pub goals_reached: u64,
    pub invocations: u64,
    pub fail_calls: u64,
    /// Wait-insertion repairs that deadlocked and fell back to PIBT.
    pub deadlock_fallbacks: u64,
    pub actions_completed: u64,
    /// Simulated seconds.
    pub duration: f64,
    /// Host seconds spent in the run.
    pub wall_clock: f64,
    /// Empty unless event recording was enabled.
    pub events: Vec<EventRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub throughput: f64,
    pub fail_ratio: f64,
}

pub fn snapshot_metrics(log: &MetricsLog, now: f64) -> Snapshot {
    Snapshot {
        throughput: log.goals_reached as f64 / now,
        fail_ratio: if log.invocations == 0 {
            0.0
        } else {
            log.fail_calls as f64 / log.invocations as f64
        },
    }
}

impl MetricsLog {
    pub fn snapshot(&self) -> Snapshot {
        snapshot_metrics(self, self.duration)
    }

    pub fn write_events<W: Write>(&self, mut out: W) -> io::Result<()> {
        for e in &self.events {
            writeln!(out, "{e}")?;
        }
        Ok(())
    }

    pub fn event_log(&self) -> String {
        let mut buf = Vec::new();
        self.write_events(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii log")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timing_modes() {
        assert_eq!(planner_timing(TimingMode::Budget, 1.0, 0.01), (1.0, true));
        assert_eq!(planner_timing(TimingMode::Wallclock, 1.0, 0.3), (0.3, true));
        assert_eq!(planner_timing(TimingMode::Wallclock, 1.0, 4.0), (1.0, false));
    }

    #[test]
    fn snapshot_divisions() {
        let mut log = MetricsLog {
            goals_reached: 12,
            ..Default::default()
        };
        let s = snapshot_metrics(&log, 600.0);
        assert!((s.throughput - 0.02).abs() < 1e-12);
        assert_eq!(s.fail_ratio, 0.0);
        log.fail_calls = 3;
        log.invocations = 10;
        assert!((snapshot_metrics(&log, 600.0).fail_ratio - 0.3).abs() < 1e-12);
        log.goals_reached = 6;
        assert!((snapshot_metrics(&log, 600.0).throughput - 0.01).abs() < 1e-12);
    }

    #[test]
    fn record_format() {
        let r = EventRecord {
            time: 1.5,
            seq: 7,
            kind: "goal",
            agent: Some(2),
            payload: "(3,4)".into(),
        };
        assert_eq!(r.to_string(), "1.500000 7 goal 2 (3,4)");
    }
}
