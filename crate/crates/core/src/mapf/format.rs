//! Line-oriented text form of instances and plans, used by golden tests.
//!
//! ```text
//! instance model=pebble window=inf semantics=standard budget=1
//! agent 0 start 0,0,N goals 0,3 2,2
//! plan success
//! path 0 0,0,N 0,1,E 0,2,E
//! conflict vertex 0 1 3 1,2
//! conflict edge 0 1 1 0,0>0,1
//! ```
//!
//! A state is `row,col,heading`; a cell is `row,col`.

use std::fmt::Write as _;

use thiserror::Error;

use super::{
    AgentState, AgentTask, Conflict, ConflictKind, ConflictLocation, MapfInstance, Path, Plan,
    PlanModel, PlanStatus, Semantics, Window,
};
use crate::gridmap::{Cell, Orientation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

fn err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line: line + 1,
        msg: msg.into(),
    }
}

fn cell_str(c: Cell) -> String {
    format!("{},{}", c.row, c.col)
}

fn parse_cell(s: &str) -> Option<Cell> {
    let (r, c) = s.split_once(',')?;
    Some(Cell::new(r.parse().ok()?, c.parse().ok()?))
}

fn parse_state(s: &str) -> Option<AgentState> {
    let mut it = s.split(',');
    let r = it.next()?.parse().ok()?;
    let c = it.next()?.parse().ok()?;
    let mut h = it.next()?.chars();
    let heading = Orientation::from_letter(h.next()?)?;
    if h.next().is_some() || it.next().is_some() {
        return None;
    }
    Some(AgentState::new(Cell::new(r, c), heading))
}

fn model_str(m: PlanModel) -> &'static str {
    match m {
        PlanModel::Pebble => "pebble",
        PlanModel::Rotation => "rotation",
    }
}

fn semantics_str(s: Semantics) -> &'static str {
    match s {
        Semantics::Standard => "standard",
        Semantics::Transient => "transient",
    }
}

pub fn write_instance(inst: &MapfInstance) -> String {
    let mut out = format!(
        "instance model={} window={} semantics={} budget={}\n",
        model_str(inst.model),
        inst.window,
        semantics_str(inst.semantics),
        inst.budget
    );
    for (i, a) in inst.agents.iter().enumerate() {
        let goals: Vec<String> = a.goals.iter().map(|&g| cell_str(g)).collect();
        let _ = writeln!(out, "agent {i} start {} goals {}", a.start, goals.join(" "));
    }
    out
}

pub fn parse_instance(text: &str) -> Result<MapfInstance, FormatError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (n, header) = lines.next().ok_or_else(|| err(0, "empty document"))?;
    let mut words = header.split_whitespace();
    if words.next() != Some("instance") {
        return Err(err(n, "expected `instance` header"));
    }
    let mut inst = MapfInstance {
        agents: Vec::new(),
        model: PlanModel::Pebble,
        window: Window::Unbounded,
        semantics: Semantics::Standard,
        budget: 1.0,
    };
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| err(n, format!("bad field `{w}`")))?;
        match k {
            "model" => {
                inst.model = match v {
                    "pebble" => PlanModel::Pebble,
                    "rotation" => PlanModel::Rotation,
                    _ => return Err(err(n, format!("unknown model `{v}`"))),
                }
            }
            "window" => {
                inst.window = if v == "inf" {
                    Window::Unbounded
                } else {
                    Window::Steps(v.parse().map_err(|_| err(n, "bad window"))?)
                }
            }
            "semantics" => {
                inst.semantics = match v {
                    "standard" => Semantics::Standard,
                    "transient" => Semantics::Transient,
                    _ => return Err(err(n, format!("unknown semantics `{v}`"))),
                }
            }
            "budget" => inst.budget = v.parse().map_err(|_| err(n, "bad budget"))?,
            _ => return Err(err(n, format!("unknown field `{k}`"))),
        }
    }
    for (n, line) in lines {
        let w: Vec<&str> = line.split_whitespace().collect();
        if w.len() < 5 || w[0] != "agent" || w[2] != "start" || w[4] != "goals" {
            return Err(err(n, "expected `agent ID start STATE goals CELL...`"));
        }
        if w[1].parse::<usize>().ok() != Some(inst.agents.len()) {
            return Err(err(n, "agent ids must be consecutive from 0"));
        }
        let start = parse_state(w[3]).ok_or_else(|| err(n, "bad start state"))?;
        let goals = w[5..]
            .iter()
            .map(|s| parse_cell(s).ok_or_else(|| err(n, format!("bad cell `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        inst.agents.push(AgentTask { start, goals });
    }
    Ok(inst)
}

pub fn write_plan(plan: &Plan) -> String {
    let mut out = String::from(match plan.status {
        PlanStatus::Success => "plan success\n",
        PlanStatus::Failed => "plan failed\n",
    });
    for (i, p) in plan.paths.iter().enumerate() {
        let _ = write!(out, "path {i}");
        for s in &p.states {
            let _ = write!(out, " {s}");
        }
        out.push('\n');
    }
    for c in &plan.conflicts {
        let (kind, loc) = match c.location {
            ConflictLocation::Vertex(v) => ("vertex", cell_str(v)),
            ConflictLocation::Edge(a, b) => ("edge", format!("{}>{}", cell_str(a), cell_str(b))),
        };
        let _ = writeln!(out, "conflict {kind} {} {} {} {loc}", c.agents.0, c.agents.1, c.timestep);
    }
    out
}

/// Parse a plan. Goal visit times are recomputed from `goals` when given.
pub fn parse_plan(text: &str, goals: Option<&[Vec<Cell>]>) -> Result<Plan, FormatError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (n, header) = lines.next().ok_or_else(|| err(0, "empty document"))?;
    let status = match header.trim() {
        "plan success" => PlanStatus::Success,
        "plan failed" => PlanStatus::Failed,
        _ => return Err(err(n, "expected `plan success|failed`")),
    };
    let mut paths = Vec::new();
    let mut conflicts = Vec::new();
    for (n, line) in lines {
        let w: Vec<&str> = line.split_whitespace().collect();
        match w.first().copied() {
            Some("path") => {
                if w.len() < 3 || w[1].parse::<usize>().ok() != Some(paths.len()) {
                    return Err(err(n, "expected `path ID STATE...` with consecutive ids"));
                }
                let states = w[2..]
                    .iter()
                    .map(|s| parse_state(s).ok_or_else(|| err(n, format!("bad state `{s}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let g = goals.and_then(|g| g.get(paths.len())).map_or(&[][..], |g| &g[..]);
                paths.push(Path::new(states, g));
            }
            Some("conflict") if w.len() == 6 => {
                let a: usize = w[2].parse().map_err(|_| err(n, "bad agent"))?;
                let b: usize = w[3].parse().map_err(|_| err(n, "bad agent"))?;
                let timestep: u32 = w[4].parse().map_err(|_| err(n, "bad timestep"))?;
                let (kind, location) = match w[1] {
                    "vertex" => (
                        ConflictKind::Vertex,
                        ConflictLocation::Vertex(parse_cell(w[5]).ok_or_else(|| err(n, "bad cell"))?),
                    ),
                    "edge" => {
                        let (x, y) = w[5].split_once('>').ok_or_else(|| err(n, "bad edge"))?;
                        let x = parse_cell(x).ok_or_else(|| err(n, "bad cell"))?;
                        let y = parse_cell(y).ok_or_else(|| err(n, "bad cell"))?;
                        (ConflictKind::Edge, ConflictLocation::Edge(x, y))
                    }
                    k => return Err(err(n, format!("unknown conflict kind `{k}`"))),
                };
                conflicts.push(Conflict {
                    kind,
                    agents: (a, b),
                    location,
                    timestep,
                });
            }
            _ => return Err(err(n, "expected `path` or `conflict` line")),
        }
    }
    Ok(Plan {
        status,
        paths,
        conflicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapf::check_conflicts;

    #[test]
    fn instance_round_trip() {
        let inst = MapfInstance {
            agents: vec![
                AgentTask {
                    start: AgentState::new(Cell::new(0, 0), Orientation::North),
                    goals: vec![Cell::new(0, 3), Cell::new(2, 2)],
                },
                AgentTask {
                    start: AgentState::new(Cell::new(3, 1), Orientation::West),
                    goals: vec![Cell::new(1, 1)],
                },
            ],
            model: PlanModel::Rotation,
            window: Window::Steps(5),
            semantics: Semantics::Transient,
            budget: 0.5,
        };
        let text = write_instance(&inst);
        assert_eq!(
            text.lines().nth(1),
            Some("agent 0 start 0,0,N goals 0,3 2,2")
        );
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn plan_round_trip_with_conflicts() {
        let s = |r, c, h| AgentState::new(Cell::new(r, c), h);
        let paths = vec![
            Path::new(vec![s(0, 0, Orientation::North), s(0, 1, Orientation::East)], &[]),
            Path::new(vec![s(0, 1, Orientation::North), s(0, 0, Orientation::West)], &[]),
        ];
        let conflicts = check_conflicts(&paths, Window::Unbounded, Semantics::Standard);
        let plan = Plan::failed(paths, conflicts);
        let text = write_plan(&plan);
        assert!(text.contains("conflict edge 0 1 1 0,0>0,1"));
        assert_eq!(parse_plan(&text, None).unwrap(), plan);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_instance("nonsense").is_err());
        assert!(parse_plan("plan success\npath 1 0,0,N\n", None).is_err());
        assert!(parse_plan("plan success\npath 0 0,0,Q\n", None).is_err());
    }
}
