use std::borrow::Borrow;

use rustc_hash::FxHashMap;

use super::{Conflict, ConflictKind, ConflictLocation, Path, Semantics, Window};
use crate::gridmap::Cell;

/// Discrete vertex/edge conflict detection over a set of timestep paths.
///
/// Standard semantics pads shorter paths with their final state; transient
/// semantics only compares agents while both paths are defined.
#[derive(Debug, Clone, Copy)]
pub struct ConflictChecker {
    pub window: Window,
    pub semantics: Semantics,
}

impl ConflictChecker {
    pub fn new(window: Window, semantics: Semantics) -> Self {
        ConflictChecker { window, semantics }
    }

    fn horizon<P: Borrow<Path>>(&self, paths: &[P]) -> u32 {
        let longest = paths.iter().map(|p| p.borrow().len()).max().unwrap_or(0);
        match self.window.steps() {
            Some(w) => longest.min(w),
            None => longest,
        }
    }

    #[inline]
    fn defined(&self, path: &Path, t: u32) -> bool {
        self.semantics == Semantics::Standard || t <= path.len()
    }

    /// Conflicts at one timestep, unsorted.
    fn conflicts_at<P: Borrow<Path>>(&self, paths: &[P], t: u32, scratch: &mut Scratch, out: &mut Vec<Conflict>) {
        scratch.current.clear();
        for (i, p) in paths.iter().enumerate() {
            let p = p.borrow();
            if self.defined(p, t) {
                scratch.current.push((p.cell_at(t), i));
            }
        }
        scratch.current.sort_unstable();
        for run in scratch.current.chunk_by(|a, b| a.0 == b.0) {
            for x in 0..run.len() {
                for y in x + 1..run.len() {
                    out.push(Conflict {
                        kind: ConflictKind::Vertex,
                        agents: (run[x].1, run[y].1),
                        location: ConflictLocation::Vertex(run[x].0),
                        timestep: t,
                    });
                }
            }
        }
        if t == 0 {
            return;
        }
        scratch.previous.clear();
        for (i, p) in paths.iter().enumerate() {
            let p = p.borrow();
            if self.defined(p, t) && self.defined(p, t - 1) {
                scratch.previous.insert(p.cell_at(t - 1), i);
            }
        }
        for (i, p) in paths.iter().enumerate() {
            let p = p.borrow();
            if !(self.defined(p, t) && self.defined(p, t - 1)) {
                continue;
            }
            let (from, to) = (p.cell_at(t - 1), p.cell_at(t));
            if from == to {
                continue;
            }
            if let Some(&j) = scratch.previous.get(&to) {
                if j > i && paths[j].borrow().cell_at(t) == from {
                    out.push(Conflict {
                        kind: ConflictKind::Edge,
                        agents: (i, j),
                        location: ConflictLocation::Edge(from, to),
                        timestep: t,
                    });
                }
            }
        }
    }

    pub fn all<P: Borrow<Path>>(&self, paths: &[P]) -> Vec<Conflict> {
        let mut scratch = Scratch::default();
        let mut out = Vec::new();
        for t in 0..=self.horizon(paths) {
            self.conflicts_at(paths, t, &mut scratch, &mut out);
        }
        out.sort_by_key(Conflict::sort_key);
        out
    }

    /// Earliest conflict by (timestep, agent pair).
    pub fn first<P: Borrow<Path>>(&self, paths: &[P]) -> Option<Conflict> {
        let mut scratch = Scratch::default();
        let mut out = Vec::new();
        for t in 0..=self.horizon(paths) {
            self.conflicts_at(paths, t, &mut scratch, &mut out);
            if !out.is_empty() {
                return out.into_iter().min_by_key(Conflict::sort_key);
            }
        }
        None
    }
}

#[derive(Default)]
struct Scratch {
    current: Vec<(Cell, usize)>,
    previous: FxHashMap<Cell, usize>,
}

/// All vertex and edge conflicts within `window`, sorted by timestep then agent pair.
pub fn check_conflicts(paths: &[Path], window: Window, semantics: Semantics) -> Vec<Conflict> {
    ConflictChecker::new(window, semantics).all(paths)
}

pub fn first_conflict(paths: &[Path], window: Window, semantics: Semantics) -> Option<Conflict> {
    ConflictChecker::new(window, semantics).first(paths)
}

/// Whether two paths collide anywhere within `window`.
pub fn paths_collide(a: &Path, b: &Path, window: Window, semantics: Semantics) -> bool {
    let end = match semantics {
        Semantics::Standard => a.len().max(b.len()),
        Semantics::Transient => a.len().min(b.len()),
    };
    let end = window.steps().map_or(end, |w| end.min(w));
    (0..=end).any(|t| {
        let (ac, bc) = (a.cell_at(t), b.cell_at(t));
        ac == bc
            || (t > 0 && ac != a.cell_at(t - 1) && ac == b.cell_at(t - 1) && bc == a.cell_at(t - 1))
    })
}

/// Groups of agents that rotate around a cycle of cells at arrival timestep
/// `t` (each moving into the cell another one leaves). Paths are padded.
pub fn rotation_cycles(paths: &[Path], t: u32) -> Vec<Vec<usize>> {
    if t == 0 {
        return Vec::new();
    }
    let mut leaving: FxHashMap<Cell, usize> = FxHashMap::default();
    for (i, p) in paths.iter().enumerate() {
        if p.cell_at(t - 1) != p.cell_at(t) {
            leaving.insert(p.cell_at(t - 1), i);
        }
    }
    // successor of a mover: the mover that currently occupies its target cell
    let next = |i: usize| leaving.get(&paths[i].cell_at(t)).copied();
    let mut state = vec![0u8; paths.len()];
    let mut cycles = Vec::new();
    let mut movers: Vec<usize> = leaving.values().copied().collect();
    movers.sort_unstable();
    for start in movers {
        if state[start] != 0 {
            continue;
        }
        let mut trail = Vec::new();
        let mut cur = Some(start);
        while let Some(i) = cur {
            if state[i] == 2 {
                break;
            }
            if state[i] == 1 {
                let pos = trail.iter().position(|&x| x == i).expect("on trail");
                let mut cycle: Vec<usize> = trail[pos..].to_vec();
                cycle.sort_unstable();
                cycles.push(cycle);
                break;
            }
            state[i] = 1;
            trail.push(i);
            cur = next(i);
        }
        for i in trail {
            state[i] = 2;
        }
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::Orientation;
    use crate::mapf::AgentState;

    fn path(cells: &[(u32, u32)]) -> Path {
        Path::new(
            cells
                .iter()
                .map(|&(r, c)| AgentState::new(Cell::new(r, c), Orientation::North))
                .collect(),
            &[],
        )
    }

    #[test]
    fn swap_is_edge_conflict() {
        let a = path(&[(0, 0), (0, 1)]);
        let b = path(&[(0, 1), (0, 0)]);
        let c = check_conflicts(&[a, b], Window::Unbounded, Semantics::Standard);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, ConflictKind::Edge);
        assert_eq!(c[0].timestep, 1);
        assert_eq!(c[0].agents, (0, 1));
    }

    #[test]
    fn same_cell_is_vertex_conflict() {
        let a = path(&[(0, 0), (0, 1), (0, 2), (1, 2)]);
        let b = path(&[(2, 2), (2, 2), (2, 2), (1, 2)]);
        let c = check_conflicts(&[a, b], Window::Unbounded, Semantics::Standard);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].kind, ConflictKind::Vertex);
        assert_eq!(c[0].timestep, 3);
        assert_eq!(c[0].location, ConflictLocation::Vertex(Cell::new(1, 2)));
    }

    #[test]
    fn disjoint_paths_have_no_conflicts() {
        let a = path(&[(0, 0), (0, 1), (0, 2)]);
        let b = path(&[(3, 0), (3, 1), (3, 2)]);
        assert!(check_conflicts(&[a, b], Window::Unbounded, Semantics::Standard).is_empty());
    }

    #[test]
    fn padding_depends_on_semantics() {
        // a parks at (0,1) from t=1; b passes through at t=2
        let a = path(&[(0, 0), (0, 1)]);
        let b = path(&[(1, 1), (1, 1), (0, 1), (0, 2)]);
        let paths = [a, b];
        assert_eq!(check_conflicts(&paths, Window::Unbounded, Semantics::Standard).len(), 1);
        assert!(check_conflicts(&paths, Window::Unbounded, Semantics::Transient).is_empty());
        assert!(check_conflicts(&paths, Window::Steps(1), Semantics::Standard).is_empty());
        assert_eq!(check_conflicts(&paths, Window::Steps(2), Semantics::Standard).len(), 1);
    }

    #[test]
    fn three_way_vertex_reports_all_pairs() {
        let a = path(&[(0, 1), (1, 1)]);
        let b = path(&[(1, 0), (1, 1)]);
        let c = path(&[(1, 2), (1, 1)]);
        let found = check_conflicts(&[a, b, c], Window::Unbounded, Semantics::Standard);
        let pairs: Vec<_> = found.iter().map(|c| c.agents).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn detects_rotation_cycle() {
        // 2x2 block rotating clockwise
        let a = path(&[(0, 0), (0, 1)]);
        let b = path(&[(0, 1), (1, 1)]);
        let c = path(&[(1, 1), (1, 0)]);
        let d = path(&[(1, 0), (0, 0)]);
        let follower = path(&[(2, 2), (2, 3)]);
        let paths = [a, b, c, d, follower];
        assert!(check_conflicts(&paths, Window::Unbounded, Semantics::Standard).is_empty());
        assert_eq!(rotation_cycles(&paths, 1), vec![vec![0, 1, 2, 3]]);
        // a chain is not a cycle
        let chain = [path(&[(0, 0), (0, 1)]), path(&[(0, 1), (0, 2)])];
        assert!(rotation_cycles(&chain, 1).is_empty());
    }
}
