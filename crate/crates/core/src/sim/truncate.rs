//! Cut planned paths down to a prefix the dependency graph can execute.

use crate::mapf::{check_conflicts, rotation_cycles, Path, Semantics, Window};

/// Repeatedly truncate paths just before their first conflict (standard
/// semantics, no window, so the final cell of a path is held forever) and
/// before any rotation cycle, until the set is conflict-free. Returns the
/// number of truncated paths.
pub fn executable_prefix(paths: &mut [Path]) -> usize {
    let mut cut = vec![false; paths.len()];
    loop {
        let mut changed = false;
        let mut limit: Vec<Option<u32>> = vec![None; paths.len()];
        let cap = |a: usize, t: u32, limit: &mut Vec<Option<u32>>| {
            let t = t.saturating_sub(1);
            limit[a] = Some(limit[a].map_or(t, |l| l.min(t)));
        };
        for c in check_conflicts(paths, Window::Unbounded, Semantics::Standard) {
            cap(c.agents.0, c.timestep, &mut limit);
            cap(c.agents.1, c.timestep, &mut limit);
        }
        let horizon = paths.iter().map(Path::len).max().unwrap_or(0);
        for t in 1..=horizon {
            for cycle in rotation_cycles(paths, t) {
                for a in cycle {
                    cap(a, t, &mut limit);
                }
            }
        }
        for (a, l) in limit.into_iter().enumerate() {
            if let Some(t) = l {
                if t < paths[a].len() {
                    paths[a].truncate(t);
                    cut[a] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return cut.iter().filter(|&&c| c).count();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{Cell, Orientation};
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
    fn conflict_free_paths_untouched() {
        let mut p = vec![path(&[(0, 0), (0, 1)]), path(&[(1, 0), (1, 1)])];
        assert_eq!(executable_prefix(&mut p), 0);
        assert_eq!(p[0].len(), 1);
    }

    #[test]
    fn cuts_before_vertex_conflict() {
        let mut p = vec![path(&[(0, 0), (0, 1), (0, 2)]), path(&[(1, 2), (0, 2)])];
        executable_prefix(&mut p);
        assert!(check_conflicts(&p, Window::Unbounded, Semantics::Standard).is_empty());
        // agent 1 parks on (0,2) first and keeps its path
        assert_eq!(p[1].len(), 1);
        assert_eq!(p[0].len(), 1);
    }

    #[test]
    fn breaks_rotation_cycle() {
        let mut p = vec![
            path(&[(0, 0), (0, 1)]),
            path(&[(0, 1), (1, 1)]),
            path(&[(1, 1), (1, 0)]),
            path(&[(1, 0), (0, 0)]),
        ];
        executable_prefix(&mut p);
        assert!(p.iter().all(|x| x.len() == 0));
    }

    #[test]
    fn parked_agent_blocks_later_passer() {
        // agent 0 stops at (0,1); agent 1 would cross it later
        let mut p = vec![path(&[(0, 0), (0, 1)]), path(&[(1, 1), (1, 1), (0, 1), (0, 2)])];
        executable_prefix(&mut p);
        assert!(check_conflicts(&p, Window::Unbounded, Semantics::Standard).is_empty());
        assert_eq!(p[1].cell_at(10), Cell::new(1, 1));
    }
}
