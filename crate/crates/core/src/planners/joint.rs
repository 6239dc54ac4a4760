//! Exhaustive joint-state search. Exponential in the agent count, so only
//! useful as a ground truth for tiny instances.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use crate::gridmap::{Cell, DistanceOracle};

/// Optimal sum of costs under standard semantics (cost = timestep from which
/// the agent never leaves its goal), pebble moves, vertex and swap conflicts.
/// `None` if unsolvable or more than `max_states` states were expanded.
pub fn joint_optimal_soc(oracle: &DistanceOracle, starts: &[Cell], goals: &[Cell], max_states: usize) -> Option<u64> {
    assert_eq!(starts.len(), goals.len());
    let map = oracle.map();
    let n = starts.len();
    assert!(n <= 8, "joint search is for tiny instances");
    let cells = map.num_cells() as u64;
    let goal_idx: Vec<u32> = goals.iter().map(|&g| map.index(g) as u32).collect();
    let neighbors: Vec<Vec<u32>> = (0..map.num_cells())
        .map(|i| map.neighbors(map.cell(i)).into_iter().map(|c| map.index(c) as u32).collect())
        .collect();
    let dist: Vec<Vec<u32>> = goals.iter().map(|&g| (0..map.num_cells()).map(|i| oracle.pebble(g).at(i)).collect()).collect();

    let encode = |pos: &[u32], done: u32| -> u64 {
        pos.iter().fold(done as u64, |k, &p| k * cells + p as u64)
    };
    let h = |pos: &[u32], done: u32| -> Option<u64> {
        let mut s = 0u64;
        for a in 0..n {
            if done & (1 << a) == 0 {
                let d = dist[a][pos[a] as usize];
                if d == crate::gridmap::UNREACHABLE {
                    return None;
                }
                s += d as u64;
            }
        }
        Some(s)
    };

    let start: Vec<u32> = starts.iter().map(|&c| map.index(c) as u32).collect();
    let full = (1u32 << n) - 1;
    let mut best: FxHashMap<u64, u64> = FxHashMap::default();
    let mut open = BinaryHeap::new();
    best.insert(encode(&start, 0), 0);
    open.push(Reverse((h(&start, 0)?, 0u64, start, 0u32)));
    let mut expanded = 0usize;
    while let Some(Reverse((_, g, pos, done))) = open.pop() {
        if best.get(&encode(&pos, done)).is_some_and(|&b| b < g) {
            continue;
        }
        if done == full {
            return Some(g);
        }
        expanded += 1;
        if expanded > max_states {
            return None;
        }
        let mut push = |pos: Vec<u32>, done: u32, g: u64, open: &mut BinaryHeap<_>| {
            let key = encode(&pos, done);
            if best.get(&key).is_none_or(|&b| g < b) {
                if let Some(hv) = h(&pos, done) {
                    best.insert(key, g);
                    open.push(Reverse((g + hv, g, pos, done)));
                }
            }
        };
        // settle an agent standing on its goal: free
        for a in 0..n {
            if done & (1 << a) == 0 && pos[a] == goal_idx[a] {
                push(pos.clone(), done | (1 << a), g, &mut open);
            }
        }
        // one joint step; every unsettled agent pays one
        let step_cost = (n as u32 - done.count_ones()) as u64;
        let options: Vec<Vec<u32>> = (0..n)
            .map(|a| {
                if done & (1 << a) != 0 {
                    vec![pos[a]]
                } else {
                    std::iter::once(pos[a]).chain(neighbors[pos[a] as usize].iter().copied()).collect()
                }
            })
            .collect();
        let mut choice = vec![0usize; n];
        'joint: loop {
            let next: Vec<u32> = (0..n).map(|a| options[a][choice[a]]).collect();
            let valid = (0..n).all(|a| {
                (a + 1..n).all(|b| next[a] != next[b] && !(next[a] == pos[b] && next[b] == pos[a]))
            });
            if valid {
                push(next, done, g + step_cost, &mut open);
            }
            for a in 0..n {
                choice[a] += 1;
                if choice[a] < options[a].len() {
                    continue 'joint;
                }
                choice[a] = 0;
            }
            break;
        }
    }
    None
}
