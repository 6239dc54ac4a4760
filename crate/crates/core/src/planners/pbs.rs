//! Priority-based search: depth-first over partial priority orderings.

use std::rc::Rc;

use rustc_hash::FxHashSet;

use super::prioritized::{query, unconstrained_path};
use crate::gridmap::DistanceOracle;
use crate::mapf::{
    paths_collide, space_time_astar, Conflict, ConflictChecker, MapfInstance, Path, Plan,
    ReservationTable, SearchBudget, SearchError,
};

/// Transitively closed "has priority over" relation as per-agent bitsets.
#[derive(Clone)]
struct Ordering {
    words: usize,
    /// `higher[a]` holds every agent that must be avoided by `a`.
    higher: Vec<u64>,
}

impl Ordering {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Ordering {
            words,
            higher: vec![0; n * words],
        }
    }

    #[inline]
    fn row(&self, a: usize) -> &[u64] {
        &self.higher[a * self.words..(a + 1) * self.words]
    }

    #[inline]
    fn is_higher(&self, hi: usize, lo: usize) -> bool {
        self.row(lo)[hi / 64] >> (hi % 64) & 1 == 1
    }

    fn higher_than(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(a).iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }

    fn rank(&self, a: usize) -> u32 {
        self.row(a).iter().map(|w| w.count_ones()).sum()
    }

    /// Add `hi ≺ lo`. Returns false if that would create a cycle.
    fn add(&mut self, hi: usize, lo: usize, n: usize) -> bool {
        if hi == lo || self.is_higher(lo, hi) {
            return false;
        }
        let mut src: Vec<u64> = self.row(hi).to_vec();
        src[hi / 64] |= 1 << (hi % 64);
        for a in 0..n {
            if a == lo || self.is_higher(lo, a) {
                let row = &mut self.higher[a * self.words..(a + 1) * self.words];
                for (r, s) in row.iter_mut().zip(&src) {
                    *r |= s;
                }
            }
        }
        true
    }
}

#[derive(Clone)]
struct Node {
    paths: Vec<Rc<Path>>,
    order: Ordering,
    cost: u64,
    conflict_pairs: usize,
    first: Option<Conflict>,
}

struct Pbs<'a> {
    oracle: &'a DistanceOracle,
    inst: &'a MapfInstance,
    checker: ConflictChecker,
}

enum Replan {
    Ok,
    Pruned,
    OutOfBudget,
}

impl Pbs<'_> {
    fn evaluate(&self, node: &mut Node) {
        let conflicts = self.checker.all(&node.paths);
        node.first = conflicts.first().copied();
        node.conflict_pairs = conflicts
            .iter()
            .map(|c| c.agents)
            .collect::<FxHashSet<_>>()
            .len();
        node.cost = node
            .paths
            .iter()
            .map(|p| match self.inst.semantics {
                crate::mapf::Semantics::Standard => p.settle_time(),
                crate::mapf::Semantics::Transient => p.arrival().unwrap_or(p.len()),
            } as u64)
            .sum();
    }

    /// Replan `agent` and, in topological order, every lower agent that now
    /// collides with someone above it.
    fn update(&self, node: &mut Node, agent: usize, budget: &mut SearchBudget) -> Replan {
        let n = self.inst.num_agents();
        let mut affected: Vec<usize> = (0..n)
            .filter(|&a| a == agent || node.order.is_higher(agent, a))
            .collect();
        affected.sort_by_key(|&a| (node.order.rank(a), a));
        let map = self.oracle.map();
        for a in affected {
            let above: Vec<usize> = node.order.higher_than(a).collect();
            let must = a == agent
                || above.iter().any(|&h| {
                    paths_collide(&node.paths[a], &node.paths[h], self.inst.window, self.inst.semantics)
                });
            if !must {
                continue;
            }
            let mut res = ReservationTable::new();
            for &h in &above {
                res.add_path(map, &node.paths[h], self.inst.semantics);
            }
            let task = &self.inst.agents[a];
            match space_time_astar(self.oracle, query(self.inst, task, res.max_time()), &res, budget) {
                Ok(p) => node.paths[a] = Rc::new(p),
                Err(SearchError::BudgetExhausted) => return Replan::OutOfBudget,
                Err(_) => return Replan::Pruned,
            }
        }
        self.evaluate(node);
        Replan::Ok
    }
}

fn better(a: &Node, b: &Node) -> bool {
    (a.conflict_pairs, a.cost) < (b.conflict_pairs, b.cost)
}

fn into_paths(node: Node) -> Vec<Path> {
    node.paths
        .into_iter()
        .map(|p| Rc::try_unwrap(p).unwrap_or_else(|rc| (*rc).clone()))
        .collect()
}

/// Windowed instances only branch on conflicts inside the window; transient
/// instances use transient semantics in the low level.
pub fn plan_pbs(oracle: &DistanceOracle, instance: &MapfInstance, budget: &mut SearchBudget) -> Plan {
    let n = instance.num_agents();
    let pbs = Pbs {
        oracle,
        inst: instance,
        checker: ConflictChecker::new(instance.window, instance.semantics),
    };
    let mut root_paths = Vec::with_capacity(n);
    let mut root_ok = true;
    for (a, task) in instance.agents.iter().enumerate() {
        match space_time_astar(oracle, query(instance, task, 0), &ReservationTable::new(), budget) {
            Ok(p) => root_paths.push(Rc::new(p)),
            Err(_) => {
                root_ok = false;
                root_paths.push(Rc::new(unconstrained_path(oracle, instance, a)));
            }
        }
    }
    let mut root = Node {
        paths: root_paths,
        order: Ordering::new(n),
        cost: 0,
        conflict_pairs: 0,
        first: None,
    };
    pbs.evaluate(&mut root);
    let fail = |best: Node| {
        let conflicts = pbs.checker.all(&best.paths);
        Plan::failed(into_paths(best), conflicts)
    };
    if !root_ok {
        return fail(root);
    }

    let mut best = root.clone();
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        let Some(conflict) = node.first else {
            debug_assert!(pbs.checker.all(&node.paths).is_empty());
            return Plan::success(into_paths(node));
        };
        if better(&node, &best) {
            best = node.clone();
        }
        let (i, j) = conflict.agents;
        let mut children = Vec::with_capacity(2);
        for (hi, lo) in [(i, j), (j, i)] {
            let mut child = node.clone();
            if !child.order.add(hi, lo, n) {
                continue;
            }
            match pbs.update(&mut child, lo, budget) {
                Replan::Ok => children.push(child),
                Replan::Pruned => {}
                Replan::OutOfBudget => return fail(best),
            }
        }
        // expand the cheaper child first
        children.sort_by_key(|c| std::cmp::Reverse((c.cost, c.conflict_pairs)));
        stack.extend(children);
    }
    fail(best)
}
