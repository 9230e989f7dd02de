//! Orderly generation of multisets up to symmetry.
//!
//! Nodes are sorted index multisets that are least in their orbit. Children
//! append an element no smaller than the current last one; a child is kept
//! only if it is again orbit-least. Since removing the largest element of an
//! orbit-least multiset leaves an orbit-least multiset, every orbit of
//! feasible multisets is reached exactly once.
//!
//! The search first expands a fixed-size frontier sequentially and then
//! explores frontier subtrees in parallel. Subtrees never share pruning
//! state, so values, counts and node totals of completed runs do not depend
//! on the number of worker threads.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::search::SearchBudget;
use crate::symmetry::Symmetries;

/// A symmetry-invariant, subsequence-closed feasibility condition.
pub(crate) trait Constraint: Sync {
    type State: Clone + Send + Sync;

    fn root(&self) -> Self::State;

    /// Largest `c <= cap` such that appending `c` copies of `x` stays
    /// feasible.
    fn admissible_copies(&self, state: &Self::State, x: usize, cap: usize) -> usize;

    fn extend(&self, state: &Self::State, x: usize) -> Self::State;
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Goal {
    /// Longest feasible multiset.
    Maximize,
    /// All orbit representatives of exactly this length.
    Enumerate(usize),
}

#[derive(Debug, Default)]
pub(crate) struct Outcome {
    pub best: Vec<usize>,
    pub found: Vec<Vec<usize>>,
    pub nodes: u64,
    pub complete: bool,
}

const FRONTIER_TARGET: usize = 64;
const FRONTIER_MAX_DEPTH: usize = 3;

struct Node<S> {
    seq: Vec<usize>,
    state: S,
}

struct Shared<'a> {
    budget: &'a SearchBudget,
    start: Instant,
    nodes: AtomicU64,
    stop: AtomicBool,
}

impl Shared<'_> {
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let out_of_time = n % 1024 == 0 && self.start.elapsed().as_secs_f64() > self.budget.max_seconds;
        if n > self.budget.max_nodes || out_of_time {
            self.stop.store(true, Ordering::Relaxed);
        }
        !self.stop.load(Ordering::Relaxed)
    }
}

pub(crate) struct Orderly<'a, C: Constraint> {
    pub sym: &'a Symmetries,
    pub constraint: &'a C,
    pub max_mult: usize,
    pub goal: Goal,
}

/// Per-subtree search state.
struct Local {
    best: Vec<usize>,
    found: Vec<Vec<usize>>,
}

impl<C: Constraint> Orderly<'_, C> {
    pub fn run(&self, budget: &SearchBudget) -> Outcome {
        let shared = Shared {
            budget,
            start: Instant::now(),
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        };
        let mut local = Local {
            best: Vec::new(),
            found: Vec::new(),
        };

        // breadth-first frontier, recording nodes on the way
        let root = Node {
            seq: Vec::new(),
            state: self.constraint.root(),
        };
        let mut frontier = vec![root];
        let mut depth = 0;
        while depth < FRONTIER_MAX_DEPTH && frontier.len() < FRONTIER_TARGET && !frontier.is_empty() {
            let mut next = Vec::new();
            for node in &frontier {
                if !shared.tick() {
                    return self.finish(local, Vec::new(), &shared);
                }
                if self.visit(node, &mut local) {
                    next.extend(self.children(node, &local));
                }
            }
            frontier = next;
            depth += 1;
        }

        let width = budget.parallel_width.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(width)
            .build()
            .expect("thread pool");
        let seed_best = local.best.clone();
        let results: Vec<Local> = pool.install(|| {
            frontier
                .par_iter()
                .map(|node| {
                    let mut sub = Local {
                        best: seed_best.clone(),
                        found: Vec::new(),
                    };
                    self.dfs(node, &mut sub, &shared);
                    sub
                })
                .collect()
        });
        self.finish(local, results, &shared)
    }

    fn finish(&self, mut local: Local, results: Vec<Local>, shared: &Shared) -> Outcome {
        for r in results {
            if r.best.len() > local.best.len() {
                local.best = r.best;
            }
            local.found.extend(r.found);
        }
        local.found.sort();
        Outcome {
            best: local.best,
            found: local.found,
            nodes: shared.nodes.load(Ordering::Relaxed).min(shared.budget.max_nodes),
            complete: !shared.stop.load(Ordering::Relaxed),
        }
    }

    fn dfs(&self, node: &Node<C::State>, local: &mut Local, shared: &Shared) {
        if !shared.tick() {
            return;
        }
        if !self.visit(node, local) {
            return;
        }
        for child in self.children(node, local) {
            self.dfs(&child, local, shared);
            if shared.stop.load(Ordering::Relaxed) {
                return;
            }
        }
    }

    /// Records the node; returns whether it may have children worth visiting.
    fn visit(&self, node: &Node<C::State>, local: &mut Local) -> bool {
        match self.goal {
            Goal::Maximize => {
                if node.seq.len() > local.best.len() {
                    local.best = node.seq.clone();
                }
                true
            }
            Goal::Enumerate(target) => {
                if node.seq.len() == target {
                    local.found.push(node.seq.clone());
                    false
                } else {
                    true
                }
            }
        }
    }

    fn children(&self, node: &Node<C::State>, local: &Local) -> Vec<Node<C::State>> {
        let order = self.sym.cayley().order();
        let (first, last_mult) = match node.seq.last() {
            Some(&last) => (last, node.seq.iter().rev().take_while(|&&y| y == last).count()),
            None => (0, 0),
        };
        let mut room = Vec::with_capacity(order - first);
        for x in first..order {
            let cap = if x == first && !node.seq.is_empty() {
                self.max_mult - last_mult
            } else {
                self.max_mult
            };
            room.push(if cap == 0 {
                0
            } else {
                self.constraint.admissible_copies(&node.state, x, cap)
            });
        }
        let capacity: usize = room.iter().sum();
        let len = node.seq.len();
        let hopeless = match self.goal {
            Goal::Maximize => len + capacity <= local.best.len(),
            Goal::Enumerate(target) => len + capacity < target,
        };
        if hopeless {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut seq = node.seq.clone();
        for (offset, &r) in room.iter().enumerate() {
            if r == 0 {
                continue;
            }
            let x = first + offset;
            seq.push(x);
            if self.sym.is_canonical(&seq) {
                out.push(Node {
                    seq: seq.clone(),
                    state: self.constraint.extend(&node.state, x),
                });
            }
            seq.pop();
        }
        out
    }
}
