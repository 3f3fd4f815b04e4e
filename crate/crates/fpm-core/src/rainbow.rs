//! Exact search for a rainbow matching of a given size: a matching whose
//! edges have pairwise-distinct colors.
//!
//! The search is a depth-first branch and bound over colors ordered by
//! scarcity (fewest edges first), trying each color's edges in index order
//! and then the branch that skips the color. Failed states are memoized on
//! the occupied-vertex set restricted to vertices that still matter, so the
//! search is exact: it reports absence only after exhausting the space.
//! Desk-scale targets (k up to ~20) are the intended regime.

use std::collections::HashSet;
use std::hash::Hash;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::graph::{ColoredGraph, Matching};

/// A request for a rainbow matching of exactly `target_size` edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RainbowQuery {
    pub target_size: usize,
    /// Optional cap on search-node expansions; `None` runs to completion.
    pub node_budget: Option<u64>,
}

impl RainbowQuery {
    pub fn new(target_size: usize) -> Self {
        assert!(target_size >= 1, "target_size must be at least 1");
        Self {
            target_size,
            node_budget: None,
        }
    }

    pub fn with_budget(target_size: usize, node_budget: u64) -> Self {
        let mut q = Self::new(target_size);
        q.node_budget = Some(node_budget);
        q
    }
}

/// Search outcome. `BudgetExceeded` is distinct from `NotFound`: it gives no
/// information about existence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RainbowOutcome {
    Found(Matching),
    NotFound,
    BudgetExceeded,
}

impl RainbowOutcome {
    pub fn into_matching(self) -> Option<Matching> {
        match self {
            RainbowOutcome::Found(m) => Some(m),
            _ => None,
        }
    }
}

static CALLS: AtomicU64 = AtomicU64::new(0);

/// Number of [`find_rainbow_matching`] invocations in this process; lets
/// tests assert that a code path never entered the rainbow machinery.
pub fn call_count() -> u64 {
    CALLS.load(Ordering::Relaxed)
}

/// Finds a rainbow matching of size exactly `q.target_size`, or proves none
/// exists. Deterministic: ties are broken toward lower edge indices.
pub fn find_rainbow_matching(g: &ColoredGraph, q: &RainbowQuery) -> RainbowOutcome {
    CALLS.fetch_add(1, Ordering::Relaxed);
    let k = q.target_size;
    if k > g.num_colors() || k > g.num_vertices() / 2 {
        return RainbowOutcome::NotFound;
    }
    // Scarcest color first; empty colors can never contribute.
    let mut order: Vec<usize> = (0..g.num_colors())
        .filter(|&c| !g.edges_of_color(c).is_empty())
        .collect();
    order.sort_by_key(|&c| (g.edges_of_color(c).len(), c));
    if order.len() < k {
        return RainbowOutcome::NotFound;
    }
    if g.num_vertices() <= 128 {
        Search::<u128>::run(g, &order, k, q.node_budget)
    } else {
        Search::<WideMask>::run(g, &order, k, q.node_budget)
    }
}

/// Occupied-vertex set abstraction; u128 covers every desk-scale instance,
/// the vector fallback keeps larger files correct.
trait VertexMask: Clone + Eq + Hash {
    fn empty(n: usize) -> Self;
    fn test(&self, v: usize) -> bool;
    fn set(&mut self, v: usize);
    fn intersect(&self, other: &Self) -> Self;
}

impl VertexMask for u128 {
    fn empty(_n: usize) -> Self {
        0
    }
    fn test(&self, v: usize) -> bool {
        self & (1u128 << v) != 0
    }
    fn set(&mut self, v: usize) {
        *self |= 1u128 << v;
    }
    fn intersect(&self, other: &Self) -> Self {
        self & other
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct WideMask(Vec<u64>);

impl VertexMask for WideMask {
    fn empty(n: usize) -> Self {
        WideMask(vec![0; n / 64 + 1])
    }
    fn test(&self, v: usize) -> bool {
        self.0[v / 64] & (1u64 << (v % 64)) != 0
    }
    fn set(&mut self, v: usize) {
        self.0[v / 64] |= 1u64 << (v % 64);
    }
    fn intersect(&self, other: &Self) -> Self {
        WideMask(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a & b)
                .collect(),
        )
    }
}

enum Step {
    Found,
    Exhausted,
    Budget,
}

struct Search<'g, M> {
    g: &'g ColoredGraph,
    order: &'g [usize],
    k: usize,
    /// Vertices touched by colors at position >= i; memo keys are truncated
    /// to this so unrelated occupancy does not fragment the table.
    relevant: Vec<M>,
    memo: HashSet<(u32, u32, M)>,
    chosen: Vec<usize>,
    budget: Option<u64>,
    expanded: u64,
}

impl<'g, M: VertexMask> Search<'g, M> {
    fn run(g: &'g ColoredGraph, order: &'g [usize], k: usize, budget: Option<u64>) -> RainbowOutcome {
        let n = g.num_vertices();
        // Suffix union of endpoint sets over the color order.
        let mut relevant = vec![M::empty(n); order.len() + 1];
        for (i, &c) in order.iter().enumerate().rev() {
            let mut mask = relevant[i + 1].clone();
            for &ei in g.edges_of_color(c) {
                let e = g.edge(ei);
                mask.set(e.u);
                mask.set(e.v);
            }
            relevant[i] = mask;
        }
        let mut search = Search {
            g,
            order,
            k,
            relevant,
            memo: HashSet::new(),
            chosen: Vec::with_capacity(k),
            budget,
            expanded: 0,
        };
        match search.dfs(0, &M::empty(n), 0) {
            Step::Found => RainbowOutcome::Found(
                Matching::from_indices(g, search.chosen.iter().copied())
                    .expect("search preserves vertex-disjointness"),
            ),
            Step::Exhausted => RainbowOutcome::NotFound,
            Step::Budget => RainbowOutcome::BudgetExceeded,
        }
    }

    fn dfs(&mut self, pos: usize, used: &M, count: usize) -> Step {
        if count == self.k {
            return Step::Found;
        }
        if pos == self.order.len() {
            return Step::Exhausted;
        }
        // Upper bound: each further pick needs a distinct remaining color
        // with an edge that is still free.
        let mut available = 0usize;
        for &c in &self.order[pos..] {
            if self.has_free_edge(c, used) {
                available += 1;
                if count + available >= self.k {
                    break;
                }
            }
        }
        if count + available < self.k {
            return Step::Exhausted;
        }
        let key = (
            pos as u32,
            count as u32,
            used.intersect(&self.relevant[pos]),
        );
        if self.memo.contains(&key) {
            return Step::Exhausted;
        }
        self.expanded += 1;
        if let Some(b) = self.budget {
            if self.expanded > b {
                return Step::Budget;
            }
        }
        let color = self.order[pos];
        for i in 0..self.g.edges_of_color(color).len() {
            let ei = self.g.edges_of_color(color)[i];
            let e = self.g.edge(ei);
            if used.test(e.u) || used.test(e.v) {
                continue;
            }
            let mut next = used.clone();
            next.set(e.u);
            next.set(e.v);
            self.chosen.push(ei);
            match self.dfs(pos + 1, &next, count + 1) {
                Step::Found => return Step::Found,
                Step::Budget => return Step::Budget,
                Step::Exhausted => {
                    self.chosen.pop();
                }
            }
        }
        match self.dfs(pos + 1, used, count) {
            Step::Found => return Step::Found,
            Step::Budget => return Step::Budget,
            Step::Exhausted => {}
        }
        self.memo.insert(key);
        Step::Exhausted
    }

    fn has_free_edge(&self, color: usize, used: &M) -> bool {
        self.g.edges_of_color(color).iter().any(|&ei| {
            let e = self.g.edge(ei);
            !used.test(e.u) && !used.test(e.v)
        })
    }
}
