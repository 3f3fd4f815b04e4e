//! Greedy round-based approximation solvers.
//!
//! A *round* sweeps colors in increasing order and picks at most one still-
//! available edge per color, deleting the picked edge's neighborhood from
//! the residual graph. The two solvers wrap rounds in a probing loop over a
//! guess `T` of the optimum size: each probe produces a candidate matching,
//! candidates that fail the `T`-relaxed balance bounds are discarded, and
//! the largest survivor is returned together with the bounds it actually
//! certifies.
//!
//! With a positive lower bound the probe first extracts a rainbow matching
//! with one edge of every color (if none exists, no balanced matching can
//! contain every color and the instance is infeasible). The upper-bound-only
//! solver never touches the rainbow machinery and runs in polynomial time.

use num_traits::Zero;

use crate::graph::{matching_within_bounds, ColoredGraph, FairnessSpec, Matching, SolveReport};
use crate::rainbow::{find_rainbow_matching, RainbowOutcome, RainbowQuery};
use crate::{Error, Rat};

/// Residual graph plus the matching accumulated so far.
///
/// Residual edges never share a vertex with a matched edge, and the residual
/// set only shrinks: every mutation goes through [`RoundState::add_edge`].
#[derive(Debug, Clone)]
pub struct RoundState {
    alive: Vec<bool>,
    vertex_used: Vec<bool>,
    picked: Vec<usize>,
    color_counts: Vec<usize>,
}

impl RoundState {
    /// Fresh state: every edge residual, empty matching.
    pub fn new(g: &ColoredGraph) -> Self {
        Self {
            alive: vec![true; g.num_edges()],
            vertex_used: vec![false; g.num_vertices()],
            picked: Vec::new(),
            color_counts: vec![0; g.num_colors()],
        }
    }

    pub fn matched_count(&self) -> usize {
        self.picked.len()
    }

    pub fn color_count(&self, color: usize) -> usize {
        self.color_counts[color]
    }

    /// Indices of edges still in the residual graph, ascending.
    pub fn residual_edges(&self) -> Vec<usize> {
        self.alive
            .iter()
            .enumerate()
            .filter_map(|(i, &a)| a.then_some(i))
            .collect()
    }

    /// The accumulated matching, revalidated on the way out.
    pub fn matching(&self, g: &ColoredGraph) -> Matching {
        Matching::from_indices(g, self.picked.iter().copied())
            .expect("round bookkeeping preserves vertex-disjointness")
    }

    /// Adds edge `e` to the matching and removes it and all edges sharing a
    /// vertex with it from the residual graph.
    fn add_edge(&mut self, g: &ColoredGraph, e: usize) {
        debug_assert!(self.alive[e]);
        let edge = g.edge(e);
        self.picked.push(e);
        self.color_counts[edge.color] += 1;
        self.vertex_used[edge.u] = true;
        self.vertex_used[edge.v] = true;
        for endpoint in [edge.u, edge.v] {
            for &i in g.incident_edges(endpoint) {
                self.alive[i] = false;
            }
        }
    }

    fn first_alive_of_color(&self, g: &ColoredGraph, color: usize) -> Option<usize> {
        g.edges_of_color(color)
            .iter()
            .copied()
            .find(|&i| self.alive[i])
    }
}

/// Per-color cap for the upper-bound-only rounds: skip a color once
/// `count >= cap_num / cap_den`.
#[derive(Debug, Clone, Copy)]
struct ColorCap {
    num: i128,
    den: i128,
}

impl ColorCap {
    fn reached(&self, count: usize) -> bool {
        (count as i128) * self.den >= self.num
    }
}

/// One sweep over the colors in increasing order: for each color with a
/// residual edge, pick the lowest-index such edge and delete its
/// neighborhood. At most one edge is added per color, and the added edges
/// are pairwise disjoint and of distinct colors.
pub fn run_round(g: &ColoredGraph, state: RoundState) -> RoundState {
    let mut state = state;
    round_once(g, &mut state, None, None);
    state
}

/// Shared round body. `stop_at` truncates the sweep the moment the matching
/// reaches that size (before the next color is considered); `cap` silences
/// colors whose count already reached the threshold. Returns edges added.
fn round_once(
    g: &ColoredGraph,
    state: &mut RoundState,
    stop_at: Option<usize>,
    cap: Option<ColorCap>,
) -> usize {
    let mut added = 0;
    for color in 0..g.num_colors() {
        if let Some(target) = stop_at {
            if state.matched_count() >= target {
                break;
            }
        }
        if let Some(cap) = cap {
            if cap.reached(state.color_count(color)) {
                continue;
            }
        }
        if let Some(e) = state.first_alive_of_color(g, color) {
            state.add_edge(g, e);
            added += 1;
        }
    }
    added
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Candidate selection shared by both probing loops: largest size wins, ties
/// go to the smaller probe value.
struct BestCandidate {
    inner: Option<(usize, usize, Matching, Rat, Rat)>,
}

impl BestCandidate {
    fn new() -> Self {
        Self { inner: None }
    }

    fn offer(&mut self, probe: usize, m: Matching, lower: Rat, upper: Rat) {
        let better = match &self.inner {
            None => true,
            Some((size, t, ..)) => m.len() > *size || (m.len() == *size && probe < *t),
        };
        if better {
            self.inner = Some((m.len(), probe, m, lower, upper));
        }
    }

    fn into_report(self) -> Option<SolveReport> {
        self.inner
            .map(|(_, t, m, lower, upper)| SolveReport::new(m, lower, upper, Some(t)))
    }
}

/// Solver for specs with `alpha > 0`.
///
/// For every probe `T` in `[l, floor(n/2)]` (`T = OPT` is always probed,
/// since a matching cannot exceed `floor(n/2)` edges): when `T <= 4*l^2` the
/// candidate is a rainbow matching with one edge per color; otherwise that
/// rainbow matching is extended with rounds until exactly `ceil(T / (4*l))`
/// edges are picked or the residual graph is exhausted. A candidate survives
/// only if it is balanced under the relaxed bounds
/// `[alpha / (1 + 4*l/T), beta * (1 + 4*l/T)]`; the largest survivor is
/// returned with those bounds recorded. `None` means no rainbow matching
/// with all `l` colors exists (the instance is infeasible) or no candidate
/// certified its bounds.
pub fn solve_alpha_positive(
    g: &ColoredGraph,
    spec: &FairnessSpec,
) -> Result<Option<SolveReport>, Error> {
    if spec.alpha().is_zero() {
        return Err(Error::AlphaIsZero);
    }
    let l = g.num_colors();
    let base = match find_rainbow_matching(g, &RainbowQuery::new(l)) {
        RainbowOutcome::Found(m) => m,
        RainbowOutcome::NotFound => return Ok(None),
        RainbowOutcome::BudgetExceeded => unreachable!("no budget configured"),
    };
    let mut best = BestCandidate::new();
    for t in l..=g.num_vertices() / 2 {
        let candidate = if t <= 4 * l * l {
            base.clone()
        } else {
            extend_with_rounds(g, &base, ceil_div(t, 4 * l))
        };
        let (lower, upper) = relaxed_bounds(spec, t, 4 * l);
        if matching_within_bounds(&candidate, lower, upper) {
            best.offer(t, candidate, lower, upper);
        }
    }
    Ok(best.into_report())
}

/// `[alpha / (1 + slack/t), beta * (1 + slack/t)]` as exact rationals.
fn relaxed_bounds(spec: &FairnessSpec, t: usize, slack: usize) -> (Rat, Rat) {
    let factor = Rat::new((t + slack) as i64, t as i64);
    (spec.alpha() / factor, spec.beta() * factor)
}

/// Seeds the state with `base`, then runs rounds until the matching reaches
/// `target` edges (truncating mid-round) or a round adds nothing.
fn extend_with_rounds(g: &ColoredGraph, base: &Matching, target: usize) -> Matching {
    let mut state = RoundState::new(g);
    for &e in base.edge_indices() {
        state.add_edge(g, e);
    }
    while state.matched_count() < target {
        if round_once(g, &mut state, Some(target), None) == 0 {
            break;
        }
    }
    state.matching(g)
}

/// Polynomial-time solver for the upper-bound-only case (`alpha = 0`).
///
/// For every probe `T` in `[1, n]`: when `T <= 2*l` the candidate is the
/// single lowest-index edge; otherwise rounds run from scratch with two
/// cautions, both in exact rationals — a color is skipped once it holds at
/// least `beta * T / (2*l)` edges, and the loop stops at the first round
/// boundary where at least `T / (2*l) - 1` edges have been chosen.
/// Candidates violating the relaxed upper bound `beta * (1 + 2*l/T)` for any
/// color are discarded and the largest survivor is returned. Probes run past
/// `floor(n/2)` on purpose: guesses above any achievable size still generate
/// candidates, and those candidates carry tighter certificates that can
/// survive where small-probe candidates fail.
pub fn solve_beta_limited(
    g: &ColoredGraph,
    spec: &FairnessSpec,
) -> Result<Option<SolveReport>, Error> {
    if !spec.alpha().is_zero() {
        return Err(Error::AlphaIsPositive);
    }
    if g.num_edges() == 0 {
        return Ok(None);
    }
    let l = g.num_colors();
    let mut best = BestCandidate::new();
    for t in 1..=g.num_vertices() {
        let candidate = if t <= 2 * l {
            Matching::from_indices(g, [0]).expect("graph has an edge")
        } else {
            capped_rounds(g, spec.beta(), t, l)
        };
        let (_, upper) = relaxed_bounds(spec, t, 2 * l);
        if matching_within_bounds(&candidate, Rat::zero(), upper) {
            best.offer(t, candidate, Rat::zero(), upper);
        }
    }
    Ok(best.into_report())
}

fn capped_rounds(g: &ColoredGraph, beta: Rat, t: usize, l: usize) -> Matching {
    let mut state = RoundState::new(g);
    let cap = ColorCap {
        num: *beta.numer() as i128 * t as i128,
        den: *beta.denom() as i128 * (2 * l) as i128,
    };
    // |M| >= T/(2l) - 1  <=>  |M| * 2l >= T - 2l
    let stop_num = t as i128 - (2 * l) as i128;
    loop {
        if (state.matched_count() as i128) * (2 * l) as i128 >= stop_num {
            break;
        }
        if round_once(g, &mut state, None, Some(cap)) == 0 {
            break;
        }
    }
    state.matching(g)
}
