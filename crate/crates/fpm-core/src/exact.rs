//! Exact solver for "is there a balanced matching of size exactly k?",
//! via randomized color coding.
//!
//! Each trial recolors the edges so that a balanced matching of size `k`
//! becomes, with probability at least `e^-k`, a rainbow matching of size `k`
//! in the recolored graph — which the exact rainbow search then finds.
//! A rainbow matching in the recolored graph is always a balanced matching
//! in the original one, so the solver is sound regardless of the random
//! draws: every answer is re-verified before it is returned. Repeating for
//! `ceil(e^k * ln(1 / failure_prob))` trials caps the probability of missing
//! an existing solution at `failure_prob`.
//!
//! In the upper-bound-only case each original color is split uniformly into
//! `floor(beta * k)` fresh colors. With a positive lower bound the solver
//! additionally guesses how the `k` edges are distributed over the colors
//! and recolors each color class into exactly that many fresh colors, one
//! guess at a time.

use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{is_balanced, ColoredGraph, FairnessSpec, Matching};
use crate::rainbow::{find_rainbow_matching, RainbowOutcome, RainbowQuery};
use crate::{Error, Rat};

/// Node budget for each in-trial rainbow search. Recolored desk-scale
/// instances stay far below this; a pathological blowup degrades to a
/// failed trial instead of a hang.
const TRIAL_NODE_BUDGET: u64 = 1 << 22;

/// A request for a balanced matching of size exactly `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactQuery {
    pub k: usize,
    pub spec: FairnessSpec,
    pub seed: u64,
    /// Probability of reporting "not found" although a solution exists.
    pub failure_prob: Rat,
}

impl ExactQuery {
    /// Query with the default failure probability of 1/1000.
    pub fn new(k: usize, spec: FairnessSpec, seed: u64) -> Self {
        assert!(k >= 1, "k must be at least 1");
        Self {
            k,
            spec,
            seed,
            failure_prob: Rat::new(1, 1000),
        }
    }

    pub fn with_failure_prob(mut self, failure_prob: Rat) -> Self {
        assert!(
            failure_prob > Rat::new(0, 1) && failure_prob < Rat::new(1, 1),
            "failure_prob must lie in (0, 1)"
        );
        self.failure_prob = failure_prob;
        self
    }
}

/// How an edge recoloring maps back to the original colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recoloring {
    /// edge index -> new color id.
    pub mapping: Vec<usize>,
    /// original color -> its contiguous block of new colors, as
    /// `(first, count)`; blocks are pairwise disjoint.
    pub groups: Vec<(usize, usize)>,
}

/// Diagnostics of a solver run; identical runs produce identical stats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactStats {
    /// Recolor-and-search trials executed.
    pub trials_run: u64,
    /// `(guess index, trial index)` of the successful trial; the guess index
    /// is 0 in the upper-bound-only case.
    pub success: Option<(u64, u64)>,
}

static CALLS: AtomicU64 = AtomicU64::new(0);

/// Number of [`solve_exact`] invocations in this process.
pub fn call_count() -> u64 {
    CALLS.load(Ordering::Relaxed)
}

/// Trials needed so that missing an existing size-`k` solution has
/// probability at most `failure_prob`: each trial succeeds with probability
/// at least `e^-k`, so `ceil(e^k * ln(1 / failure_prob))` trials suffice.
/// Never returns 0.
pub fn trial_count(k: usize, failure_prob: Rat) -> u64 {
    let p = failure_prob.to_f64().expect("failure_prob fits in f64");
    assert!(p > 0.0 && p < 1.0, "failure_prob must lie in (0, 1)");
    let trials = ((k as f64).exp() * (1.0 / p).ln()).ceil();
    (trials as u64).max(1)
}

/// `floor(bound * k)` for a nonnegative rational bound.
fn floor_times(bound: Rat, k: usize) -> usize {
    ((*bound.numer() as i128 * k as i128) / (*bound.denom() as i128)) as usize
}

/// `ceil(bound * k)` for a nonnegative rational bound.
fn ceil_times(bound: Rat, k: usize) -> usize {
    let num = *bound.numer() as i128 * k as i128;
    let den = *bound.denom() as i128;
    (num.div_euclid(den) + i128::from(num.rem_euclid(den) != 0)) as usize
}

/// Splits every original color class uniformly into `k' = floor(beta * k)`
/// fresh colors, giving `l * k'` colors in total. Each edge's new color is
/// drawn independently from its own class's block, so the result is a pure
/// function of `rng`. Errors when `floor(beta * k) = 0`: every color would
/// then exceed the cap, so no fair matching of size `k` can exist.
pub fn recolor_beta_limited<R: Rng>(
    g: &ColoredGraph,
    k: usize,
    beta: Rat,
    rng: &mut R,
) -> Result<(ColoredGraph, Recoloring), Error> {
    let width = floor_times(beta, k);
    if width == 0 {
        return Err(Error::BetaFloorZero { k });
    }
    let groups: Vec<(usize, usize)> = (0..g.num_colors()).map(|c| (c * width, width)).collect();
    Ok(recolor_with_groups(g, groups, rng))
}

/// Recolors color class `j` into exactly `parts[j]` fresh colors; blocks are
/// laid out consecutively. Used by the positive-lower-bound solver with one
/// call per guessed distribution.
pub fn recolor_composition<R: Rng>(
    g: &ColoredGraph,
    parts: &[usize],
    rng: &mut R,
) -> (ColoredGraph, Recoloring) {
    assert_eq!(parts.len(), g.num_colors());
    assert!(parts.iter().all(|&p| p >= 1));
    let mut groups = Vec::with_capacity(parts.len());
    let mut first = 0;
    for &width in parts {
        groups.push((first, width));
        first += width;
    }
    recolor_with_groups(g, groups, rng)
}

fn recolor_with_groups<R: Rng>(
    g: &ColoredGraph,
    groups: Vec<(usize, usize)>,
    rng: &mut R,
) -> (ColoredGraph, Recoloring) {
    let num_new_colors = groups.iter().map(|&(_, w)| w).sum::<usize>().max(1);
    let mapping: Vec<usize> = g
        .edges()
        .iter()
        .map(|e| {
            let (first, width) = groups[e.color];
            first + rng.gen_range(0..width)
        })
        .collect();
    let triples = g
        .edges()
        .iter()
        .zip(&mapping)
        .map(|(e, &c)| (e.u, e.v, c));
    let recolored = ColoredGraph::new(g.num_vertices(), num_new_colors, triples)
        .expect("recoloring preserves the vertex structure");
    (recolored, Recoloring { mapping, groups })
}

/// All ways to write `k` as an ordered sum of `l` parts with
/// `ceil(alpha * k) <= part <= floor(beta * k)`, in lexicographic order.
/// Empty when no such split exists — in particular whenever `l > k` and the
/// lower bound is positive.
pub fn enumerate_compositions(k: usize, l: usize, spec: &FairnessSpec) -> Vec<Vec<usize>> {
    let lo = ceil_times(spec.alpha(), k);
    let hi = floor_times(spec.beta(), k);
    let mut out = Vec::new();
    if lo > hi || l == 0 {
        return out;
    }
    fn rec(
        parts: &mut Vec<usize>,
        pos: usize,
        remaining: usize,
        lo: usize,
        hi: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let left = parts.len() - pos;
        if left == 0 {
            if remaining == 0 {
                out.push(parts.clone());
            }
            return;
        }
        for value in lo..=hi.min(remaining) {
            let rest = remaining - value;
            if rest < lo * (left - 1) || rest > hi * (left - 1) {
                continue;
            }
            parts[pos] = value;
            rec(parts, pos + 1, rest, lo, hi, out);
        }
    }
    rec(&mut vec![0usize; l], 0, k, lo, hi, &mut out);
    out
}

/// Derives the per-trial RNG seed from the master seed, the guess index and
/// the trial index, so trials are reproducible in isolation.
fn trial_seed(master: u64, guess: u64, trial: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
    splitmix(master ^ splitmix(guess.wrapping_mul(0x2545f4914f6cdd1d).wrapping_add(trial)))
}

/// Finds a balanced matching of size exactly `q.k`, or reports that none was
/// found. If a solution exists, the probability of a miss is at most
/// `q.failure_prob`; any returned matching is verified (size `k`, balanced
/// under `q.spec`) before it is handed out, so a returned answer is correct
/// regardless of the randomness.
pub fn solve_exact(g: &ColoredGraph, q: &ExactQuery) -> Option<Matching> {
    solve_exact_with_stats(g, q).0
}

/// [`solve_exact`] plus run diagnostics.
pub fn solve_exact_with_stats(g: &ColoredGraph, q: &ExactQuery) -> (Option<Matching>, ExactStats) {
    CALLS.fetch_add(1, Ordering::Relaxed);
    let mut stats = ExactStats {
        trials_run: 0,
        success: None,
    };
    let trials = trial_count(q.k, q.failure_prob);
    if q.spec.is_beta_limited() {
        if floor_times(q.spec.beta(), q.k) == 0 {
            return (None, stats);
        }
        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(q.seed, 0, trial));
            stats.trials_run += 1;
            let (recolored, _) =
                recolor_beta_limited(g, q.k, q.spec.beta(), &mut rng).expect("width checked");
            if let Some(m) = try_pull_back(g, &recolored, q) {
                stats.success = Some((0, trial));
                return (Some(m), stats);
            }
        }
        return (None, stats);
    }
    // Positive lower bound: every color must contribute, so more colors
    // than k is immediately hopeless.
    if g.num_colors() > q.k {
        return (None, stats);
    }
    for (guess_idx, parts) in enumerate_compositions(q.k, g.num_colors(), &q.spec)
        .into_iter()
        .enumerate()
    {
        for trial in 0..trials {
            let mut rng =
                ChaCha8Rng::seed_from_u64(trial_seed(q.seed, guess_idx as u64 + 1, trial));
            stats.trials_run += 1;
            let (recolored, _) = recolor_composition(g, &parts, &mut rng);
            if let Some(m) = try_pull_back(g, &recolored, q) {
                stats.success = Some((guess_idx as u64, trial));
                return (Some(m), stats);
            }
        }
    }
    (None, stats)
}

/// Runs the rainbow search on the recolored graph and pulls any hit back to
/// the original coloring, verifying it unconditionally. A budget blowup or a
/// verification failure just makes the trial unsuccessful.
fn try_pull_back(g: &ColoredGraph, recolored: &ColoredGraph, q: &ExactQuery) -> Option<Matching> {
    let query = RainbowQuery::with_budget(q.k, TRIAL_NODE_BUDGET);
    match find_rainbow_matching(recolored, &query) {
        RainbowOutcome::Found(m) => {
            // Same edge indices, original colors.
            let pulled = Matching::from_indices(g, m.edge_indices().iter().copied())
                .expect("vertex disjointness does not depend on colors");
            let verified =
                pulled.len() == q.k && is_balanced(&pulled, g, &q.spec).unwrap_or(false);
            debug_assert!(verified, "a rainbow pull-back must be balanced");
            verified.then_some(pulled)
        }
        RainbowOutcome::NotFound | RainbowOutcome::BudgetExceeded => None,
    }
}
