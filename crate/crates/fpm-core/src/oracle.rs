//! Brute-force ground truth for small instances.
//!
//! Enumerates every matching by depth-first search over the edge list and
//! keeps the largest balanced one. Balance is not monotone under edge
//! addition (a prefix may overshoot the upper bound and recover later), so
//! there is no balance-based pruning: every node of the search tree is a
//! complete candidate and is checked as such. The only pruning is the sound
//! size bound `|current| + min(edges left, free vertices / 2)`.

use crate::graph::{counts_within, ColoredGraph, FairnessSpec, Feasibility, Matching};
use crate::{Error, Rat};

/// Refuse instances with more edges than this unless the caller raises the
/// cap; keeps the worst case well under a second.
pub const DEFAULT_EDGE_CAP: usize = 24;

/// Ground truth for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// Size of a maximum balanced matching; 0 when none exists.
    pub opt_size: usize,
    /// A witness of that size (lexicographically smallest edge-index set),
    /// absent when `opt_size == 0`.
    pub opt_matching: Option<Matching>,
    /// Per-color edge counts of the witness; empty when there is none.
    pub per_color: Vec<usize>,
    /// `(color, count)` minimizing the witness's per-color count, lowest
    /// color id on ties.
    pub min_color: Option<(usize, usize)>,
}

struct Dfs<'g> {
    g: &'g ColoredGraph,
    lower: Rat,
    upper: Rat,
    used: Vec<bool>,
    used_count: usize,
    current: Vec<usize>,
    counts: Vec<usize>,
}

impl<'g> Dfs<'g> {
    fn new(g: &'g ColoredGraph, spec: &FairnessSpec) -> Self {
        Self {
            g,
            lower: spec.alpha(),
            upper: spec.beta(),
            used: vec![false; g.num_vertices()],
            used_count: 0,
            current: Vec::new(),
            counts: vec![0; g.num_colors()],
        }
    }

    fn free(&self, e: usize) -> bool {
        let edge = self.g.edge(e);
        !self.used[edge.u] && !self.used[edge.v]
    }

    fn push(&mut self, e: usize) {
        let edge = self.g.edge(e);
        self.used[edge.u] = true;
        self.used[edge.v] = true;
        self.used_count += 2;
        self.counts[edge.color] += 1;
        self.current.push(e);
    }

    fn pop(&mut self, e: usize) {
        let edge = self.g.edge(e);
        self.used[edge.u] = false;
        self.used[edge.v] = false;
        self.used_count -= 2;
        self.counts[edge.color] -= 1;
        self.current.pop();
    }

    /// Most edges any extension can still add.
    fn size_bound(&self, next: usize) -> usize {
        let by_index = self.g.num_edges() - next;
        let by_vertices = (self.g.num_vertices() - self.used_count) / 2;
        by_index.min(by_vertices)
    }

    fn balanced_now(&self) -> bool {
        counts_within(&self.counts, self.current.len(), self.lower, self.upper)
    }

    /// Maximum search: record strictly larger balanced candidates. Because
    /// the DFS extends in increasing index order, the first candidate seen
    /// at a given size is the lexicographically smallest one.
    fn search_max(&mut self, start: usize, best: &mut (usize, Vec<usize>)) {
        for e in start..self.g.num_edges() {
            if !self.free(e) {
                continue;
            }
            self.push(e);
            if self.current.len() > best.0 && self.balanced_now() {
                *best = (self.current.len(), self.current.clone());
            }
            if self.current.len() + self.size_bound(e + 1) > best.0 {
                self.search_max(e + 1, best);
            }
            self.pop(e);
        }
    }

    /// Existence search for an exact size; stops at the first hit.
    fn search_size(&mut self, start: usize, k: usize) -> bool {
        if self.current.len() == k {
            return self.balanced_now();
        }
        for e in start..self.g.num_edges() {
            if self.current.len() + self.size_bound(e) < k {
                return false;
            }
            if !self.free(e) {
                continue;
            }
            self.push(e);
            let hit = self.search_size(e + 1, k);
            self.pop(e);
            if hit {
                return true;
            }
        }
        false
    }
}

fn check_cap(g: &ColoredGraph, cap: usize) -> Result<(), Error> {
    if g.num_edges() > cap {
        return Err(Error::OracleCapExceeded {
            num_edges: g.num_edges(),
            cap,
        });
    }
    Ok(())
}

/// Exhaustively computes a maximum balanced matching, or `opt_size = 0` with
/// no witness. Refuses graphs with more than `cap` edges instead of silently
/// approximating.
pub fn brute_force_opt(
    g: &ColoredGraph,
    spec: &FairnessSpec,
    cap: usize,
) -> Result<OracleResult, Error> {
    check_cap(g, cap)?;
    let mut best = (0usize, Vec::new());
    Dfs::new(g, spec).search_max(0, &mut best);
    let (opt_size, indices) = best;
    if opt_size == 0 {
        return Ok(OracleResult {
            opt_size: 0,
            opt_matching: None,
            per_color: Vec::new(),
            min_color: None,
        });
    }
    let witness = Matching::from_indices(g, indices).expect("search yields matchings");
    debug_assert_eq!(
        crate::graph::feasibility_precheck(g, spec),
        Feasibility::MaybeFeasible,
        "a balanced matching exists, so the precheck may not claim infeasibility"
    );
    let per_color = witness.color_counts().to_vec();
    let min_color = per_color
        .iter()
        .copied()
        .enumerate()
        .min_by_key(|&(c, count)| (count, c));
    Ok(OracleResult {
        opt_size,
        opt_matching: Some(witness),
        per_color,
        min_color,
    })
}

/// Is there a balanced matching of size exactly `k`? Balance is not
/// monotone, so this is not implied by `opt_size >= k`. `k = 0` is false:
/// the empty matching has undefined balance.
pub fn exists_fair_of_size(
    g: &ColoredGraph,
    spec: &FairnessSpec,
    k: usize,
    cap: usize,
) -> Result<bool, Error> {
    check_cap(g, cap)?;
    if k == 0 {
        return Ok(false);
    }
    Ok(Dfs::new(g, spec).search_size(0, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_balanced, random_graph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(n, d)
    }

    fn spec(a: Rat, b: Rat) -> FairnessSpec {
        FairnessSpec::new(a, b).unwrap()
    }

    /// Same graph with the edge list reversed; an independent enumeration
    /// order for guarding pruning bugs.
    fn reversed(g: &ColoredGraph) -> ColoredGraph {
        let triples: Vec<_> = g
            .edges()
            .iter()
            .rev()
            .map(|e| (e.u, e.v, e.color))
            .collect();
        ColoredGraph::new(g.num_vertices(), g.num_colors(), triples).unwrap()
    }

    #[test]
    fn two_disjoint_bicolored_edges() {
        let g = ColoredGraph::new(4, 2, [(0, 1, 0), (2, 3, 1)]).unwrap();
        let r = brute_force_opt(&g, &spec(rat(1, 2), rat(1, 2)), DEFAULT_EDGE_CAP).unwrap();
        assert_eq!(r.opt_size, 2);
        assert_eq!(r.per_color, vec![1, 1]);
        assert_eq!(r.min_color, Some((0, 1)));
        let witness = r.opt_matching.unwrap();
        assert!(is_balanced(&witness, &g, &spec(rat(1, 2), rat(1, 2))).unwrap());
    }

    #[test]
    fn star_with_three_colors_has_no_balanced_matching() {
        // Any matching in a star has one edge, so one color gets share 1.
        let g = ColoredGraph::new(4, 3, [(0, 1, 0), (0, 2, 1), (0, 3, 2)]).unwrap();
        let r = brute_force_opt(&g, &spec(rat(1, 3), rat(1, 3)), DEFAULT_EDGE_CAP).unwrap();
        assert_eq!(r.opt_size, 0);
        assert_eq!(r.opt_matching, None);
        assert_eq!(r.min_color, None);
    }

    #[test]
    fn cap_is_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_graph(12, 2, 0.8, &mut rng);
        assert!(g.num_edges() > 24);
        assert_eq!(
            brute_force_opt(&g, &spec(rat(0, 1), rat(1, 1)), DEFAULT_EDGE_CAP),
            Err(Error::OracleCapExceeded {
                num_edges: g.num_edges(),
                cap: DEFAULT_EDGE_CAP
            })
        );
        assert!(brute_force_opt(&g, &spec(rat(0, 1), rat(1, 1)), 100).is_ok());
    }

    #[test]
    fn exists_is_a_size_restricted_oracle() {
        let g = ColoredGraph::new(4, 2, [(0, 1, 0), (2, 3, 1)]).unwrap();
        let s = spec(rat(1, 2), rat(1, 2));
        // Size 1 puts one color at share 1 > 1/2: balanced only at size 2.
        assert!(!exists_fair_of_size(&g, &s, 1, 24).unwrap());
        assert!(exists_fair_of_size(&g, &s, 2, 24).unwrap());
        assert!(!exists_fair_of_size(&g, &s, 3, 24).unwrap());
        assert!(!exists_fair_of_size(&g, &s, 0, 24).unwrap());
    }

    #[test]
    fn opt_size_is_stable_under_reversed_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for round in 0..60usize {
            let l = 1 + round % 3;
            let g = random_graph(10, l, 0.4, &mut rng);
            let s = spec(rat(0, 1), rat(1, 2).max(rat(1, l as i64)));
            let a = brute_force_opt(&g, &s, 100).unwrap();
            let b = brute_force_opt(&reversed(&g), &s, 100).unwrap();
            assert_eq!(a.opt_size, b.opt_size);
            for k in 1..=g.num_vertices() / 2 {
                assert_eq!(
                    exists_fair_of_size(&g, &s, k, 100).unwrap(),
                    exists_fair_of_size(&reversed(&g), &s, k, 100).unwrap()
                );
            }
            if a.opt_size > 0 {
                assert!(exists_fair_of_size(&g, &s, a.opt_size, 100).unwrap());
            }
        }
    }
}
