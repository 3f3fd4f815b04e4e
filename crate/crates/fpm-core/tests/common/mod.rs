//! Shared helpers for the integration suites: deterministic instance
//! families, an exhaustive rainbow oracle, and 3SAT-3 formula generators
//! (exhaustive up to symmetry for small n, random for slightly larger n).

// Each integration test target compiles its own copy of this module and
// none of them uses every helper.
#![allow(dead_code)]

use fpm_core::graph::ColoredGraph;
use fpm_core::reduce::Sat3Instance;
use fpm_core::{FairnessSpec, Rat};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

pub fn fspec(alpha: Rat, beta: Rat) -> FairnessSpec {
    FairnessSpec::new(alpha, beta).unwrap()
}

/// Prints the per-criterion verdict line and fails the test on FAIL.
pub fn acceptance_line(id: &str, name: &str, pass: bool, details: &str) {
    println!(
        "ACCEPTANCE {id} {name}: {} ({details})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{id} {name}: {details}");
}

/// Independent rainbow oracle: enumerates all edge subsets of size `k` and
/// tests vertex-disjointness plus color-distinctness directly.
pub fn exhaustive_has_rainbow(g: &ColoredGraph, k: usize) -> bool {
    fn rec(g: &ColoredGraph, start: usize, left: usize, picked: &mut Vec<usize>) -> bool {
        if left == 0 {
            return true;
        }
        for i in start..g.num_edges() {
            let e = g.edge(i);
            let clash = picked.iter().any(|&j| {
                let f = g.edge(j);
                f.color == e.color || f.shares_vertex(&e)
            });
            if clash {
                continue;
            }
            picked.push(i);
            if rec(g, i + 1, left - 1, picked) {
                return true;
            }
            picked.pop();
        }
        false
    }
    rec(g, 0, k, &mut Vec::new())
}

/// Every clause over `n` variables with 2 or 3 distinct variables, literals
/// sorted by variable id.
pub fn all_clauses(n: usize) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    let vars: Vec<i32> = (1..=n as i32).collect();
    for size in [2usize, 3] {
        if n < size {
            continue;
        }
        let mut subset = vec![0usize; size];
        fn subsets(
            vars: &[i32],
            size: usize,
            start: usize,
            subset: &mut Vec<usize>,
            depth: usize,
            out: &mut Vec<Vec<i32>>,
        ) {
            if depth == size {
                for signs in 0..(1u32 << size) {
                    let clause: Vec<i32> = subset
                        .iter()
                        .enumerate()
                        .map(|(j, &vi)| {
                            if signs >> j & 1 == 1 {
                                -vars[vi]
                            } else {
                                vars[vi]
                            }
                        })
                        .collect();
                    out.push(clause);
                }
                return;
            }
            for i in start..vars.len() {
                subset[depth] = i;
                subsets(vars, size, i + 1, subset, depth + 1, out);
            }
        }
        subsets(&vars, size, 0, &mut subset, 0, &mut out);
    }
    out.sort();
    out
}

/// Clause list in normal form: literals sorted by variable inside each
/// clause, clauses sorted lexicographically.
fn normalize(clauses: &[Vec<i32>]) -> Vec<Vec<i32>> {
    let mut out: Vec<Vec<i32>> = clauses
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_by_key(|l| l.abs());
            c
        })
        .collect();
    out.sort();
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(items, k - 1, out);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(&mut items, n, &mut out);
    out
}

/// Minimum normal form over variable renamings and polarity flips.
fn canonical_form(num_vars: usize, clauses: &[Vec<i32>]) -> Vec<Vec<i32>> {
    let mut best: Option<Vec<Vec<i32>>> = None;
    for perm in permutations(num_vars) {
        for flips in 0u32..(1 << num_vars) {
            let image: Vec<Vec<i32>> = clauses
                .iter()
                .map(|clause| {
                    clause
                        .iter()
                        .map(|&lit| {
                            let var = lit.unsigned_abs() as usize - 1;
                            let new_var = perm[var] as i32 + 1;
                            let flip = flips >> var & 1 == 1;
                            if (lit > 0) ^ flip {
                                new_var
                            } else {
                                -new_var
                            }
                        })
                        .collect()
                })
                .collect();
            let normal = normalize(&image);
            if best.as_ref().is_none_or(|b| normal < *b) {
                best = Some(normal);
            }
        }
    }
    best.expect("group is nonempty")
}

/// All valid 3SAT-3 formulas on exactly `n` variables, one representative
/// per symmetry class (variable renaming, polarity flip, clause and literal
/// order).
pub fn enumerate_3sat3_up_to_symmetry(n: usize) -> Vec<Sat3Instance> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        n: usize,
        clauses: &[Vec<i32>],
        start: usize,
        used: usize,
        slots: usize,
        chosen: &mut Vec<usize>,
        positive: &mut [usize],
        negative: &mut [usize],
        out: &mut Vec<Sat3Instance>,
    ) {
        if used == slots {
            let listed: Vec<Vec<i32>> = chosen.iter().map(|&c| clauses[c].clone()).collect();
            if let Ok(f) = Sat3Instance::new(n, listed.clone()) {
                if normalize(&listed) == canonical_form(n, &listed) {
                    out.push(f);
                }
            }
            return;
        }
        for c in start..clauses.len() {
            let clause = &clauses[c];
            // Clause multisets are enumerated in non-decreasing id order;
            // a leftover of 1 slot can never be filled (clauses have 2-3).
            if used + clause.len() > slots || slots - used - clause.len() == 1 {
                continue;
            }
            if clause.iter().any(|&lit| {
                let var = lit.unsigned_abs() as usize;
                positive[var] + negative[var] + 1 > 3
            }) {
                continue;
            }
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if lit > 0 {
                    positive[var] += 1;
                } else {
                    negative[var] += 1;
                }
            }
            // A variable at 3 occurrences must already show both polarities.
            let closed_ok = clause.iter().all(|&lit| {
                let var = lit.unsigned_abs() as usize;
                positive[var] + negative[var] < 3 || (positive[var] > 0 && negative[var] > 0)
            });
            if closed_ok {
                chosen.push(c);
                rec(
                    n, clauses, c, used + clause.len(), slots, chosen, positive, negative, out,
                );
                chosen.pop();
            }
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if lit > 0 {
                    positive[var] -= 1;
                } else {
                    negative[var] -= 1;
                }
            }
        }
    }

    let clauses = all_clauses(n);
    let mut out = Vec::new();
    rec(
        n,
        &clauses,
        0,
        0,
        3 * n,
        &mut Vec::new(),
        &mut vec![0usize; n + 1],
        &mut vec![0usize; n + 1],
        &mut out,
    );
    out
}

/// Random valid 3SAT-3 formula on exactly `n` variables: choose each
/// variable's minority polarity, shuffle the 3n occurrence tokens into
/// clauses of size 2 and 3, retry until no clause repeats a variable.
pub fn random_3sat3<R: Rng>(n: usize, rng: &mut R) -> Sat3Instance {
    assert!(n >= 2);
    loop {
        let mut tokens: Vec<i32> = Vec::with_capacity(3 * n);
        for var in 1..=n as i32 {
            let minority_positive = rng.gen_bool(0.5);
            let majority = if minority_positive { -var } else { var };
            let minority = -majority;
            tokens.extend([majority, majority, minority]);
        }
        // t three-literal clauses, the rest two-literal; 3n - 3t must be even.
        let feasible: Vec<usize> = (0..=n)
            .filter(|&t| (3 * n - 3 * t).is_multiple_of(2) && (t == 0 || n >= 3))
            .collect();
        let t = feasible[rng.gen_range(0..feasible.len())];
        let mut sizes = vec![3usize; t];
        sizes.extend(vec![2usize; (3 * n - 3 * t) / 2]);
        let mut ok = None;
        for _ in 0..200 {
            tokens.shuffle(rng);
            let mut clauses = Vec::with_capacity(sizes.len());
            let mut cursor = 0;
            let mut valid = true;
            for &size in &sizes {
                let clause: Vec<i32> = tokens[cursor..cursor + size].to_vec();
                cursor += size;
                let mut vars: Vec<i32> = clause.iter().map(|l| l.abs()).collect();
                vars.sort_unstable();
                vars.dedup();
                if vars.len() != size {
                    valid = false;
                    break;
                }
                clauses.push(clause);
            }
            if valid {
                ok = Some(clauses);
                break;
            }
        }
        if let Some(clauses) = ok {
            if let Ok(f) = Sat3Instance::new(n, clauses) {
                return f;
            }
        }
    }
}
