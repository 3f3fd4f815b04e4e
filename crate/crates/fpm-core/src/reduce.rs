//! Adversarial instance generator: turns 3SAT-3 formulas into path
//! instances whose balanced matchings of size `m + n - 1` correspond
//! exactly to satisfying assignments.
//!
//! A 3SAT-3 formula has clauses of 2 or 3 literals and every variable
//! occurs exactly 3 times, twice in one polarity and once in the other.
//! Each variable becomes a 3-edge path gadget whose edges are colored by
//! the clauses the variable occurs in, with the minority-polarity
//! occurrence in the middle; consecutive gadgets are joined by 3-edge
//! monochromatic spacer paths with fresh colors. The fairness bounds are
//! pinned to `alpha = beta = 1 / (m + n - 1)`, forcing exactly one edge of
//! every color.

use num_traits::One;
use thiserror::Error;

use crate::graph::{is_balanced, ColoredGraph, FairnessSpec, Matching};
use crate::{Error as OpError, Rat};

/// A validated 3SAT-3 formula. Literals are signed 1-based variable ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sat3Instance {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

/// Parse and validation errors for 3SAT-3 input. Clause and variable ids in
/// messages are 1-based.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Sat3Error {
    #[error("missing `p cnf <vars> <clauses>` header")]
    MissingHeader,
    #[error("line {line}: malformed header")]
    MalformedHeader { line: usize },
    #[error("formula must have at least one variable")]
    NoVariables,
    #[error("line {line}: bad literal token `{token}`")]
    BadToken { line: usize, token: String },
    #[error("line {line}: variable {var} out of range [1, {num_vars}]")]
    VarOutOfRange {
        line: usize,
        var: usize,
        num_vars: usize,
    },
    #[error("header announced {expected} clauses, found {found}")]
    ClauseCountMismatch { expected: usize, found: usize },
    #[error("clause {clause} has {size} literals, need 2 or 3")]
    ClauseSize { clause: usize, size: usize },
    #[error("clause {clause} repeats variable {var}")]
    DuplicateVarInClause { clause: usize, var: usize },
    #[error("variable {var} occurs {count} times, need exactly 3")]
    OccurrenceCount { var: usize, count: usize },
    #[error("variable {var} occurs in only one polarity")]
    SinglePolarity { var: usize },
}

impl Sat3Instance {
    /// Validates the 3SAT-3 shape: 2-3 literals per clause, no repeated
    /// variable inside a clause, every variable exactly 3 occurrences and in
    /// both polarities.
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, Sat3Error> {
        if num_vars == 0 {
            return Err(Sat3Error::NoVariables);
        }
        let mut positive = vec![0usize; num_vars + 1];
        let mut negative = vec![0usize; num_vars + 1];
        for (ci, clause) in clauses.iter().enumerate() {
            if clause.len() < 2 || clause.len() > 3 {
                return Err(Sat3Error::ClauseSize {
                    clause: ci + 1,
                    size: clause.len(),
                });
            }
            let mut vars: Vec<usize> = clause.iter().map(|l| l.unsigned_abs() as usize).collect();
            vars.sort_unstable();
            for pair in vars.windows(2) {
                if pair[0] == pair[1] {
                    return Err(Sat3Error::DuplicateVarInClause {
                        clause: ci + 1,
                        var: pair[0],
                    });
                }
            }
            for &lit in clause {
                debug_assert!(lit != 0 && lit.unsigned_abs() as usize <= num_vars);
                if lit > 0 {
                    positive[lit as usize] += 1;
                } else {
                    negative[(-lit) as usize] += 1;
                }
            }
        }
        for var in 1..=num_vars {
            let count = positive[var] + negative[var];
            if count != 3 {
                return Err(Sat3Error::OccurrenceCount { var, count });
            }
            if positive[var] == 0 || negative[var] == 0 {
                return Err(Sat3Error::SinglePolarity { var });
            }
        }
        Ok(Self { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Does `assignment` (indexed by 0-based variable) satisfy every clause?
    pub fn eval(&self, assignment: &[bool]) -> bool {
        assert_eq!(assignment.len(), self.num_vars);
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = assignment[lit.unsigned_abs() as usize - 1];
                if lit > 0 {
                    value
                } else {
                    !value
                }
            })
        })
    }

    /// Exhaustive truth-table search; intended for test-scale formulas.
    pub fn satisfying_assignment(&self) -> Option<Vec<bool>> {
        assert!(
            self.num_vars <= 24,
            "truth tables are only meant for small formulas"
        );
        for code in 0u64..(1u64 << self.num_vars) {
            let assignment: Vec<bool> = (0..self.num_vars).map(|i| code >> i & 1 == 1).collect();
            if self.eval(&assignment) {
                return Some(assignment);
            }
        }
        None
    }
}

/// Parses DIMACS CNF and validates the 3SAT-3 restrictions. Clauses are
/// 0-terminated; a final unterminated clause is accepted.
pub fn parse_dimacs_3sat3(text: &str) -> Result<Sat3Instance, Sat3Error> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.first() {
            None => continue,
            Some(t) if t.starts_with('c') => continue,
            Some(&"p") => {
                if header.is_some() || tokens.len() != 4 || tokens[1] != "cnf" {
                    return Err(Sat3Error::MalformedHeader { line });
                }
                let vars = tokens[2]
                    .parse::<usize>()
                    .map_err(|_| Sat3Error::MalformedHeader { line })?;
                let count = tokens[3]
                    .parse::<usize>()
                    .map_err(|_| Sat3Error::MalformedHeader { line })?;
                if vars == 0 {
                    return Err(Sat3Error::NoVariables);
                }
                header = Some((vars, count));
            }
            Some(_) => {
                let (num_vars, _) = header.ok_or(Sat3Error::MissingHeader)?;
                for token in tokens {
                    let lit = token.parse::<i64>().map_err(|_| Sat3Error::BadToken {
                        line,
                        token: token.to_string(),
                    })?;
                    if lit == 0 {
                        clauses.push(std::mem::take(&mut current));
                        continue;
                    }
                    let var = lit.unsigned_abs() as usize;
                    if var > num_vars {
                        return Err(Sat3Error::VarOutOfRange {
                            line,
                            var,
                            num_vars,
                        });
                    }
                    current.push(lit as i32);
                }
            }
        }
    }
    let (num_vars, expected) = header.ok_or(Sat3Error::MissingHeader)?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != expected {
        return Err(Sat3Error::ClauseCountMismatch {
            expected,
            found: clauses.len(),
        });
    }
    Sat3Instance::new(num_vars, clauses)
}

/// One variable's 3-edge gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarGadget {
    /// Indices of the gadget's edges in path order.
    pub edge_indices: [usize; 3],
    /// The edges' colors, i.e. the 0-based indices of the clauses holding
    /// the variable's occurrences; the middle entry is the minority one.
    pub clause_colors: [usize; 3],
    /// Polarity of the variable's minority occurrence (the middle edge).
    pub middle_positive: bool,
}

/// One monochromatic 3-edge spacer between consecutive variable gadgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpacerGadget {
    pub edge_indices: [usize; 3],
    /// 0-based color id; spacer `i` (between gadgets `i` and `i+1`) has
    /// color `m + i`.
    pub color: usize,
}

/// The reduced instance: a single path with `6n - 3` edges, `m + n - 1`
/// colors, and bounds `alpha = beta = 1 / (m + n - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionLayout {
    pub formula: Sat3Instance,
    pub graph: ColoredGraph,
    pub var_gadgets: Vec<VarGadget>,
    pub spacer_gadgets: Vec<SpacerGadget>,
    pub spec: FairnessSpec,
}

impl ReductionLayout {
    /// Target size of a balanced matching that certifies satisfiability.
    pub fn target_size(&self) -> usize {
        self.formula.num_clauses() + self.formula.num_vars() - 1
    }
}

/// Builds the path instance for a validated formula.
pub fn reduce_to_path(f: &Sat3Instance) -> ReductionLayout {
    let n = f.num_vars();
    let m = f.num_clauses();
    let num_colors = m + n - 1;

    // Occurrences per variable: (clause index, polarity), in clause order.
    let mut occurrences: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for (ci, clause) in f.clauses().iter().enumerate() {
        for &lit in clause {
            occurrences[lit.unsigned_abs() as usize - 1].push((ci, lit > 0));
        }
    }

    let mut triples: Vec<(usize, usize, usize)> = Vec::new();
    let mut var_gadgets = Vec::with_capacity(n);
    let mut spacer_gadgets = Vec::with_capacity(n - 1);
    // One long path: edge j joins vertices j and j+1.
    let push_edge = |triples: &mut Vec<(usize, usize, usize)>, color: usize| -> usize {
        let j = triples.len();
        triples.push((j, j + 1, color));
        j
    };

    for (vi, occ) in occurrences.iter().enumerate() {
        debug_assert_eq!(occ.len(), 3, "validated formulas have 3 occurrences");
        let positives = occ.iter().filter(|&&(_, pos)| pos).count();
        let minority_positive = positives == 1;
        let majority: Vec<usize> = occ
            .iter()
            .filter(|&&(_, pos)| pos != minority_positive)
            .map(|&(ci, _)| ci)
            .collect();
        let minority = occ
            .iter()
            .find(|&&(_, pos)| pos == minority_positive)
            .map(|&(ci, _)| ci)
            .expect("both polarities occur");
        // Majority occurrences sit first and third (in clause order), the
        // minority occurrence in the middle; a matching can then use both
        // outer edges, or the middle edge alone.
        let clause_colors = [majority[0], minority, majority[1]];
        let edge_indices = [
            push_edge(&mut triples, clause_colors[0]),
            push_edge(&mut triples, clause_colors[1]),
            push_edge(&mut triples, clause_colors[2]),
        ];
        var_gadgets.push(VarGadget {
            edge_indices,
            clause_colors,
            middle_positive: minority_positive,
        });
        if vi + 1 < n {
            let color = m + vi;
            let edge_indices = [
                push_edge(&mut triples, color),
                push_edge(&mut triples, color),
                push_edge(&mut triples, color),
            ];
            spacer_gadgets.push(SpacerGadget {
                edge_indices,
                color,
            });
        }
    }

    debug_assert_eq!(triples.len(), 6 * n - 3);
    let graph = ColoredGraph::new(6 * n - 2, num_colors, triples)
        .expect("the path construction is a valid simple graph");
    let bound = Rat::new(1, num_colors as i64);
    let spec = FairnessSpec::new(bound, bound).expect("0 < 1/(m+n-1) <= 1");
    ReductionLayout {
        formula: f.clone(),
        graph,
        var_gadgets,
        spacer_gadgets,
        spec,
    }
}

/// Reads a satisfying assignment back out of a balanced matching of the
/// target size: a variable takes its minority polarity exactly when its
/// gadget's middle edge is matched. The result is verified against every
/// clause before it is returned; a verification failure means the layout or
/// matching is corrupted and is reported as an error.
pub fn decode_assignment(layout: &ReductionLayout, m: &Matching) -> Result<Vec<bool>, OpError> {
    if m.len() != layout.target_size()
        || !is_balanced(m, &layout.graph, &layout.spec).unwrap_or(false)
    {
        return Err(OpError::DecodePrecondition);
    }
    let assignment: Vec<bool> = layout
        .var_gadgets
        .iter()
        .map(|gadget| {
            if m.contains(gadget.edge_indices[1]) {
                gadget.middle_positive
            } else {
                !gadget.middle_positive
            }
        })
        .collect();
    if !layout.formula.eval(&assignment) {
        return Err(OpError::DecodeVerification);
    }
    Ok(assignment)
}

/// Builds the balanced matching of target size that witnesses a satisfying
/// assignment: for every clause, the gadget edge of the first variable
/// satisfying it; plus every spacer's middle edge. Returns `None` when the
/// assignment does not satisfy the formula.
pub fn matching_for_assignment(
    layout: &ReductionLayout,
    assignment: &[bool],
) -> Option<Matching> {
    if !layout.formula.eval(assignment) {
        return None;
    }
    let mut indices = Vec::with_capacity(layout.target_size());
    for (ci, clause) in layout.formula.clauses().iter().enumerate() {
        let lit = clause
            .iter()
            .find(|&&lit| {
                let value = assignment[lit.unsigned_abs() as usize - 1];
                if lit > 0 {
                    value
                } else {
                    !value
                }
            })
            .expect("assignment satisfies every clause");
        let gadget = &layout.var_gadgets[lit.unsigned_abs() as usize - 1];
        let position = gadget
            .clause_colors
            .iter()
            .position(|&c| c == ci)
            .expect("the variable occurs in this clause");
        indices.push(gadget.edge_indices[position]);
    }
    for spacer in &layout.spacer_gadgets {
        indices.push(spacer.edge_indices[1]);
    }
    let matching = Matching::from_indices(&layout.graph, indices)
        .expect("a satisfied literal never matches both an outer and the middle edge");
    debug_assert!(matching
        .fractions()
        .iter()
        .all(|f| *f * Rat::from_integer(layout.target_size() as i64) == Rat::one()));
    Some(matching)
}
