//! Edge-colored graphs, matchings, fairness bounds, and the graph file
//! format.
//!
//! The text format is line-oriented UTF-8:
//!
//! ```text
//! c comment lines start with `c`
//! p fpm <n> <m> <l>
//! e <u> <v> <color>
//! ```
//!
//! with `1 <= u, v <= n` and `1 <= color <= l`, exactly `m` edge records
//! after the header. Blank lines are ignored. Vertex and color ids are
//! 1-based in files and 0-based in memory; the parser and serializer are the
//! only places that translate. The graph is simple: self-loops and repeated
//! vertex pairs (in either orientation, any color) are rejected.

use std::collections::HashSet;

use num_traits::Zero;
use rand::Rng;

use crate::{Error, Rat};

/// An undirected edge with a color id. All ids 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub color: usize,
}

impl Edge {
    pub fn touches(&self, vertex: usize) -> bool {
        self.u == vertex || self.v == vertex
    }

    pub fn shares_vertex(&self, other: &Edge) -> bool {
        self.touches(other.u) || self.touches(other.v)
    }
}

/// Construction errors for [`ColoredGraph`].
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph needs at least one vertex")]
    NoVertices,
    #[error("graph needs at least one color")]
    NoColors,
    #[error("edge ({u}, {v}): vertex id out of range (n = {n})")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("edge ({u}, {v}): color {color} out of range (l = {num_colors})")]
    ColorOutOfRange {
        u: usize,
        v: usize,
        color: usize,
        num_colors: usize,
    },
    #[error("self-loop at vertex {v}")]
    SelfLoop { v: usize },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
}

/// An undirected simple graph with a total edge coloring.
///
/// Immutable after construction; colors with no edges are permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    num_vertices: usize,
    num_colors: usize,
    edges: Vec<Edge>,
    /// vertex -> indices of incident edges, ascending.
    incident: Vec<Vec<usize>>,
    /// color -> indices of edges of that color, ascending.
    by_color: Vec<Vec<usize>>,
}

impl ColoredGraph {
    /// Builds a graph from 0-based `(u, v, color)` triples, validating all
    /// invariants.
    pub fn new(
        num_vertices: usize,
        num_colors: usize,
        edges: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, GraphError> {
        if num_vertices == 0 {
            return Err(GraphError::NoVertices);
        }
        if num_colors == 0 {
            return Err(GraphError::NoColors);
        }
        let mut out = Vec::new();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        for (u, v, color) in edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(GraphError::VertexOutOfRange {
                    u,
                    v,
                    n: num_vertices,
                });
            }
            if u == v {
                return Err(GraphError::SelfLoop { v });
            }
            if color >= num_colors {
                return Err(GraphError::ColorOutOfRange {
                    u,
                    v,
                    color,
                    num_colors,
                });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { u, v });
            }
            out.push(Edge { u, v, color });
        }
        let mut incident = vec![Vec::new(); num_vertices];
        let mut by_color = vec![Vec::new(); num_colors];
        for (i, e) in out.iter().enumerate() {
            incident[e.u].push(i);
            incident[e.v].push(i);
            by_color[e.color].push(i);
        }
        Ok(Self {
            num_vertices,
            num_colors,
            edges: out,
            incident,
            by_color,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> Edge {
        self.edges[index]
    }

    /// Indices of edges incident to `v`, ascending.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// Indices of edges of color `c`, ascending.
    pub fn edges_of_color(&self, c: usize) -> &[usize] {
        &self.by_color[c]
    }
}

/// A set of pairwise vertex-disjoint edges with per-color counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// Ascending indices into the graph's edge list.
    indices: Vec<usize>,
    /// color -> number of selected edges of that color; sums to `indices.len()`.
    color_counts: Vec<usize>,
}

impl Matching {
    /// Validated constructor: rejects out-of-range indices, repeats, and any
    /// pair of edges sharing a vertex. Every matching in this crate is built
    /// through here.
    pub fn from_indices(
        g: &ColoredGraph,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self, Error> {
        let mut idx: Vec<usize> = indices.into_iter().collect();
        idx.sort_unstable();
        let mut color_counts = vec![0usize; g.num_colors()];
        let mut owner = vec![usize::MAX; g.num_vertices()];
        let mut prev = None;
        for &i in &idx {
            if i >= g.num_edges() {
                return Err(Error::EdgeIndexOutOfRange {
                    index: i,
                    num_edges: g.num_edges(),
                });
            }
            if prev == Some(i) {
                return Err(Error::DuplicateEdgeIndex { index: i });
            }
            prev = Some(i);
            let e = g.edge(i);
            for endpoint in [e.u, e.v] {
                if owner[endpoint] != usize::MAX {
                    return Err(Error::EdgesShareVertex {
                        a: owner[endpoint],
                        b: i,
                    });
                }
                owner[endpoint] = i;
            }
            color_counts[e.color] += 1;
        }
        Ok(Self {
            indices: idx,
            color_counts,
        })
    }

    pub fn empty(g: &ColoredGraph) -> Self {
        Self {
            indices: Vec::new(),
            color_counts: vec![0; g.num_colors()],
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn edge_indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn color_count(&self, color: usize) -> usize {
        self.color_counts[color]
    }

    pub fn color_counts(&self) -> &[usize] {
        &self.color_counts
    }

    /// Per-color shares `|M_c| / |M|` as exact rationals.
    ///
    /// Panics on an empty matching: the share is 0/0 there, which is exactly
    /// why [`is_balanced`] refuses empty input.
    pub fn fractions(&self) -> Vec<Rat> {
        assert!(!self.is_empty(), "fractions of an empty matching are undefined");
        let size = self.indices.len() as i64;
        self.color_counts
            .iter()
            .map(|&c| Rat::new(c as i64, size))
            .collect()
    }
}

/// The pair `(alpha, beta)` with `0 <= alpha <= beta <= 1`, stored as exact
/// rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FairnessSpec {
    alpha: Rat,
    beta: Rat,
}

impl FairnessSpec {
    pub fn new(alpha: Rat, beta: Rat) -> Result<Self, Error> {
        if alpha < Rat::zero() || beta < alpha || beta > Rat::from_integer(1) {
            return Err(Error::InvalidSpec);
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> Rat {
        self.alpha
    }

    pub fn beta(&self) -> Rat {
        self.beta
    }

    /// True when `alpha = 0`, i.e. only the upper bound constrains colors.
    pub fn is_beta_limited(&self) -> bool {
        self.alpha.is_zero()
    }
}

/// `count / size >= bound`, exactly. Requires `size > 0`.
fn share_at_least(count: usize, size: usize, bound: Rat) -> bool {
    (count as i128) * (*bound.denom() as i128) >= (*bound.numer() as i128) * (size as i128)
}

/// `count / size <= bound`, exactly. Requires `size > 0`.
fn share_at_most(count: usize, size: usize, bound: Rat) -> bool {
    (count as i128) * (*bound.denom() as i128) <= (*bound.numer() as i128) * (size as i128)
}

pub(crate) fn counts_within(counts: &[usize], size: usize, lower: Rat, upper: Rat) -> bool {
    counts
        .iter()
        .all(|&c| share_at_least(c, size, lower) && share_at_most(c, size, upper))
}

/// Does every color's share of `m` lie in `[lower, upper]`? Unlike
/// [`is_balanced`] the bounds need not define a valid [`FairnessSpec`]
/// (solvers certify relaxed upper bounds that may exceed 1).
pub fn matching_within_bounds(m: &Matching, lower: Rat, upper: Rat) -> bool {
    !m.is_empty() && counts_within(m.color_counts(), m.len(), lower, upper)
}

/// Is `m` an (alpha, beta)-balanced matching of `g`?
///
/// Exact rational comparison of `alpha <= |M_c|/|M| <= beta` for every color
/// `c`, including colors with no edges. Empty matchings are an error: their
/// shares are 0/0.
pub fn is_balanced(m: &Matching, g: &ColoredGraph, spec: &FairnessSpec) -> Result<bool, Error> {
    debug_assert_eq!(m.color_counts().len(), g.num_colors());
    if m.is_empty() {
        return Err(Error::EmptyMatching);
    }
    Ok(counts_within(
        m.color_counts(),
        m.len(),
        spec.alpha(),
        spec.beta(),
    ))
}

/// Outcome of the cheap feasibility screen in [`feasibility_precheck`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    MaybeFeasible,
    ProvablyInfeasible,
}

/// Screens out instances that cannot have a nonempty balanced matching.
///
/// Averaging over the `l` colors, some share is `<= 1/l` and some is
/// `>= 1/l`, so `alpha > 1/l` or `beta < 1/l` is hopeless. When `alpha > 0`
/// every color needs at least one edge in the graph. Never reports a false
/// infeasibility.
pub fn feasibility_precheck(g: &ColoredGraph, spec: &FairnessSpec) -> Feasibility {
    let l = g.num_colors() as i128;
    let alpha = spec.alpha();
    let beta = spec.beta();
    // alpha > 1/l  <=>  alpha.numer * l > alpha.denom
    if *alpha.numer() as i128 * l > *alpha.denom() as i128 {
        return Feasibility::ProvablyInfeasible;
    }
    // beta < 1/l  <=>  beta.numer * l < beta.denom
    if (*beta.numer() as i128) * l < *beta.denom() as i128 {
        return Feasibility::ProvablyInfeasible;
    }
    if !spec.alpha().is_zero() && (0..g.num_colors()).any(|c| g.edges_of_color(c).is_empty()) {
        return Feasibility::ProvablyInfeasible;
    }
    Feasibility::MaybeFeasible
}

/// A solver's answer: the matching plus the bounds it actually certifies.
///
/// `certified_lower`/`certified_upper` are the relaxed bounds the candidate
/// was checked against before being returned; `probed_t` is the guess of the
/// optimum size that produced it, when a probing loop was involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub matching: Matching,
    pub size: usize,
    pub fractions: Vec<Rat>,
    pub certified_lower: Rat,
    pub certified_upper: Rat,
    pub probed_t: Option<usize>,
}

impl SolveReport {
    pub fn new(
        matching: Matching,
        certified_lower: Rat,
        certified_upper: Rat,
        probed_t: Option<usize>,
    ) -> Self {
        let size = matching.len();
        let fractions = matching.fractions();
        Self {
            matching,
            size,
            fractions,
            certified_lower,
            certified_upper,
            probed_t,
        }
    }
}

/// Parse errors for the graph file format; every variant names the offending
/// line (1-based).
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing `p fpm <n> <m> <l>` header")]
    MissingHeader,
    #[error("line {line}: malformed header, expected `p fpm <n> <m> <l>` with n, l >= 1")]
    MalformedHeader { line: usize },
    #[error("line {line}: repeated header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: edge record before the header")]
    EdgeBeforeHeader { line: usize },
    #[error("line {line}: malformed edge, expected `e <u> <v> <color>`")]
    MalformedEdge { line: usize },
    #[error("line {line}: vertex id {id} out of range [1, {n}]")]
    VertexOutOfRange { line: usize, id: usize, n: usize },
    #[error("line {line}: color {color} out of range [1, {num_colors}]")]
    ColorOutOfRange {
        line: usize,
        color: usize,
        num_colors: usize,
    },
    #[error("line {line}: self-loop at vertex {u}")]
    SelfLoop { line: usize, u: usize },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: unknown record type `{kind}`")]
    UnknownRecord { line: usize, kind: String },
    #[error("line {line}: more edge records than the {expected} announced in the header")]
    TooManyEdges { line: usize, expected: usize },
    #[error("header announced {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
}

/// Parses the text graph format. Ids are translated to 0-based.
pub fn parse_graph(text: &str) -> Result<ColoredGraph, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut triples: Vec<(usize, usize, usize)> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.first() {
            None => continue,
            Some(t) if t.starts_with('c') => continue,
            Some(&"p") => {
                if header.is_some() {
                    return Err(ParseError::DuplicateHeader { line });
                }
                if tokens.len() != 5 || tokens[1] != "fpm" {
                    return Err(ParseError::MalformedHeader { line });
                }
                let nums: Vec<usize> = tokens[2..]
                    .iter()
                    .map(|t| t.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| ParseError::MalformedHeader { line })?;
                let (n, m, l) = (nums[0], nums[1], nums[2]);
                if n == 0 || l == 0 {
                    return Err(ParseError::MalformedHeader { line });
                }
                header = Some((n, m, l));
            }
            Some(&"e") => {
                let (n, m, l) = header.ok_or(ParseError::EdgeBeforeHeader { line })?;
                if tokens.len() != 4 {
                    return Err(ParseError::MalformedEdge { line });
                }
                let nums: Vec<usize> = tokens[1..]
                    .iter()
                    .map(|t| t.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| ParseError::MalformedEdge { line })?;
                let (u, v, color) = (nums[0], nums[1], nums[2]);
                for id in [u, v] {
                    if id == 0 || id > n {
                        return Err(ParseError::VertexOutOfRange { line, id, n });
                    }
                }
                if color == 0 || color > l {
                    return Err(ParseError::ColorOutOfRange {
                        line,
                        color,
                        num_colors: l,
                    });
                }
                if u == v {
                    return Err(ParseError::SelfLoop { line, u });
                }
                if !seen.insert((u.min(v), u.max(v))) {
                    return Err(ParseError::DuplicateEdge { line, u, v });
                }
                if triples.len() == m {
                    return Err(ParseError::TooManyEdges { line, expected: m });
                }
                triples.push((u - 1, v - 1, color - 1));
            }
            Some(other) => {
                return Err(ParseError::UnknownRecord {
                    line,
                    kind: other.to_string(),
                })
            }
        }
    }

    let (n, m, l) = header.ok_or(ParseError::MissingHeader)?;
    if triples.len() != m {
        return Err(ParseError::EdgeCountMismatch {
            expected: m,
            found: triples.len(),
        });
    }
    Ok(ColoredGraph::new(n, l, triples).expect("records were validated during parsing"))
}

/// Serializes to the text format; `parse_graph(serialize_graph(g)) == g`.
pub fn serialize_graph(g: &ColoredGraph) -> String {
    let mut out = format!(
        "p fpm {} {} {}\n",
        g.num_vertices(),
        g.num_edges(),
        g.num_colors()
    );
    for e in g.edges() {
        out.push_str(&format!("e {} {} {}\n", e.u + 1, e.v + 1, e.color + 1));
    }
    out
}

/// Random simple graph: each of the `n(n-1)/2` possible edges is present
/// independently with probability `edge_prob`, colored uniformly. The
/// iteration order (u ascending, then v) is fixed so a seeded RNG gives a
/// reproducible graph.
pub fn random_graph<R: Rng>(
    num_vertices: usize,
    num_colors: usize,
    edge_prob: f64,
    rng: &mut R,
) -> ColoredGraph {
    assert!(num_vertices >= 1 && num_colors >= 1);
    assert!((0.0..=1.0).contains(&edge_prob));
    let mut triples = Vec::new();
    for u in 0..num_vertices {
        for v in (u + 1)..num_vertices {
            if rng.gen_bool(edge_prob) {
                triples.push((u, v, rng.gen_range(0..num_colors)));
            }
        }
    }
    ColoredGraph::new(num_vertices, num_colors, triples).expect("generated edges are valid")
}
