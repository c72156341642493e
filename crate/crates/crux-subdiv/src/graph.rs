//! Simple undirected graphs, vertex sets, paths, generators and the edge-list
//! text format.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

/// Exact rational number used for average degrees and density thresholds.
pub type Rational = Ratio<i64>;

/// Immutable simple undirected graph on vertices `0..n` with sorted adjacency.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Graph on `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph from an edge list, rejecting loops, out-of-range ids and
    /// repeated edges (in either orientation).
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0;
        for (u, v) in edges {
            if u >= n {
                return Err(Error::VertexOutOfRange { vertex: u, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if u == v {
                return Err(Error::SelfLoop { vertex: u });
            }
            adj[u].push(v);
            adj[v].push(u);
            m += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u.min(w[0]), u.max(w[0]));
                return Err(Error::DuplicateEdge { u: a, v: b });
            }
        }
        Ok(Graph { adj, m })
    }

    /// Builds a graph from edges that are known to be valid, silently merging
    /// duplicates. Used by generators.
    pub(crate) fn from_edge_set(n: usize, edges: &BTreeSet<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            debug_assert!(u < v && v < n);
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        Graph { adj, m: edges.len() }
    }

    /// Builds a graph from adjacency lists already known to be symmetric.
    pub(crate) fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        let mut twice = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Graph { adj, m: twice / 2 }
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// Degree of `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Whether `uv` is an edge. Out-of-range ids yield `false`.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Minimum degree (0 for the empty graph).
    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Maximum degree (0 for the empty graph).
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Average degree `2e/n` as an exact rational.
    pub fn average_degree(&self) -> Result<Rational> {
        if self.n() == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Rational::new(2 * self.m as i64, self.n() as i64))
    }

    /// Whether every vertex has the same degree.
    pub fn is_regular(&self) -> bool {
        self.min_degree() == self.max_degree()
    }

    /// Checks that every id in `set` is a vertex of this graph.
    pub fn check_vertices(&self, set: &[usize]) -> Result<()> {
        match set.iter().find(|&&v| v >= self.n()) {
            Some(&v) => Err(Error::VertexOutOfRange { vertex: v, n: self.n() }),
            None => Ok(()),
        }
    }

    /// Subgraph induced by `vertices` (any order, duplicates ignored); new ids
    /// follow increasing old ids.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Subgraph {
        let mut keep: Vec<usize> = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut new_id = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter_map(|&w| (new_id[w] != usize::MAX).then(|| new_id[w]))
                    .collect()
            })
            .collect();
        Subgraph { graph: Graph::from_adjacency(adj), to_parent: keep }
    }

    /// Subgraph obtained by deleting `removed`.
    pub fn without_vertices(&self, removed: &[usize]) -> Subgraph {
        let mut drop = vec![false; self.n()];
        for &v in removed {
            if v < self.n() {
                drop[v] = true;
            }
        }
        let keep: Vec<usize> = (0..self.n()).filter(|&v| !drop[v]).collect();
        self.induced_subgraph(&keep)
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Copy of this graph with the extra edge `uv` (no-op if already present).
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        self.check_vertices(&[u, v])?;
        if u == v {
            return Err(Error::SelfLoop { vertex: u });
        }
        let mut adj = self.adj.clone();
        adj[u].push(v);
        adj[v].push(u);
        Ok(Graph::from_adjacency(adj))
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Graph {
        let adj = (0..n).map(|u| (0..n).filter(|&v| v != u).collect()).collect();
        Graph::from_adjacency(adj)
    }

    /// Cycle `0-1-…-(n−1)-0`, `n ≥ 3`.
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs n >= 3, got {n}")));
        }
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Path `0-1-…-(n−1)`.
    pub fn path(n: usize) -> Graph {
        let edges: BTreeSet<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edge_set(n, &edges)
    }

    /// Complete bipartite graph with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let edges: BTreeSet<_> = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))).collect();
        Graph::from_edge_set(a + b, &edges)
    }

    /// Hypercube `Q^dim`; vertices are bit strings, adjacent when differing in one bit.
    pub fn hypercube(dim: u32) -> Graph {
        let n = 1usize << dim;
        let adj = (0..n).map(|u| (0..dim).map(|b| u ^ (1 << b)).collect()).collect();
        Graph::from_adjacency(adj)
    }

    /// The Petersen graph (outer 5-cycle `0..5`, inner pentagram `5..10`).
    pub fn petersen() -> Graph {
        let mut edges = BTreeSet::new();
        for i in 0..5 {
            edges.insert(ordered(i, (i + 1) % 5));
            edges.insert(ordered(i, i + 5));
            edges.insert(ordered(5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edge_set(10, &edges)
    }

    /// Erdős–Rényi `G(n, p)`: ChaCha8 seeded from `seed`, one uniform draw per
    /// pair `(u, v)`, `u < v`, in lexicographic order; the edge is kept when the
    /// draw is below `p`. Equal seeds therefore give nested graphs for growing `p`.
    pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut adj = vec![Vec::new(); n];
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    adj[u].push(v);
                    adj[v].push(u);
                }
            }
        }
        Ok(Graph::from_adjacency(adj))
    }

    /// Disjoint union; the vertices of `parts[i]` follow those of `parts[i-1]`.
    pub fn disjoint_union(parts: &[Graph]) -> Graph {
        let mut adj = Vec::new();
        for part in parts {
            let offset = adj.len();
            adj.extend(part.adj.iter().map(|l| l.iter().map(|&v| v + offset).collect()));
        }
        Graph::from_adjacency(adj)
    }

    /// Replaces each vertex `v` by the independent set `v*s..(v+1)*s` and each
    /// edge by a complete bipartite graph.
    pub fn blowup(&self, s: usize) -> Graph {
        let adj = (0..self.n() * s)
            .map(|x| {
                self.adj[x / s]
                    .iter()
                    .flat_map(|&w| w * s..(w + 1) * s)
                    .collect()
            })
            .collect();
        Graph::from_adjacency(adj)
    }

    /// Complement graph.
    pub fn complement(&self) -> Graph {
        let n = self.n();
        let adj = (0..n)
            .map(|u| (0..n).filter(|&v| v != u && !self.has_edge(u, v)).collect())
            .collect();
        Graph::from_adjacency(adj)
    }
}

pub(crate) fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Induced subgraph together with the map from its ids back to the parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Graph,
    /// `to_parent[i]` is the parent id of subgraph vertex `i`; strictly increasing.
    pub to_parent: Vec<usize>,
}

impl Subgraph {
    /// The whole graph viewed as a subgraph of itself.
    pub fn identity(g: &Graph) -> Self {
        Subgraph { graph: g.clone(), to_parent: (0..g.n()).collect() }
    }

    /// Parent id of subgraph vertex `v`.
    pub fn lift(&self, v: usize) -> usize {
        self.to_parent[v]
    }

    /// Parent ids of subgraph vertices.
    pub fn lift_all(&self, vs: &[usize]) -> Vec<usize> {
        vs.iter().map(|&v| self.to_parent[v]).collect()
    }

    /// Subgraph of this subgraph, re-expressed relative to the outer parent.
    pub fn compose(&self, inner: &Subgraph) -> Subgraph {
        Subgraph { graph: inner.graph.clone(), to_parent: self.lift_all(&inner.to_parent) }
    }

    /// Subgraph id of parent vertex `v`, if present.
    pub fn local(&self, v: usize) -> Option<usize> {
        self.to_parent.binary_search(&v).ok()
    }
}

/// Set of vertex ids, stored sorted without duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    /// Empty set.
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    /// Set of the given ids.
    pub fn from_slice(ids: &[usize]) -> Self {
        ids.iter().copied().collect()
    }

    /// Set of the given ids, sorting and deduplicating in place.
    pub fn from_vec(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Members in increasing order.
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().any(|v| large.contains(v))
    }

    /// Membership mask over `0..n` (ids `≥ n` are ignored).
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for v in self.iter().filter(|&v| v < n) {
            m[v] = true;
        }
        m
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

/// Ordered list of distinct vertices; its length counts edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(Vec<usize>);

impl Path {
    pub fn new(vertices: Vec<usize>) -> Self {
        Path(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// Number of edges (vertex count − 1; 0 for an empty path).
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Vertices other than the two endpoints.
    pub fn internal(&self) -> &[usize] {
        if self.0.len() <= 2 {
            &[]
        } else {
            &self.0[1..self.0.len() - 1]
        }
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> Path {
        Path(self.0.iter().rev().copied().collect())
    }

    /// Whether the path is non-empty, uses distinct vertices of `g` and follows edges of `g`.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        if self.0.is_empty() || g.check_vertices(&self.0).is_err() {
            return false;
        }
        let mut seen = BTreeSet::new();
        self.0.iter().all(|&v| seen.insert(v)) && self.0.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

/// External neighbourhood `N(X)`: vertices outside `X` adjacent to `X`.
pub fn external_neighborhood(g: &Graph, x: &VertexSet) -> Result<VertexSet> {
    g.check_vertices(x.as_slice())?;
    let member = x.mask(g.n());
    let mut out = vec![false; g.n()];
    for u in x.iter() {
        for &w in g.neighbors(u) {
            if !member[w] {
                out[w] = true;
            }
        }
    }
    Ok((0..g.n()).filter(|&v| out[v]).collect())
}

/// Number of edges with exactly one end in `s`.
pub fn edge_boundary(g: &Graph, s: &VertexSet) -> Result<usize> {
    g.check_vertices(s.as_slice())?;
    let member = s.mask(g.n());
    Ok(s.iter().map(|u| g.neighbors(u).iter().filter(|&&w| !member[w]).count()).sum())
}

/// Declarative description of a graph, also accepted as JSON by the CLI
/// (e.g. `{"kind":"gnp","n":50,"p":0.1,"seed":7}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSpec {
    Gnp { n: usize, p: f64, seed: u64 },
    Hypercube { dim: u32 },
    Complete { n: usize },
    CompleteBipartite { a: usize, b: usize },
    DisjointUnion { parts: Vec<GraphSpec> },
    Blowup { base: Box<GraphSpec>, s: usize },
    Petersen,
    Cycle { n: usize },
}

impl GraphSpec {
    /// Parses a JSON spec.
    pub fn from_json(text: &str) -> Result<GraphSpec> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }
}

fn positive(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(Error::InvalidParameter(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// Builds the graph described by `spec`; deterministic for a fixed spec.
pub fn generate(spec: &GraphSpec) -> Result<Graph> {
    match spec {
        GraphSpec::Gnp { n, p, seed } => {
            positive("n", *n)?;
            Graph::gnp(*n, *p, *seed)
        }
        GraphSpec::Hypercube { dim } => {
            if *dim == 0 || *dim > 24 {
                return Err(Error::InvalidParameter(format!("hypercube dim must be in 1..=24, got {dim}")));
            }
            Ok(Graph::hypercube(*dim))
        }
        GraphSpec::Complete { n } => {
            positive("n", *n)?;
            Ok(Graph::complete(*n))
        }
        GraphSpec::CompleteBipartite { a, b } => {
            positive("a", *a)?;
            positive("b", *b)?;
            Ok(Graph::complete_bipartite(*a, *b))
        }
        GraphSpec::DisjointUnion { parts } => {
            if parts.is_empty() {
                return Err(Error::InvalidParameter("disjoint_union needs at least one part".into()));
            }
            let graphs = parts.iter().map(generate).collect::<Result<Vec<_>>>()?;
            Ok(Graph::disjoint_union(&graphs))
        }
        GraphSpec::Blowup { base, s } => {
            positive("s", *s)?;
            Ok(generate(base)?.blowup(*s))
        }
        GraphSpec::Petersen => Ok(Graph::petersen()),
        GraphSpec::Cycle { n } => Graph::cycle(*n),
    }
}

/// Canonical text form: header `n m`, then one `u v` line per edge with
/// `u < v`, in lexicographic order, separated by LF (no trailing newline).
pub fn serialize_graph(g: &Graph) -> String {
    let mut out = format!("{} {}", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = write!(out, "\n{u} {v}");
    }
    out
}

fn parse_pair(line: &str, lineno: usize) -> std::result::Result<(usize, usize), ParseError> {
    let malformed = |reason: &str| ParseError::Malformed { line: lineno, reason: reason.to_string() };
    let mut parts = line.split(' ');
    let a = parts.next().ok_or_else(|| malformed("expected two integers"))?;
    let b = parts.next().ok_or_else(|| malformed("expected two integers"))?;
    if parts.next().is_some() {
        return Err(malformed("expected exactly two integers"));
    }
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|c| c.is_ascii_digit());
    if !digits(a) || !digits(b) {
        return Err(malformed("expected ASCII decimal integers"));
    }
    let a = a.parse().map_err(|_| malformed("integer overflow"))?;
    let b = b.parse().map_err(|_| malformed("integer overflow"))?;
    Ok((a, b))
}

/// Parses the canonical text form (a single trailing LF is tolerated).
pub fn parse_graph(text: &str) -> std::result::Result<Graph, ParseError> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or("");
    let (n, m) = parse_pair(header, 1)?;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen = BTreeSet::new();
    let mut found = 0;
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let (u, v) = parse_pair(line, lineno)?;
        for x in [u, v] {
            if x >= n {
                return Err(ParseError::OutOfRange { line: lineno, vertex: x, n });
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop { line: lineno, vertex: u });
        }
        if u > v {
            return Err(ParseError::ReversedEdge { line: lineno, u, v });
        }
        if !seen.insert((u, v)) {
            return Err(ParseError::DuplicateEdge { line: lineno, u, v });
        }
        adj[u].push(v);
        adj[v].push(u);
        found += 1;
    }
    if found != m {
        return Err(ParseError::EdgeCount { declared: m, found });
    }
    Ok(Graph::from_adjacency(adj))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(ids: &[usize]) -> VertexSet {
        VertexSet::from_slice(ids)
    }

    #[test]
    fn average_degree_examples() {
        assert_eq!(Graph::complete(4).average_degree().unwrap(), Rational::from_integer(3));
        assert_eq!(Graph::cycle(5).unwrap().average_degree().unwrap(), Rational::from_integer(2));
        assert_eq!(Graph::petersen().average_degree().unwrap(), Rational::from_integer(3));
        assert_eq!(Graph::empty(0).average_degree(), Err(Error::EmptyGraph));
    }

    #[test]
    fn generator_examples() {
        let q3 = generate(&GraphSpec::Hypercube { dim: 3 }).unwrap();
        assert_eq!((q3.n(), q3.edge_count()), (8, 12));
        assert!(q3.is_regular() && q3.min_degree() == 3);

        let spec = GraphSpec::Blowup { base: Box::new(GraphSpec::Petersen), s: 5 };
        let b = generate(&spec).unwrap();
        assert_eq!(b.n(), 50);
        assert!(b.is_regular() && b.min_degree() == 15);

        let k55 = GraphSpec::CompleteBipartite { a: 5, b: 5 };
        let u = generate(&GraphSpec::DisjointUnion { parts: vec![k55.clone(), k55] }).unwrap();
        assert_eq!(u.n(), 20);
        assert_eq!(u.average_degree().unwrap(), Rational::from_integer(5));
    }

    #[test]
    fn petersen_is_cubic_with_girth_five() {
        let p = Graph::petersen();
        assert_eq!(p.edge_count(), 15);
        assert!(p.is_regular());
        for (u, v) in p.edges() {
            let common = p.neighbors(u).iter().filter(|w| p.has_edge(**w, v)).count();
            assert_eq!(common, 0, "triangle through {u}-{v}");
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(generate(&GraphSpec::Cycle { n: 2 }).is_err());
        assert!(generate(&GraphSpec::Complete { n: 0 }).is_err());
        assert!(generate(&GraphSpec::Gnp { n: 5, p: 1.5, seed: 0 }).is_err());
        assert!(generate(&GraphSpec::DisjointUnion { parts: vec![] }).is_err());
        assert!(generate(&GraphSpec::Hypercube { dim: 0 }).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = GraphSpec::from_json(r#"{"kind":"blowup","base":{"kind":"petersen"},"s":2}"#).unwrap();
        assert_eq!(spec, GraphSpec::Blowup { base: Box::new(GraphSpec::Petersen), s: 2 });
        let text = serde_json::to_string(&GraphSpec::Gnp { n: 4, p: 0.5, seed: 9 }).unwrap();
        assert_eq!(text, r#"{"kind":"gnp","n":4,"p":0.5,"seed":9}"#);
    }

    #[test]
    fn neighborhood_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(external_neighborhood(&k4, &vs(&[0])).unwrap(), vs(&[1, 2, 3]));
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(external_neighborhood(&c5, &vs(&[0, 1])).unwrap(), vs(&[2, 4]));
        let q3 = Graph::hypercube(3);
        assert!(external_neighborhood(&q3, &(0..8).collect()).unwrap().is_empty());
        assert!(external_neighborhood(&k4, &vs(&[7])).is_err());
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(edge_boundary(&Graph::complete(10), &vs(&[0, 1, 2])).unwrap(), 21);
        assert_eq!(edge_boundary(&Graph::cycle(5).unwrap(), &vs(&[0, 1])).unwrap(), 2);
        let two = Graph::disjoint_union(&[Graph::complete(4), Graph::complete(4)]);
        assert_eq!(edge_boundary(&two, &vs(&[0, 1, 2, 3])).unwrap(), 0);
    }

    #[test]
    fn text_format_examples() {
        let p3 = parse_graph("3 2\n0 1\n1 2").unwrap();
        assert_eq!(p3, Graph::path(3));
        assert_eq!(parse_graph("2 1\n0 0"), Err(ParseError::SelfLoop { line: 2, vertex: 0 }));
        assert_eq!(serialize_graph(&Graph::complete(3)), "3 3\n0 1\n0 2\n1 2");
        assert_eq!(parse_graph("3 3\n0 1\n0 2\n1 2\n").unwrap(), Graph::complete(3));
    }

    #[test]
    fn text_format_errors_are_distinct() {
        assert!(matches!(parse_graph("3 1\n0 x"), Err(ParseError::Malformed { line: 2, .. })));
        assert!(matches!(parse_graph("3"), Err(ParseError::Malformed { line: 1, .. })));
        assert!(matches!(parse_graph("3 1\n0 3"), Err(ParseError::OutOfRange { vertex: 3, .. })));
        assert!(matches!(parse_graph("3 2\n0 1\n0 1"), Err(ParseError::DuplicateEdge { .. })));
        assert!(matches!(parse_graph("3 1\n2 1"), Err(ParseError::ReversedEdge { .. })));
        assert!(matches!(parse_graph("3 2\n0 1"), Err(ParseError::EdgeCount { declared: 2, found: 1 })));
        assert!(matches!(parse_graph("3 1\n0  1"), Err(ParseError::Malformed { .. })));
        assert!(matches!(parse_graph("3 1\r\n0 1"), Err(ParseError::Malformed { .. })));
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert_eq!(Graph::from_edges(3, [(0, 1), (1, 0)]), Err(Error::DuplicateEdge { u: 0, v: 1 }));
        assert_eq!(Graph::from_edges(3, [(2, 2)]), Err(Error::SelfLoop { vertex: 2 }));
        assert_eq!(Graph::from_edges(3, [(0, 3)]), Err(Error::VertexOutOfRange { vertex: 3, n: 3 }));
    }

    #[test]
    fn induced_subgraph_keeps_id_map() {
        let c6 = Graph::cycle(6).unwrap();
        let sub = c6.induced_subgraph(&[5, 0, 1, 3]);
        assert_eq!(sub.to_parent, vec![0, 1, 3, 5]);
        assert_eq!(sub.graph.edge_count(), 2);
        assert!(sub.graph.has_edge(0, 1) && sub.graph.has_edge(0, 3));
        let inner = sub.graph.induced_subgraph(&[0, 3]);
        let composed = sub.compose(&inner);
        assert_eq!(composed.to_parent, vec![0, 5]);
        assert_eq!(composed.local(5), Some(1));
    }

    #[test]
    fn components_and_paths() {
        let g = Graph::disjoint_union(&[Graph::complete(3), Graph::path(2), Graph::empty(1)]);
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4], vec![5]]);
        let p = Path::new(vec![0, 1, 2]);
        assert!(p.is_valid_in(&g));
        assert_eq!(p.internal(), &[1]);
        assert!(!Path::new(vec![0, 1, 0]).is_valid_in(&g));
        assert!(!Path::new(vec![2, 3]).is_valid_in(&g));
    }

    #[test]
    fn gnp_is_nested_in_p() {
        let sparse = Graph::gnp(40, 0.1, 11).unwrap();
        let dense = Graph::gnp(40, 0.3, 11).unwrap();
        assert!(sparse.edges().all(|(u, v)| dense.has_edge(u, v)));
    }
}
