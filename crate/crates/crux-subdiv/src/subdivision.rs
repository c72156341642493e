//! Clique-subdivision certificates, their independent verifier, an exhaustive
//! oracle for small graphs, and a direct greedy builder.

use std::collections::{BTreeMap, BinaryHeap, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expansion::ExpanderParams;
use crate::graph::{Graph, Path, Rational, Subgraph};
use crate::search::Bfs;

/// Largest graph accepted by [`max_subdivision_bruteforce`].
pub const ORACLE_THRESHOLD: usize = 12;
/// Core sets tried by [`greedy_subdivision_direct`].
pub const GREEDY_CORE_CANDIDATES: usize = 50;
/// Path-search restarts allowed across all core sets.
pub const GREEDY_RESTARTS: usize = 1000;

/// A `K_t`-subdivision: `t` core vertices and one path per unordered core pair,
/// keyed by `(min, max)` of the two core vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionCertificate {
    pub t: usize,
    pub core: Vec<usize>,
    #[serde(serialize_with = "ser_paths", deserialize_with = "de_paths")]
    pub paths: BTreeMap<(usize, usize), Path>,
}

fn ser_paths<S: Serializer>(paths: &BTreeMap<(usize, usize), Path>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let keyed: BTreeMap<String, &Path> = paths.iter().map(|(&(u, v), p)| (format!("{u}-{v}"), p)).collect();
    keyed.serialize(s)
}

fn de_paths<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<(usize, usize), Path>, D::Error> {
    let keyed = BTreeMap::<String, Path>::deserialize(d)?;
    keyed
        .into_iter()
        .map(|(key, path)| {
            let parsed = key.split_once('-').and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)));
            parsed.map(|k| (k, path)).ok_or_else(|| serde::de::Error::custom(format!("bad path key {key:?}")))
        })
        .collect()
}

impl SubdivisionCertificate {
    /// Certificate from a core and paths; each path is keyed by its endpoints.
    pub fn from_paths(core: Vec<usize>, paths: impl IntoIterator<Item = Path>) -> Self {
        let paths = paths
            .into_iter()
            .map(|p| {
                let (a, b) = (p.first().unwrap_or(0), p.last().unwrap_or(0));
                ((a.min(b), a.max(b)), p)
            })
            .collect();
        SubdivisionCertificate { t: core.len(), core, paths }
    }

    /// The trivial `K_1`-subdivision on a single vertex.
    pub fn single(v: usize) -> Self {
        SubdivisionCertificate { t: 1, core: vec![v], paths: BTreeMap::new() }
    }

    /// Maps every vertex id through `sub` into the parent graph.
    pub fn lift(&self, sub: &Subgraph) -> Self {
        let core = sub.lift_all(&self.core);
        let paths = self.paths.values().map(|p| Path::new(sub.lift_all(p.vertices())));
        SubdivisionCertificate::from_paths(core, paths)
    }

    /// Total number of path edges.
    pub fn total_length(&self) -> usize {
        self.paths.values().map(Path::len).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }
}

/// One way a certificate fails to describe a subdivision in a host graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    CoreSizeMismatch { t: usize, core_len: usize },
    DuplicateCoreVertex { vertex: usize },
    VertexOutOfRange { vertex: usize },
    MissingPath { pair: (usize, usize) },
    UnexpectedPath { pair: (usize, usize) },
    WrongEndpoints { pair: (usize, usize) },
    RepeatedVertex { pair: (usize, usize), vertex: usize },
    MissingEdge { pair: (usize, usize), u: usize, v: usize },
    InternalOverlap { vertex: usize, first: (usize, usize), second: (usize, usize) },
    CoreVertexInternal { vertex: usize, pair: (usize, usize) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = |(a, b): (usize, usize)| format!("{a}-{b}");
        match self {
            Violation::CoreSizeMismatch { t, core_len } => write!(f, "core size mismatch: t = {t} but {core_len} core vertices"),
            Violation::DuplicateCoreVertex { vertex } => write!(f, "duplicate core vertex {vertex}"),
            Violation::VertexOutOfRange { vertex } => write!(f, "vertex {vertex} out of range"),
            Violation::MissingPath { pair } => write!(f, "missing path for pair {}", p(*pair)),
            Violation::UnexpectedPath { pair } => write!(f, "path keyed {} does not join a pair of core vertices", p(*pair)),
            Violation::WrongEndpoints { pair } => write!(f, "path for pair {} has wrong endpoints", p(*pair)),
            Violation::RepeatedVertex { pair, vertex } => write!(f, "path for pair {} repeats vertex {vertex}", p(*pair)),
            Violation::MissingEdge { pair, u, v } => write!(f, "path for pair {} uses non-edge {u}-{v}", p(*pair)),
            Violation::InternalOverlap { vertex, first, second } => {
                write!(f, "internal overlap at vertex {vertex} (paths {} and {})", p(*first), p(*second))
            }
            Violation::CoreVertexInternal { vertex, pair } => {
                write!(f, "core vertex {vertex} is internal to path {}", p(*pair))
            }
        }
    }
}

/// Checks every certificate invariant and returns all violations found
/// (empty means valid).
pub fn verify_subdivision(g: &Graph, cert: &SubdivisionCertificate) -> Vec<Violation> {
    let n = g.n();
    let mut out = Vec::new();
    if cert.t != cert.core.len() {
        out.push(Violation::CoreSizeMismatch { t: cert.t, core_len: cert.core.len() });
    }
    let mut core_seen = HashSet::new();
    for &v in &cert.core {
        if v >= n {
            out.push(Violation::VertexOutOfRange { vertex: v });
        }
        if !core_seen.insert(v) {
            out.push(Violation::DuplicateCoreVertex { vertex: v });
        }
    }
    let mut core_sorted: Vec<usize> = core_seen.iter().copied().collect();
    core_sorted.sort_unstable();
    for (i, &a) in core_sorted.iter().enumerate() {
        for &b in &core_sorted[i + 1..] {
            if !cert.paths.contains_key(&(a, b)) {
                out.push(Violation::MissingPath { pair: (a, b) });
            }
        }
    }
    let mut owner: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (&pair, path) in &cert.paths {
        let (a, b) = pair;
        if a >= b || !core_seen.contains(&a) || !core_seen.contains(&b) {
            out.push(Violation::UnexpectedPath { pair });
        }
        let vs = path.vertices();
        let ends = (vs.first().copied(), vs.last().copied());
        if vs.len() < 2 || (ends != (Some(a), Some(b)) && ends != (Some(b), Some(a))) {
            out.push(Violation::WrongEndpoints { pair });
        }
        let mut seen = HashSet::new();
        for &v in vs {
            if v >= n {
                out.push(Violation::VertexOutOfRange { vertex: v });
            } else if !seen.insert(v) {
                out.push(Violation::RepeatedVertex { pair, vertex: v });
            }
        }
        for w in vs.windows(2) {
            if w[0] < n && w[1] < n && !g.has_edge(w[0], w[1]) {
                out.push(Violation::MissingEdge { pair, u: w[0], v: w[1] });
            }
        }
        if vs.len() >= 2 {
            for &v in &vs[1..vs.len() - 1] {
                if core_seen.contains(&v) {
                    out.push(Violation::CoreVertexInternal { vertex: v, pair });
                } else if let Some(&first) = owner.get(&v) {
                    if first != pair {
                        out.push(Violation::InternalOverlap { vertex: v, first, second: pair });
                    }
                } else {
                    owner.insert(v, pair);
                }
            }
        }
    }
    out
}

/// Result of [`max_subdivision_bruteforce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub t: usize,
    pub certificate: Option<SubdivisionCertificate>,
}

/// Exhaustive search for a `K_t`-subdivision with a given core, over bitmask
/// states. A pair's path matters only through its set of internal vertices,
/// and a smaller set is never worse, so only vertex sets of induced paths
/// (exactly the inclusion-minimal ones) are branched on. Adjacent core pairs
/// thus always use their edge. Failed (remaining pairs, used vertices)
/// states are memoized.
struct CoreSearch<'a> {
    adj: &'a [u32],
    free0: u32,
    pairs: Vec<(usize, usize)>,
    failed: HashSet<(u128, u32)>,
    chosen: Vec<(usize, Vec<usize>)>,
}

impl CoreSearch<'_> {
    /// Vertex sequences of induced `a`–`b` paths with internal vertices in `free`.
    fn induced_paths(&self, a: usize, b: usize, free: u32) -> Vec<(u32, Vec<usize>)> {
        if self.adj[a] >> b & 1 == 1 {
            return vec![(0, vec![a, b])];
        }
        let mut out = Vec::new();
        let mut seq = vec![a];
        self.grow(a, b, free, 0, 1 << a, &mut seq, &mut out);
        out
    }

    /// Extends `seq` (ending at `cur`) by a vertex not adjacent to any earlier
    /// path vertex; `closed` is the closed neighbourhood of all but `cur`.
    #[allow(clippy::too_many_arguments)]
    fn grow(&self, cur: usize, b: usize, free: u32, inner: u32, closed: u32, seq: &mut Vec<usize>, out: &mut Vec<(u32, Vec<usize>)>) {
        let prev_closed = if cur == seq[0] { 0 } else { closed };
        let mut cand = self.adj[cur] & free & !inner & !prev_closed;
        let next_closed = prev_closed | self.adj[cur] | (1 << cur);
        while cand != 0 {
            let y = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            seq.push(y);
            let inner_y = inner | (1 << y);
            if self.adj[y] >> b & 1 == 1 {
                let mut full = seq.clone();
                full.push(b);
                out.push((inner_y, full));
            } else {
                self.grow(y, b, free, inner_y, next_closed, seq, out);
            }
            seq.pop();
        }
    }

    fn solve(&mut self, remaining: u128, used: u32) -> bool {
        if remaining == 0 {
            return true;
        }
        if self.failed.contains(&(remaining, used)) {
            return false;
        }
        let free = self.free0 & !used;
        let mut far = 0;
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            if remaining >> i & 1 == 1 && self.adj[a] >> b & 1 == 0 {
                far += 1;
            }
        }
        if far > free.count_ones() {
            self.failed.insert((remaining, used));
            return false;
        }
        let mut best: Option<(usize, Vec<(u32, Vec<usize>)>)> = None;
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            if remaining >> i & 1 == 0 {
                continue;
            }
            let opts = self.induced_paths(a, b, free);
            if opts.is_empty() {
                self.failed.insert((remaining, used));
                return false;
            }
            if best.as_ref().is_none_or(|(_, o)| opts.len() < o.len()) {
                let single = opts.len() == 1;
                best = Some((i, opts));
                if single {
                    break;
                }
            }
        }
        let (i, mut opts) = best.expect("some pair remains");
        opts.sort_by_key(|(mask, seq)| (mask.count_ones(), seq.clone()));
        for (mask, seq) in opts {
            if self.solve(remaining & !(1u128 << i), used | mask) {
                self.chosen.push((i, seq));
                return true;
            }
        }
        self.failed.insert((remaining, used));
        false
    }
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let t = idx.len();
    for i in (0..t).rev() {
        if idx[i] < n - t + i {
            idx[i] += 1;
            for j in i + 1..t {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Whether `g` contains a `K_t`-subdivision, with one certificate. Cores are
/// tried in lexicographic order among vertices of degree at least `t − 1`.
fn find_subdivision_exact(g: &Graph, adj: &[u32], t: usize) -> Option<SubdivisionCertificate> {
    let n = g.n();
    if t == 0 || t > n {
        return None;
    }
    if t == 1 {
        return Some(SubdivisionCertificate::single(0));
    }
    let cands: Vec<usize> = (0..n).filter(|&v| g.degree(v) + 1 >= t).collect();
    if cands.len() < t {
        return None;
    }
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        let core: Vec<usize> = idx.iter().map(|&i| cands[i]).collect();
        let core_mask: u32 = core.iter().fold(0, |m, &v| m | 1 << v);
        let pairs: Vec<(usize, usize)> =
            (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j))).map(|(i, j)| (core[i], core[j])).collect();
        let far = pairs.iter().filter(|&&(a, b)| !g.has_edge(a, b)).count();
        if far <= n - t {
            let all: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
            let mut search =
                CoreSearch { adj, free0: all & !core_mask, pairs: pairs.clone(), failed: HashSet::new(), chosen: Vec::new() };
            let full: u128 = if pairs.len() == 128 { u128::MAX } else { (1u128 << pairs.len()) - 1 };
            if search.solve(full, 0) {
                let paths = search.chosen.into_iter().map(|(_, seq)| Path::new(seq));
                return Some(SubdivisionCertificate::from_paths(core, paths));
            }
        }
        if !next_combination(&mut idx, cands.len()) {
            return None;
        }
    }
}

/// Largest `t ≤ cap` such that `g` contains a `K_t`-subdivision, with a
/// certificate; exhaustive, for graphs on at most [`ORACLE_THRESHOLD`]
/// vertices. An empty graph yields `t = 0`.
pub fn max_subdivision_bruteforce(g: &Graph, cap: usize) -> Result<OracleResult> {
    if g.n() > ORACLE_THRESHOLD {
        return Err(Error::OracleTooLarge { n: g.n(), threshold: ORACLE_THRESHOLD });
    }
    let adj: Vec<u32> = (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect();
    let top = cap.min(g.max_degree() + 1).min(g.n());
    for t in (1..=top).rev() {
        if let Some(cert) = find_subdivision_exact(g, &adj, t) {
            return Ok(OracleResult { t, certificate: Some(cert) });
        }
    }
    Ok(OracleResult { t: 0, certificate: None })
}

/// Index sets of size `t` over `0..len` in non-increasing order of
/// `Σ weight[i]` (ties: lexicographic), generated lazily.
struct BestCombinations<'a> {
    weight: &'a [usize],
    heap: BinaryHeap<(usize, std::cmp::Reverse<Vec<usize>>)>,
    seen: HashSet<Vec<usize>>,
}

impl<'a> BestCombinations<'a> {
    fn new(weight: &'a [usize], t: usize) -> Self {
        let mut it = BestCombinations { weight, heap: BinaryHeap::new(), seen: HashSet::new() };
        if t <= weight.len() {
            it.push((0..t).collect());
        }
        it
    }

    fn push(&mut self, idx: Vec<usize>) {
        if self.seen.insert(idx.clone()) {
            let w = idx.iter().map(|&i| self.weight[i]).sum();
            self.heap.push((w, std::cmp::Reverse(idx)));
        }
    }
}

impl Iterator for BestCombinations<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let (_, std::cmp::Reverse(idx)) = self.heap.pop()?;
        for i in 0..idx.len() {
            let limit = if i + 1 < idx.len() { idx[i + 1] } else { self.weight.len() };
            if idx[i] + 1 < limit {
                let mut next = idx.clone();
                next[i] += 1;
                self.push(next);
            }
        }
        Some(idx)
    }
}

/// Search effort for the greedy builder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyBudget {
    /// Core sets tried per target size.
    pub core_sets: usize,
    /// Retries shared by all core sets of one target size.
    pub restarts: usize,
    /// Retries allowed for a single core set.
    pub per_core_restarts: usize,
}

impl Default for GreedyBudget {
    fn default() -> Self {
        GreedyBudget { core_sets: GREEDY_CORE_CANDIDATES, restarts: GREEDY_RESTARTS, per_core_restarts: 20 }
    }
}

/// Greedy construction: for the core `A = v_1..v_t`, pairs are joined in
/// double-loop order by shortest paths avoiding all earlier paths and all
/// other core vertices. A failing pair is moved to the front and the core is
/// retried while budget remains. A pass is abandoned early once the
/// unrouted non-adjacent pairs outnumber the unused vertices, since each
/// needs an internal vertex of its own.
fn greedy_with_core(
    g: &Graph,
    bfs: &mut Bfs,
    core: &[usize],
    restarts: &mut usize,
    per_core: usize,
) -> Option<SubdivisionCertificate> {
    let t = core.len();
    let mut order: Vec<(usize, usize)> = (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j))).collect();
    let far_total = order.iter().filter(|&&(i, j)| !g.has_edge(core[i], core[j])).count();
    if far_total > g.n() - t {
        return None;
    }
    let mut blocked = vec![false; g.n()];
    let mut local = per_core;
    loop {
        blocked.iter_mut().for_each(|b| *b = false);
        for &v in core {
            blocked[v] = true;
        }
        let mut paths = Vec::with_capacity(order.len());
        let mut failed_at = None;
        let (mut free, mut far_left) = (g.n() - t, far_total);
        for (k, &(i, j)) in order.iter().enumerate() {
            let (a, b) = (core[i], core[j]);
            if far_left > free {
                failed_at = Some(k);
                break;
            }
            match bfs.pair_path(g, a, b, |v| v != b && blocked[v], usize::MAX) {
                Some(p) => {
                    for &v in &p[1..p.len() - 1] {
                        blocked[v] = true;
                    }
                    free -= p.len() - 2;
                    if p.len() > 2 {
                        far_left -= 1;
                    }
                    paths.push(Path::new(p));
                }
                None => {
                    failed_at = Some(k);
                    break;
                }
            }
        }
        match failed_at {
            None => return Some(SubdivisionCertificate::from_paths(core.to_vec(), paths)),
            // Failing with nothing else routed: no retry can help.
            Some(0) => return None,
            Some(k) => {
                if *restarts == 0 || local == 0 {
                    return None;
                }
                *restarts -= 1;
                local -= 1;
                let pair = order.remove(k);
                order.insert(0, pair);
            }
        }
    }
}

fn candidates(g: &Graph, pool: Option<&[usize]>) -> Vec<usize> {
    let mut cands: Vec<usize> = match pool {
        Some(p) => {
            let mut p = p.to_vec();
            p.sort_unstable();
            p.dedup();
            p.retain(|&v| v < g.n());
            p
        }
        None => (0..g.n()).collect(),
    };
    cands.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    cands
}

/// Greedy `K_t`-subdivision with core drawn from `pool` (all vertices when
/// `None`): core sets are tried in non-increasing degree-sum order, starting
/// from the `t` highest-degree vertices (ties: lower id first).
pub fn greedy_subdivision_in(g: &Graph, t: usize, pool: Option<&[usize]>) -> Option<SubdivisionCertificate> {
    greedy_subdivision_budgeted(g, t, pool, &GreedyBudget::default())
}

/// [`greedy_subdivision_in`] with an explicit search budget.
pub fn greedy_subdivision_budgeted(
    g: &Graph,
    t: usize,
    pool: Option<&[usize]>,
    budget: &GreedyBudget,
) -> Option<SubdivisionCertificate> {
    let cands = candidates(g, pool);
    greedy_from_candidates(g, t, &cands, &mut Bfs::new(g.n()), budget)
}

fn greedy_from_candidates(
    g: &Graph,
    t: usize,
    sorted: &[usize],
    bfs: &mut Bfs,
    budget: &GreedyBudget,
) -> Option<SubdivisionCertificate> {
    if t == 0 {
        return None;
    }
    if t == 1 {
        return sorted.iter().min().map(|&v| SubdivisionCertificate::single(v));
    }
    let cands: Vec<usize> = sorted.iter().copied().filter(|&v| g.degree(v) + 1 >= t).collect();
    let weight: Vec<usize> = cands.iter().map(|&v| g.degree(v)).collect();
    let mut restarts = budget.restarts;
    for idx in BestCombinations::new(&weight, t).take(budget.core_sets) {
        let core: Vec<usize> = idx.iter().map(|&i| cands[i]).collect();
        if let Some(cert) = greedy_with_core(g, bfs, &core, &mut restarts, budget.per_core_restarts) {
            debug_assert!(verify_subdivision(g, &cert).is_empty());
            return Some(cert);
        }
    }
    None
}

/// [`greedy_subdivision_in`] over all vertices.
pub fn greedy_subdivision_direct(g: &Graph, t: usize) -> Option<SubdivisionCertificate> {
    greedy_subdivision_in(g, t, None)
}

/// Largest `t ≤ max_t` found by [`greedy_subdivision_in`]; returns `None`
/// only for an empty pool or graph.
pub fn greedy_max_subdivision(g: &Graph, max_t: usize, pool: Option<&[usize]>) -> Option<SubdivisionCertificate> {
    greedy_max_budgeted(g, 1, max_t, pool, &GreedyBudget::default())
}

/// Largest greedy subdivision with `t` in `[floor, max_t]`. Sizes are
/// bisected up to the largest `t` with `t` pool vertices of degree at least
/// `t − 1` (success is close to, but not exactly, monotone in `t`), then
/// two further sizes above the best are probed. Sizes below `floor` are
/// never attempted; `None` if nothing at or above `floor` succeeds.
pub fn greedy_max_budgeted(
    g: &Graph,
    floor: usize,
    max_t: usize,
    pool: Option<&[usize]>,
    budget: &GreedyBudget,
) -> Option<SubdivisionCertificate> {
    let cands = candidates(g, pool);
    let degree_bound = (1..=cands.len()).take_while(|&t| g.degree(cands[t - 1]) + 1 >= t).last().unwrap_or(0);
    let upper = degree_bound.min(max_t);
    let floor = floor.max(1);
    if upper < floor {
        return None;
    }
    let mut bfs = Bfs::new(g.n());
    let mut attempt = |t: usize| greedy_from_candidates(g, t, &cands, &mut bfs, budget);
    let mut best = None;
    let mut ok = floor - 1;
    let mut bad = upper + 1;
    while bad - ok > 1 {
        let mid = ok + (bad - ok).div_ceil(2);
        let mid = mid.min(bad - 1);
        match attempt(mid) {
            Some(c) => {
                ok = mid;
                best = Some(c);
            }
            None => bad = mid,
        }
    }
    let mut probe = ok + 2;
    while probe <= upper && probe <= ok + 3 {
        if let Some(c) = attempt(probe) {
            ok = probe;
            best = Some(c);
            probe = ok + 2;
        } else {
            probe += 1;
        }
    }
    best
}

/// Outcome of [`bounded_maxdeg_reduce`].
#[derive(Clone, Debug, PartialEq)]
pub struct MaxDegReduction {
    /// The graph with every vertex above the cap removed.
    pub reduced: Subgraph,
    /// Vertices above the cap, in the original graph.
    pub high: Vec<usize>,
    /// A `K_{t_target}`-subdivision on the high-degree vertices, if found.
    pub certificate: Option<SubdivisionCertificate>,
    /// Parameters the reduced graph is expected to satisfy as a robust expander.
    pub halved: ExpanderParams,
    /// `|H| ≥ n/2`.
    pub size_holds: bool,
    /// `δ(H) ≥ d(G)/4`.
    pub min_degree_holds: bool,
}

/// High-degree reduction: when at least `t_target` vertices exceed
/// `degree_cap`, tries to join them greedily into a `K_{t_target}`-subdivision;
/// in any case returns the graph without those vertices. When
/// `degree_cap ≥ d`, `δ(G) ≥ d/2` and at most `d/4` vertices are removed,
/// `δ(H) ≥ d/4` and `|H| ≥ n/2` follow and are enforced; a cap below `d`
/// is accepted but carries no guarantee.
pub fn bounded_maxdeg_reduce(
    g: &Graph,
    params: &ExpanderParams,
    degree_cap: usize,
    t_target: usize,
) -> Result<MaxDegReduction> {
    let d = g.average_degree()?;
    let high: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > degree_cap).collect();
    let certificate =
        if high.len() >= t_target && t_target >= 1 { greedy_subdivision_in(g, t_target, Some(&high)) } else { None };
    let reduced = g.without_vertices(&high);
    let h = &reduced.graph;
    let size_holds = 2 * h.n() >= g.n();
    let min_degree_holds = h.n() > 0 && Rational::from_integer(4 * h.min_degree() as i64) >= d;
    let guaranteed = Rational::from_integer(degree_cap as i64) >= d
        && Rational::from_integer(2 * g.min_degree() as i64) >= d
        && Rational::from_integer(4 * high.len() as i64) <= d;
    if guaranteed && !(size_holds && min_degree_holds) {
        return Err(Error::GuaranteeViolated("high-degree reduction lost too many vertices or too much degree".into()));
    }
    let halved = ExpanderParams::without_integral_check(params.eps() / 2.0, params.k())?;
    Ok(MaxDegReduction { reduced, high, certificate, halved, size_holds, min_degree_holds })
}
