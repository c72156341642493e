//! The crux of a graph (smallest order of a subgraph keeping an `α` fraction
//! of the average degree), small-set expansion profiles, and the reduction
//! from CLIQUE to deciding crux size.
//!
//! Smallest crux witnesses are always connected: if `S` splits into parts
//! with no edges between them, the average degree of `G[S]` is a weighted
//! mean of the parts' average degrees, so some part meets the threshold on
//! fewer vertices. The exact search therefore enumerates connected vertex
//! sets only.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::CheckMode;
use crate::graph::{Graph, Rational, VertexSet};

/// Largest graph accepted by [`crux_exact`].
pub const CRUX_EXACT_THRESHOLD: usize = 20;
/// Largest graph for which [`expansion_profile`] enumerates exhaustively.
pub const PROFILE_EXACT_THRESHOLD: usize = 20;
/// Default search-node budget for the certified scan inside [`crux_bounds`].
pub const DEFAULT_SCAN_BUDGET: u64 = 2_000_000;

/// The default crux fraction `1/100`.
pub fn default_alpha() -> Rational {
    Rational::new(1, 100)
}

/// How a [`CruxReport`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CruxMode {
    Exact,
    Bounded,
}

/// Bounds on the crux order `c_α(G)`; `witness` has exactly `upper` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CruxReport {
    #[serde(with = "crate::ratio::as_string")]
    pub alpha: Rational,
    pub lower: usize,
    pub upper: usize,
    pub witness: Option<VertexSet>,
    pub mode: CruxMode,
}

impl CruxReport {
    /// Whether the bounds coincide.
    pub fn is_tight(&self) -> bool {
        self.lower == self.upper
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn validate_alpha(alpha: Rational) -> Result<()> {
    if alpha <= Rational::from_integer(0) || alpha > Rational::from_integer(1) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// Exact density threshold: `S` qualifies iff `e(S) ≥ need(|S|)`.
struct Target {
    /// `α·e(G)/n`, the required edges per vertex.
    per_vertex: Rational,
    /// `α·d(G)`, a lower bound on `|S| − 1`.
    degree: Rational,
    /// Degrees in non-increasing order.
    degrees: Vec<usize>,
}

impl Target {
    fn new(g: &Graph, alpha: Rational) -> Result<Self> {
        validate_alpha(alpha)?;
        if g.n() == 0 {
            return Err(Error::EmptyGraph);
        }
        if g.edge_count() == 0 {
            return Err(Error::NoEdges);
        }
        let e = Rational::from_integer(g.edge_count() as i64);
        let n = Rational::from_integer(g.n() as i64);
        let mut degrees: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Target { per_vertex: alpha * e / n, degree: alpha * e * 2 / n, degrees })
    }

    fn need(&self, m: usize) -> usize {
        (self.per_vertex * Rational::from_integer(m as i64)).ceil().to_integer().max(0) as usize
    }

    /// Necessary conditions for an `m`-vertex witness: `m − 1 ≥ α·d(G)` and
    /// the top-`m` degrees, each capped at `m − 1`, carry enough edges.
    fn plausible(&self, m: usize) -> bool {
        if m < 2 || Rational::from_integer(m as i64 - 1) < self.degree {
            return false;
        }
        let cap: usize = self.degrees.iter().take(m).map(|&d| d.min(m - 1)).sum();
        cap >= 2 * self.need(m)
    }

    fn first_plausible(&self, from: usize, n: usize) -> Option<usize> {
        (from..=n).find(|&m| self.plausible(m))
    }
}

/// Whether `set` induces a subgraph of average degree at least `α·d(G)`.
pub fn is_crux_witness(g: &Graph, alpha: Rational, set: &VertexSet) -> Result<bool> {
    let target = Target::new(g, alpha)?;
    g.check_vertices(set.as_slice())?;
    if set.is_empty() {
        return Ok(false);
    }
    let mask = set.mask(g.n());
    let inner = set.iter().map(|v| g.neighbors(v).iter().filter(|&&w| mask[w]).count()).sum::<usize>() / 2;
    Ok(inner >= target.need(set.len()))
}

enum Scan {
    Found(Vec<usize>),
    Infeasible,
    Exhausted,
}

/// Branch and bound over connected vertex sets of a fixed size, enumerated
/// without repetition by root-extension (each set is grown from its
/// first vertex in the search order). Prunes with
/// `2e(S) + Σ_top-r (2a(v) + min(r−1, deg v)) < 2·need`, where `a(v)` counts
/// neighbours of `v` inside `S` and `r` vertices remain to be chosen.
struct DenseSearch<'a> {
    g: &'a Graph,
    order: Vec<usize>,
    pos: Vec<usize>,
    a: Vec<usize>,
    in_set: Vec<bool>,
    in_ext: Vec<bool>,
    set: Vec<usize>,
    scratch: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl<'a> DenseSearch<'a> {
    fn new(g: &'a Graph, budget: u64) -> Self {
        let n = g.n();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (Reverse(g.degree(v)), v));
        let mut pos = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        DenseSearch {
            g,
            order,
            pos,
            a: vec![0; n],
            in_set: vec![false; n],
            in_ext: vec![false; n],
            set: Vec::new(),
            scratch: Vec::new(),
            nodes: 0,
            budget,
        }
    }

    fn push(&mut self, v: usize) -> usize {
        self.in_set[v] = true;
        self.set.push(v);
        for &u in self.g.neighbors(v) {
            self.a[u] += 1;
        }
        self.a[v]
    }

    fn pop(&mut self, v: usize) {
        self.in_set[v] = false;
        self.set.pop();
        for &u in self.g.neighbors(v) {
            self.a[u] -= 1;
        }
    }

    fn find(&mut self, m: usize, need: usize) -> Scan {
        for root_pos in 0..self.order.len() {
            let root = self.order[root_pos];
            if self.g.degree(root) == 0 {
                break;
            }
            self.push(root);
            let mut ext: Vec<usize> =
                self.g.neighbors(root).iter().copied().filter(|&u| self.pos[u] > root_pos).collect();
            ext.sort_by_key(|&u| self.pos[u]);
            for &u in &ext {
                self.in_ext[u] = true;
            }
            let outcome = self.extend(root_pos, &ext, 0, m, need);
            for &u in &ext {
                self.in_ext[u] = false;
            }
            if let Some(true) = outcome {
                let mut found = self.set.clone();
                while let Some(&v) = self.set.last() {
                    self.pop(v);
                }
                self.in_ext.iter_mut().for_each(|x| *x = false);
                found.sort_unstable();
                return Scan::Found(found);
            }
            self.pop(root);
            if outcome.is_none() {
                return Scan::Exhausted;
            }
        }
        Scan::Infeasible
    }

    fn bound_ok(&mut self, root_pos: usize, r: usize, edges: usize, need: usize) -> bool {
        self.scratch.clear();
        for p in root_pos + 1..self.order.len() {
            let v = self.order[p];
            if self.in_set[v] || (self.a[v] > 0 && !self.in_ext[v]) {
                continue;
            }
            let deg = self.g.degree(v);
            if deg == 0 {
                break;
            }
            self.scratch.push(2 * self.a[v] + deg.min(r - 1));
        }
        if self.scratch.len() < r {
            return false;
        }
        if self.scratch.len() > r {
            self.scratch.select_nth_unstable_by(r - 1, |x, y| y.cmp(x));
        }
        let top: usize = self.scratch[..r].iter().sum();
        2 * edges + top >= 2 * need
    }

    /// `Some(true)` leaves the witness in `self.set`; `None` means the node
    /// budget ran out.
    fn extend(&mut self, root_pos: usize, ext: &[usize], edges: usize, m: usize, need: usize) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if self.set.len() == m {
            return Some(edges >= need);
        }
        let r = m - self.set.len();
        if !self.bound_ok(root_pos, r, edges, need) {
            return Some(false);
        }
        let mut result = Some(false);
        for idx in 0..ext.len() {
            let w = ext[idx];
            self.in_ext[w] = false;
            let mut next: Vec<usize> = ext[idx + 1..].to_vec();
            let fresh_from = next.len();
            for &u in self.g.neighbors(w) {
                if self.pos[u] > root_pos && !self.in_set[u] && self.a[u] == 0 {
                    next.push(u);
                }
            }
            for &u in &next[fresh_from..] {
                self.in_ext[u] = true;
            }
            let gained = self.push(w);
            let outcome = self.extend(root_pos, &next, edges + gained, m, need);
            if outcome == Some(true) {
                // Leave the witness in place for the caller to copy.
                for &u in &next[fresh_from..] {
                    self.in_ext[u] = false;
                }
                for &u in &ext[idx..] {
                    self.in_ext[u] = true;
                }
                return Some(true);
            }
            self.pop(w);
            for &u in &next[fresh_from..] {
                self.in_ext[u] = false;
            }
            if outcome.is_none() {
                result = None;
                break;
            }
        }
        for &u in ext {
            self.in_ext[u] = true;
        }
        result
    }
}

/// Exact crux order by branch and bound over connected sets of increasing
/// size. Rejects graphs above [`CRUX_EXACT_THRESHOLD`] vertices.
pub fn crux_exact(g: &Graph, alpha: Rational) -> Result<CruxReport> {
    if g.n() > CRUX_EXACT_THRESHOLD {
        return Err(Error::CruxTooLarge { n: g.n(), threshold: CRUX_EXACT_THRESHOLD });
    }
    let target = Target::new(g, alpha)?;
    let mut search = DenseSearch::new(g, u64::MAX);
    for m in 2..=g.n() {
        if !target.plausible(m) {
            continue;
        }
        if let Scan::Found(set) = search.find(m, target.need(m)) {
            return Ok(CruxReport {
                alpha,
                lower: m,
                upper: m,
                witness: Some(VertexSet::from_vec(set)),
                mode: CruxMode::Exact,
            });
        }
    }
    Err(Error::GuaranteeViolated("no crux witness found although the whole graph qualifies".into()))
}

/// Smallest crux witness with at most `max_size` vertices, or `None` if
/// `c_α(G) > max_size`. No size threshold applies; cost grows roughly like
/// the number of dense connected sets of order at most `max_size`.
pub fn crux_at_most(g: &Graph, alpha: Rational, max_size: usize) -> Result<Option<VertexSet>> {
    let target = Target::new(g, alpha)?;
    let mut search = DenseSearch::new(g, u64::MAX);
    for m in 2..=max_size.min(g.n()) {
        if !target.plausible(m) {
            continue;
        }
        if let Scan::Found(set) = search.find(m, target.need(m)) {
            return Ok(Some(VertexSet::from_vec(set)));
        }
    }
    Ok(None)
}

/// Certified bounds on `c_α(G)` for graphs of any size, with the default
/// scan budget.
pub fn crux_bounds(g: &Graph, alpha: Rational) -> Result<CruxReport> {
    crux_bounds_with_budget(g, alpha, DEFAULT_SCAN_BUDGET)
}

/// Upper bound: the smallest qualifying set among all suffixes of the
/// min-degree peeling order and greedy growths from high-degree seeds, each
/// shrunk by removing minimum-degree vertices while the threshold holds.
/// Lower bound: the smallest size passing the necessary conditions, raised
/// by an exact scan of larger sizes until `budget` search nodes are spent.
pub fn crux_bounds_with_budget(g: &Graph, alpha: Rational, budget: u64) -> Result<CruxReport> {
    let target = Target::new(g, alpha)?;
    let n = g.n();
    let mut best: Vec<usize> = peel_witness(g, &target);
    best = shrink(g, &target, best);
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&v| (Reverse(g.degree(v)), v));
    seeds.truncate(16);
    for &seed in &seeds {
        if best.len() <= 2 {
            break;
        }
        if let Some(found) = grow_witness(g, &target, seed, best.len() - 1) {
            let found = shrink(g, &target, found);
            if found.len() < best.len() {
                best = found;
            }
        }
    }
    let mut upper = best.len();
    let mut lower = target.first_plausible(2, n).unwrap_or(upper).min(upper);
    let mut search = DenseSearch::new(g, budget);
    while lower < upper {
        match search.find(lower, target.need(lower)) {
            Scan::Found(set) => {
                upper = lower;
                best = set;
            }
            Scan::Infeasible => {
                lower = target.first_plausible(lower + 1, n).unwrap_or(upper).min(upper);
            }
            Scan::Exhausted => break,
        }
    }
    Ok(CruxReport { alpha, lower, upper, witness: Some(VertexSet::from_vec(best)), mode: CruxMode::Bounded })
}

/// Smallest qualifying suffix of the min-degree peeling order (ties broken
/// by smaller id).
fn peel_witness(g: &Graph, target: &Target) -> Vec<usize> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (deg[v], v)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut edges = g.edge_count();
    let mut best_step = 0;
    for step in 0..n {
        let remaining = n - step;
        if edges >= target.need(remaining) {
            best_step = step;
        }
        let &(d, v) = queue.iter().next().expect("vertices remain");
        queue.remove(&(d, v));
        removed[v] = true;
        order.push(v);
        edges -= d;
        for &u in g.neighbors(v) {
            if !removed[u] {
                queue.remove(&(deg[u], u));
                deg[u] -= 1;
                queue.insert((deg[u], u));
            }
        }
    }
    let dropped: Vec<bool> = {
        let mut mask = vec![false; n];
        for &v in &order[..best_step] {
            mask[v] = true;
        }
        mask
    };
    (0..n).filter(|&v| !dropped[v]).collect()
}

/// Greedily adds the vertex with most neighbours in the current set (ties:
/// higher degree, then smaller id) until the threshold is met or `limit`
/// vertices are used.
fn grow_witness(g: &Graph, target: &Target, seed: usize, limit: usize) -> Option<Vec<usize>> {
    let n = g.n();
    let mut a = vec![0usize; n];
    let mut in_set = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut set = Vec::new();
    let mut edges = 0;
    let mut next = Some(seed);
    while let Some(v) = next.take() {
        in_set[v] = true;
        set.push(v);
        edges += a[v];
        if set.len() >= 2 && edges >= target.need(set.len()) {
            return Some(set);
        }
        if set.len() >= limit {
            return None;
        }
        for &u in g.neighbors(v) {
            if !in_set[u] {
                a[u] += 1;
                heap.push((a[u], g.degree(u), Reverse(u)));
            }
        }
        while let Some((count, _, Reverse(u))) = heap.pop() {
            if !in_set[u] && count == a[u] {
                next = Some(u);
                break;
            }
        }
    }
    None
}

/// Removes minimum inner-degree vertices (smallest id first) while the set
/// still qualifies. Removing a minimum-degree vertex keeps the most edges,
/// so the result admits no qualifying single-vertex deletion.
fn shrink(g: &Graph, target: &Target, set: Vec<usize>) -> Vec<usize> {
    let n = g.n();
    let mut member = vec![false; n];
    for &v in &set {
        member[v] = true;
    }
    let mut inner = vec![0usize; n];
    let mut queue = BTreeSet::new();
    let mut edges = 0;
    for &v in &set {
        inner[v] = g.neighbors(v).iter().filter(|&&w| member[w]).count();
        edges += inner[v];
        queue.insert((inner[v], v));
    }
    edges /= 2;
    let mut size = set.len();
    while size > 2 {
        let &(d, v) = queue.iter().next().expect("non-empty");
        if edges - d < target.need(size - 1) {
            break;
        }
        queue.remove(&(d, v));
        member[v] = false;
        edges -= d;
        size -= 1;
        for &u in g.neighbors(v) {
            if member[u] {
                queue.remove(&(inner[u], u));
                inner[u] -= 1;
                queue.insert((inner[u], u));
            }
        }
    }
    let mut out: Vec<usize> = queue.into_iter().map(|(_, v)| v).collect();
    out.sort_unstable();
    out
}

/// How a [`ProfileReport`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMode {
    /// Minimum over every set of admissible size.
    Exact,
    /// Minimum over sampled sets: an upper bound on the true profile.
    Sampled,
}

/// Options for [`expansion_profile`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileOptions {
    pub mode: CheckMode,
    pub exact_threshold: usize,
    /// Samples of each kind in sampled mode; defaults to `10·n`.
    pub trials: Option<usize>,
    pub seed: u64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { mode: CheckMode::Auto, exact_threshold: PROFILE_EXACT_THRESHOLD, trials: None, seed: 0 }
    }
}

/// Minimum of `e(S, Sᶜ) / (d(G)·|S|)` over `1 ≤ |S| ≤ max_size`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub delta: f64,
    pub max_size: usize,
    #[serde(with = "crate::ratio::as_string")]
    pub value: Rational,
    pub boundary: usize,
    pub argmin: VertexSet,
    pub mode: ProfileMode,
    pub trials: Option<usize>,
}

impl ProfileReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn profile_value(g: &Graph, boundary: usize, size: usize) -> Rational {
    // boundary / (d·size) with d = 2e/n.
    Rational::new((boundary * g.n()) as i64, (2 * g.edge_count() * size) as i64)
}

/// Expansion profile at `delta`: sets of size up to `⌊δn⌋` are considered.
/// `d` is the average degree, which is the common degree for regular graphs.
pub fn expansion_profile(g: &Graph, delta: f64, opts: &ProfileOptions) -> Result<ProfileReport> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if !delta.is_finite() || delta <= 0.0 || delta > 1.0 {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1], got {delta}")));
    }
    let max_size = (delta * g.n() as f64 + 1e-9).floor() as usize;
    if max_size == 0 {
        return Err(Error::EmptySizeRange);
    }
    let exact = match opts.mode {
        CheckMode::Exact => {
            if g.n() > opts.exact_threshold {
                return Err(Error::ExactInfeasible { n: g.n(), threshold: opts.exact_threshold });
            }
            true
        }
        CheckMode::Sampled => false,
        CheckMode::Auto => g.n() <= opts.exact_threshold,
    };
    let mut report = if exact {
        profile_exact(g, max_size)
    } else {
        let trials = opts.trials.unwrap_or(10 * g.n()).max(1);
        profile_sampled(g, max_size, trials, opts.seed)
    };
    report.delta = delta;
    Ok(report)
}

/// Exhaustive profile over sets of size `1..=max_size`; ties prefer the
/// smaller set, then the lexicographically first.
pub(crate) fn profile_exact(g: &Graph, max_size: usize) -> ProfileReport {
    struct Enum<'a> {
        g: &'a Graph,
        max_size: usize,
        member: Vec<bool>,
        set: Vec<usize>,
        best: (usize, usize, Vec<usize>),
    }
    impl Enum<'_> {
        fn visit(&mut self, start: usize, boundary: usize) {
            for v in start..self.g.n() {
                let inside = self.g.neighbors(v).iter().filter(|&&w| self.member[w]).count();
                let b = boundary + self.g.degree(v) - 2 * inside;
                self.member[v] = true;
                self.set.push(v);
                let s = self.set.len();
                let (bb, bs, _) = &self.best;
                if b * bs < bb * s || (b * bs == bb * s && s < *bs) {
                    self.best = (b, s, self.set.clone());
                }
                if s < self.max_size {
                    self.visit(v + 1, b);
                }
                self.set.pop();
                self.member[v] = false;
            }
        }
    }
    let mut e = Enum {
        g,
        max_size: max_size.min(g.n()),
        member: vec![false; g.n()],
        set: Vec::new(),
        best: (usize::MAX / 4, 1, Vec::new()),
    };
    e.visit(0, 0);
    let (boundary, size, argmin) = e.best;
    ProfileReport {
        delta: max_size as f64 / g.n() as f64,
        max_size,
        value: profile_value(g, boundary, size),
        boundary,
        argmin: VertexSet::from_vec(argmin),
        mode: ProfileMode::Exact,
        trials: None,
    }
}

/// Sampled profile: per trial, one random connected growth from a random
/// vertex and one random-permutation prefix, evaluating every prefix.
fn profile_sampled(g: &Graph, max_size: usize, trials: usize, seed: u64) -> ProfileReport {
    let n = g.n();
    let cap = max_size.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut member = vec![false; n];
    let mut best: (usize, usize, Vec<usize>) = (usize::MAX / 4, 1, Vec::new());
    let consider = |seq: &[usize], member: &mut [bool], best: &mut (usize, usize, Vec<usize>)| {
        let mut b = 0usize;
        for (i, &v) in seq.iter().enumerate() {
            let inside = g.neighbors(v).iter().filter(|&&w| member[w]).count();
            b = b + g.degree(v) - 2 * inside;
            member[v] = true;
            let s = i + 1;
            if b * best.1 < best.0 * s {
                *best = (b, s, seq[..s].to_vec());
            }
        }
        for &v in seq {
            member[v] = false;
        }
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut in_frontier = vec![false; n];
    for _ in 0..trials {
        let start = rng.gen_range(0..n);
        let mut seq = vec![start];
        let mut taken = vec![start];
        member[start] = true;
        let mut frontier: Vec<usize> = Vec::new();
        for &w in g.neighbors(start) {
            in_frontier[w] = true;
            frontier.push(w);
        }
        while seq.len() < cap && !frontier.is_empty() {
            let i = rng.gen_range(0..frontier.len());
            let v = frontier.swap_remove(i);
            in_frontier[v] = false;
            member[v] = true;
            taken.push(v);
            seq.push(v);
            for &w in g.neighbors(v) {
                if !member[w] && !in_frontier[w] {
                    in_frontier[w] = true;
                    frontier.push(w);
                }
            }
        }
        for &v in &frontier {
            in_frontier[v] = false;
        }
        for &v in &taken {
            member[v] = false;
        }
        consider(&seq, &mut member, &mut best);
        perm.shuffle(&mut rng);
        consider(&perm[..cap], &mut member, &mut best);
    }
    let (boundary, size, argmin) = best;
    ProfileReport {
        delta: max_size as f64 / n as f64,
        max_size,
        value: profile_value(g, boundary, size),
        boundary,
        argmin: VertexSet::from_vec(argmin),
        mode: ProfileMode::Sampled,
        trials: Some(trials),
    }
}

/// Both sides of the inequality linking the crux to small-set expansion:
/// every set smaller than the `ε`-crux expands by more than `1 − ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SseReport {
    pub crux: usize,
    #[serde(with = "crate::ratio::as_string")]
    pub delta: Rational,
    #[serde(with = "crate::ratio::as_string")]
    pub phi: Rational,
    #[serde(with = "crate::ratio::as_string")]
    pub bound: Rational,
    pub holds: bool,
    /// The inequality is only claimed for regular graphs.
    pub regular: bool,
}

/// Computes `c_ε(G)` and the exact profile at `δ = (c_ε − 1)/n`, and checks
/// `φ_δ(G) > 1 − ε`.
pub fn sse_crux_consistency(g: &Graph, eps: Rational) -> Result<SseReport> {
    if g.n() > PROFILE_EXACT_THRESHOLD {
        return Err(Error::ExactInfeasible { n: g.n(), threshold: PROFILE_EXACT_THRESHOLD });
    }
    if eps >= Rational::from_integer(1) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let crux = crux_exact(g, eps)?.upper;
    let profile = profile_exact(g, crux - 1);
    let bound = Rational::from_integer(1) - eps;
    Ok(SseReport {
        crux,
        delta: Rational::new(crux as i64 - 1, g.n() as i64),
        phi: profile.value,
        bound,
        holds: profile.value > bound,
        regular: g.is_regular(),
    })
}

/// Clique number by branch and bound on bitsets.
pub fn clique_number(g: &Graph) -> usize {
    let n = g.n();
    let words = n.div_ceil(64);
    let adj: Vec<Vec<u64>> = (0..n)
        .map(|v| {
            let mut bits = vec![0u64; words];
            for &u in g.neighbors(v) {
                bits[u / 64] |= 1 << (u % 64);
            }
            bits
        })
        .collect();
    fn count(bits: &[u64]) -> usize {
        bits.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn expand(adj: &[Vec<u64>], mut cand: Vec<u64>, size: usize, best: &mut usize) {
        loop {
            let left = count(&cand);
            if left == 0 {
                *best = (*best).max(size);
                return;
            }
            if size + left <= *best {
                return;
            }
            let (w, bit) = cand.iter().enumerate().find(|(_, &b)| b != 0).map(|(i, &b)| (i, b.trailing_zeros())).unwrap();
            let v = w * 64 + bit as usize;
            cand[w] &= !(1u64 << bit);
            let next: Vec<u64> = cand.iter().zip(&adj[v]).map(|(a, b)| a & b).collect();
            expand(adj, next, size + 1, best);
        }
    }
    let mut all = vec![u64::MAX; words];
    if n % 64 != 0 {
        all[words - 1] = (1u64 << (n % 64)) - 1;
    }
    if n == 0 {
        return 0;
    }
    let mut best = 1;
    expand(&adj, all, 0, &mut best);
    best
}

/// Which branch of the reduction produced a [`Gadget`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum GadgetCase {
    /// The input average degree already lies in the target interval.
    Unchanged,
    /// Average degree too high: `copies` disjoint copies plus `isolated`
    /// isolated vertices.
    Dense { copies: usize, isolated: usize },
    /// Average degree too low: `2·layers` copies, with every copy in the first
    /// half joined to every copy in the second half along matching vertices;
    /// `padding` records a follow-up dense step when the degree overshoots.
    Sparse { layers: usize, padding: Option<(usize, usize)> },
}

/// Output of [`np_gadget`].
#[derive(Clone, Debug, PartialEq)]
pub struct Gadget {
    pub graph: Graph,
    pub case: GadgetCase,
    /// Index of the input copy each vertex belongs to (`None` for padding).
    pub copy_of: Vec<Option<usize>>,
    /// Open lower end of the target average-degree interval.
    pub low: Rational,
    /// Closed upper end of the target average-degree interval.
    pub high: Rational,
    pub clique_number: usize,
}

/// Serializable summary of a [`Gadget`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetSummary {
    #[serde(flatten)]
    pub case: GadgetCase,
    pub n: usize,
    pub edges: usize,
    #[serde(with = "crate::ratio::as_string")]
    pub average_degree: Rational,
    #[serde(with = "crate::ratio::as_string")]
    pub low: Rational,
    #[serde(with = "crate::ratio::as_string")]
    pub high: Rational,
    pub clique_number: usize,
}

impl Gadget {
    pub fn summary(&self) -> GadgetSummary {
        GadgetSummary {
            case: self.case.clone(),
            n: self.graph.n(),
            edges: self.graph.edge_count(),
            average_degree: self.graph.average_degree().expect("gadget is non-empty"),
            low: self.low,
            high: self.high,
            clique_number: self.clique_number,
        }
    }
}

/// Dense step: `⌈k·d/n⌉` copies and the fewest isolated vertices bringing
/// the average degree down to at most `high`.
fn pad_down(h: &Graph, copy_of: &[Option<usize>], k: usize, high: Rational) -> (Graph, Vec<Option<usize>>, usize, usize) {
    let n = h.n() as i64;
    let d = h.average_degree().expect("non-empty");
    let copies = (d * k as i64 / n).ceil().to_integer() as usize;
    let base = Rational::from_integer(copies as i64 * n);
    let isolated = (base * d / high - base).ceil().to_integer().max(0) as usize;
    let mut parts = vec![h.clone(); copies];
    parts.push(Graph::empty(isolated));
    let graph = Graph::disjoint_union(&parts);
    let span = copy_of.iter().flatten().max().map_or(1, |&c| c + 1);
    let mut labels = Vec::with_capacity(graph.n());
    for c in 0..copies {
        labels.extend(copy_of.iter().map(|o| o.map(|i| c * span + i)));
    }
    labels.extend(std::iter::repeat(None).take(isolated));
    (graph, labels, copies, isolated)
}

/// Builds `G'` with `ω(G') = ω(G)` and `d(G') ∈ ((k−1−1/k)/ε, (k−1)/ε]`, so
/// that `G` has a `k`-clique iff `c_ε(G') ≤ k`. Both postconditions are
/// checked; a violation is reported as [`Error::GuaranteeViolated`].
pub fn np_gadget(g: &Graph, k: usize, eps: Rational) -> Result<Gadget> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if k < 3 || k > g.n() {
        return Err(Error::InvalidParameter(format!("k must satisfy 3 <= k <= n = {}, got {k}", g.n())));
    }
    if eps <= Rational::from_integer(0) || eps >= Rational::from_integer(1) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let kr = Rational::from_integer(k as i64);
    let high = (kr - 1) / eps;
    let low = (kr - 1 - kr.recip()) / eps;
    let d = g.average_degree()?;
    let identity: Vec<Option<usize>> = vec![Some(0); g.n()];
    let (graph, copy_of, case) = if d > low && d <= high {
        (g.clone(), identity, GadgetCase::Unchanged)
    } else if d > high {
        let (graph, labels, copies, isolated) = pad_down(g, &identity, k, high);
        (graph, labels, GadgetCase::Dense { copies, isolated })
    } else {
        let layers = (high - d).ceil().to_integer() as usize;
        let n = g.n();
        let total = 2 * layers;
        let mut adj: Vec<Vec<usize>> = Vec::with_capacity(total * n);
        for c in 0..total {
            for v in 0..n {
                let mut list: Vec<usize> = g.neighbors(v).iter().map(|&u| c * n + u).collect();
                let other = if c < layers { layers..total } else { 0..layers };
                list.extend(other.map(|c2| c2 * n + v));
                adj.push(list);
            }
        }
        let layered = Graph::from_adjacency(adj);
        let labels: Vec<Option<usize>> = (0..total * n).map(|x| Some(x / n)).collect();
        if layered.average_degree()? == high {
            (layered, labels, GadgetCase::Sparse { layers, padding: None })
        } else {
            let (graph, labels, copies, isolated) = pad_down(&layered, &labels, k, high);
            (graph, labels, GadgetCase::Sparse { layers, padding: Some((copies, isolated)) })
        }
    };
    let out_d = graph.average_degree()?;
    if !(out_d > low && out_d <= high) {
        return Err(Error::GuaranteeViolated(format!("gadget average degree {out_d} outside ({low}, {high}]")));
    }
    let omega = clique_number(g);
    let out_omega = clique_number(&graph);
    if omega != out_omega {
        return Err(Error::GuaranteeViolated(format!("gadget clique number {out_omega} differs from input {omega}")));
    }
    Ok(Gadget { graph, case, copy_of, low, high, clique_number: out_omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    /// Independent oracle: every vertex subset by bitmask, smallest size first.
    fn crux_by_masks(g: &Graph, alpha: Rational) -> usize {
        let n = g.n();
        let e = g.edge_count() as i64;
        let mut best = usize::MAX;
        for mask in 1u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size >= best {
                continue;
            }
            let inner = g.edges().filter(|&(u, v)| mask >> u & 1 == 1 && mask >> v & 1 == 1).count() as i64;
            // 2·inner/size ≥ α·2e/n
            if Rational::from_integer(inner * n as i64) >= alpha * e * size as i64 {
                best = size;
            }
        }
        best
    }

    #[test]
    fn exact_examples() {
        let k8 = crux_exact(&Graph::complete(8), r(1, 2)).unwrap();
        assert_eq!((k8.lower, k8.upper), (5, 5));
        assert_eq!(k8.witness.as_ref().unwrap().len(), 5);
        let q3 = crux_exact(&Graph::hypercube(3), r(1, 2)).unwrap();
        assert_eq!(q3.upper, 4);
        assert!(is_crux_witness(&Graph::hypercube(3), r(1, 2), q3.witness.as_ref().unwrap()).unwrap());
        for g in [Graph::petersen(), Graph::complete(20), Graph::gnp(15, 0.4, 2).unwrap()] {
            assert_eq!(crux_exact(&g, default_alpha()).unwrap().upper, 2);
        }
    }

    #[test]
    fn exact_rejects_large_and_edgeless() {
        assert!(matches!(crux_exact(&Graph::path(21), r(1, 2)), Err(Error::CruxTooLarge { .. })));
        assert!(matches!(crux_exact(&Graph::empty(3), r(1, 2)), Err(Error::NoEdges)));
        assert!(crux_exact(&Graph::complete(3), r(0, 1)).is_err());
        assert!(crux_exact(&Graph::complete(3), r(3, 2)).is_err());
    }

    #[test]
    fn bounds_on_complete_graphs_match_formula() {
        for n in 2..=20 {
            for alpha in [r(1, 100), r(1, 3), r(1, 2), r(3, 4), r(1, 1)] {
                let g = Graph::complete(n);
                let formula = (alpha * (n as i64 - 1)).ceil().to_integer() as usize + 1;
                let bounds = crux_bounds(&g, alpha).unwrap();
                assert_eq!(bounds.upper, formula, "K_{n} alpha {alpha}");
                assert_eq!(crux_exact(&g, alpha).unwrap().upper, formula);
            }
        }
    }

    #[test]
    fn bounds_on_union_of_bipartite_blocks() {
        let g = Graph::disjoint_union(&vec![Graph::complete_bipartite(6, 6); 5]);
        let b = crux_bounds(&g, r(1, 2)).unwrap();
        assert!(b.upper <= 6);
        let one = crux_exact(&Graph::complete_bipartite(6, 6), r(1, 2)).unwrap();
        assert_eq!(one.upper, 6);
        assert_eq!((b.lower, b.upper), (6, 6));
        assert!(is_crux_witness(&g, r(1, 2), b.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn at_most_agrees_with_exact() {
        let g = Graph::hypercube(3);
        assert!(crux_at_most(&g, r(1, 2), 3).unwrap().is_none());
        assert_eq!(crux_at_most(&g, r(1, 2), 4).unwrap().unwrap().len(), 4);
    }

    #[test]
    fn hypercube_lower_bound() {
        let q3 = Graph::hypercube(3);
        for alpha in [r(1, 4), r(1, 2), r(3, 4)] {
            let c = crux_exact(&q3, alpha).unwrap().upper as f64;
            assert!(c >= 2f64.powf(3.0 * (alpha.numer().to_owned() as f64 / *alpha.denom() as f64)) - 1e-12);
        }
    }

    #[test]
    fn profile_examples() {
        let exact = ProfileOptions { mode: CheckMode::Exact, ..Default::default() };
        let k10 = expansion_profile(&Graph::complete(10), 0.3, &exact).unwrap();
        assert_eq!(k10.value, r(7, 9));
        assert_eq!(k10.argmin.len(), 3);
        let two = Graph::disjoint_union(&[Graph::complete(4), Graph::complete(4)]);
        let p = expansion_profile(&two, 0.5, &exact).unwrap();
        assert_eq!(p.value, r(0, 1));
        assert_eq!(p.argmin.as_slice(), &[0, 1, 2, 3]);
        let c6 = expansion_profile(&Graph::cycle(6).unwrap(), 1.0 / 3.0, &exact).unwrap();
        assert_eq!(c6.value, r(1, 2));
        assert_eq!(c6.max_size, 2);
        assert!(matches!(expansion_profile(&Graph::complete(3), 0.2, &exact), Err(Error::EmptySizeRange)));
        assert!(matches!(
            expansion_profile(&Graph::complete(25), 0.2, &exact),
            Err(Error::ExactInfeasible { .. })
        ));
    }

    #[test]
    fn sampled_profile_bounds_exact_from_above() {
        let g = Graph::gnp(16, 0.3, 9).unwrap();
        let exact = expansion_profile(&g, 0.5, &ProfileOptions { mode: CheckMode::Exact, ..Default::default() }).unwrap();
        let sampled =
            expansion_profile(&g, 0.5, &ProfileOptions { mode: CheckMode::Sampled, ..Default::default() }).unwrap();
        assert_eq!(sampled.mode, ProfileMode::Sampled);
        assert!(sampled.value >= exact.value);
        assert!(sampled.argmin.len() <= 8);
        let b = crate::graph::edge_boundary(&g, &sampled.argmin).unwrap();
        assert_eq!(profile_value(&g, b, sampled.argmin.len()), sampled.value);
    }

    #[test]
    fn sse_examples() {
        let k8 = sse_crux_consistency(&Graph::complete(8), r(1, 2)).unwrap();
        assert_eq!((k8.crux, k8.delta), (5, r(4, 8)));
        assert!(k8.holds && k8.phi > r(1, 2));
        let q3 = sse_crux_consistency(&Graph::hypercube(3), r(1, 2)).unwrap();
        assert_eq!((q3.crux, q3.delta), (4, r(3, 8)));
        assert!(q3.holds);
        let k2 = sse_crux_consistency(&Graph::complete(2), r(1, 2)).unwrap();
        assert_eq!((k2.crux, k2.delta, k2.phi), (2, r(1, 2), r(1, 1)));
        assert!(k2.holds);
    }

    #[test]
    fn sse_can_fail_off_regular_graphs() {
        let g = Graph::disjoint_union(&[Graph::complete(2), Graph::empty(1)]);
        let report = sse_crux_consistency(&g, r(1, 2)).unwrap();
        assert!(!report.regular);
        assert_eq!(report.phi, r(0, 1));
        assert!(!report.holds);
    }

    #[test]
    fn clique_numbers() {
        assert_eq!(clique_number(&Graph::complete(7)), 7);
        assert_eq!(clique_number(&Graph::petersen()), 2);
        assert_eq!(clique_number(&Graph::empty(3)), 1);
        assert_eq!(clique_number(&Graph::empty(0)), 0);
        assert_eq!(clique_number(&Graph::complete(70)), 70);
        assert_eq!(clique_number(&Graph::complete_bipartite(40, 40)), 2);
    }

    #[test]
    fn gadget_on_cycle() {
        let g = Graph::cycle(5).unwrap();
        let gad = np_gadget(&g, 3, r(1, 2)).unwrap();
        assert_eq!(gad.case, GadgetCase::Sparse { layers: 2, padding: None });
        assert_eq!(gad.graph.n(), 20);
        assert_eq!(gad.graph.average_degree().unwrap(), r(4, 1));
        assert_eq!((gad.low, gad.high), (r(10, 3), r(4, 1)));
        assert_eq!(gad.clique_number, 2);
    }

    #[test]
    fn gadget_on_k5_with_small_eps() {
        let gad = np_gadget(&Graph::complete(5), 3, r(1, 100)).unwrap();
        assert_eq!(gad.case, GadgetCase::Sparse { layers: 196, padding: None });
        assert_eq!(gad.graph.average_degree().unwrap(), r(200, 1));
        assert_eq!(gad.clique_number, 5);
    }

    #[test]
    fn gadget_dense_case_and_errors() {
        let g = Graph::complete(12);
        let gad = np_gadget(&g, 3, r(1, 2)).unwrap();
        assert_eq!(gad.case, GadgetCase::Dense { copies: 3, isolated: 63 });
        assert!(gad.copy_of[36..].iter().all(Option::is_none));
        assert!(np_gadget(&Graph::complete(5), 2, r(1, 2)).is_err());
        assert!(np_gadget(&Graph::complete(5), 6, r(1, 2)).is_err());
        assert!(matches!(np_gadget(&Graph::empty(5), 3, r(1, 2)), Err(Error::NoEdges)));
    }

    #[test]
    fn gadget_unchanged_inside_interval() {
        // k = 3, eps = 1/2: interval (10/3, 4]; K_5 has d = 4.
        let gad = np_gadget(&Graph::complete(5), 3, r(1, 2)).unwrap();
        assert_eq!(gad.case, GadgetCase::Unchanged);
        assert_eq!(gad.graph, Graph::complete(5));
    }

    #[test]
    fn gadget_cross_copy_triangles_absent() {
        for seed in 0..5 {
            let g = Graph::gnp(7, 0.3, seed).unwrap();
            if g.edge_count() == 0 {
                continue;
            }
            let gad = np_gadget(&g, 3, r(1, 2)).unwrap();
            let h = &gad.graph;
            for (u, v) in h.edges() {
                for &w in h.neighbors(u) {
                    if w > v && h.has_edge(v, w) {
                        assert!(gad.copy_of[u] == gad.copy_of[v] && gad.copy_of[v] == gad.copy_of[w]);
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exact_matches_mask_oracle(n in 2usize..=10, p in 0.15f64..0.9, seed in any::<u64>(), a in 1i64..=4) {
            let g = Graph::gnp(n, p, seed).unwrap();
            prop_assume!(g.edge_count() > 0);
            let alpha = r(a, 4);
            let report = crux_exact(&g, alpha).unwrap();
            prop_assert_eq!(report.upper, crux_by_masks(&g, alpha));
            prop_assert!(is_crux_witness(&g, alpha, report.witness.as_ref().unwrap()).unwrap());
        }

        #[test]
        fn monotone_in_alpha(n in 2usize..=12, p in 0.2f64..0.9, seed in any::<u64>()) {
            let g = Graph::gnp(n, p, seed).unwrap();
            prop_assume!(g.edge_count() > 0);
            let alphas = [r(1, 100), r(1, 4), r(1, 2), r(3, 4), r(1, 1)];
            let values: Vec<usize> = alphas.iter().map(|&a| crux_exact(&g, a).unwrap().upper).collect();
            prop_assert!(values.windows(2).all(|w| w[0] <= w[1]), "{:?}", values);
        }

        #[test]
        fn bounds_bracket_exact(n in 2usize..=14, p in 0.15f64..0.9, seed in any::<u64>(), a in 1i64..=4) {
            let g = Graph::gnp(n, p, seed).unwrap();
            prop_assume!(g.edge_count() > 0);
            let alpha = r(a, 4);
            let exact = crux_exact(&g, alpha).unwrap().upper;
            for budget in [0, 50, DEFAULT_SCAN_BUDGET] {
                let b = crux_bounds_with_budget(&g, alpha, budget).unwrap();
                prop_assert!(b.lower <= exact && exact <= b.upper);
                prop_assert_eq!(b.witness.as_ref().unwrap().len(), b.upper);
                prop_assert!(is_crux_witness(&g, alpha, b.witness.as_ref().unwrap()).unwrap());
            }
            let full = crux_bounds(&g, alpha).unwrap();
            prop_assert!(full.is_tight());
        }

        #[test]
        fn exact_profile_matches_mask_enumeration(n in 2usize..=10, p in 0.2f64..0.9, seed in any::<u64>(), frac in 0.1f64..1.0) {
            let g = Graph::gnp(n, p, seed).unwrap();
            prop_assume!(g.edge_count() > 0);
            let cap = (frac * n as f64 + 1e-9).floor() as usize;
            prop_assume!(cap >= 1);
            let report = profile_exact(&g, cap);
            let mut best: Option<Rational> = None;
            for mask in 1u32..(1 << n) {
                let s = mask.count_ones() as usize;
                if s > cap { continue; }
                let b = g.edges().filter(|&(u, v)| (mask >> u & 1) != (mask >> v & 1)).count();
                let val = Rational::new((b * n) as i64, (2 * g.edge_count() * s) as i64);
                best = Some(best.map_or(val, |x| x.min(val)));
            }
            prop_assert_eq!(Some(report.value), best);
            let b = crate::graph::edge_boundary(&g, &report.argmin).unwrap();
            prop_assert_eq!(profile_value(&g, b, report.argmin.len()), report.value);
        }

        #[test]
        fn gadget_reduction_identity(n in 3usize..=8, p in 0.2f64..0.9, seed in any::<u64>(), k in 3usize..=5) {
            let g = Graph::gnp(n, p, seed).unwrap();
            prop_assume!(g.edge_count() > 0 && k <= n);
            let eps = r(1, 2);
            let gad = np_gadget(&g, k, eps).unwrap();
            let small = crux_at_most(&gad.graph, eps, k).unwrap().is_some();
            prop_assert_eq!(small, clique_number(&g) >= k);
        }
    }
}
