//! Sublinear expansion: the rate function ρ, robust-expander checking and
//! extraction, balls, short paths and the ball-growth selection lemmas.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{external_neighborhood, ordered, Graph, Path, Rational, Subgraph, VertexSet};
use crate::search::Bfs;

/// Parameters `(ε, k)` of a robust expander.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpanderParams {
    eps: f64,
    k: f64,
}

impl ExpanderParams {
    /// Validated parameters: `0 < ε < 1`, `k ≥ 1`, and `∫₁^∞ ρ(x)/x dx < 1/8`.
    pub fn new(eps: f64, k: f64) -> Result<Self> {
        let p = Self::without_integral_check(eps, k)?;
        let integral = p.rho_integral();
        if integral >= 0.125 {
            return Err(Error::InvalidParameter(format!(
                "eps = {eps} too large for k = {k}: integral of rho(x)/x is {integral:.6} >= 1/8"
            )));
        }
        Ok(p)
    }

    /// Parameters that skip the integral condition; used to probe the
    /// definition with larger rates than the extraction theory allows.
    pub fn without_integral_check(eps: f64, k: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
        }
        if !(k >= 1.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("k must be a finite value >= 1, got {k}")));
        }
        Ok(ExpanderParams { eps, k })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Closed form of `∫₁^∞ ρ(x)/x dx = ε / ln(15·max(1, k/5)/k)`.
    pub fn rho_integral(&self) -> f64 {
        let lower = (self.k / 5.0).max(1.0);
        self.eps / (15.0 * lower / self.k).ln()
    }

    /// `ρ(x) = 0` for `x < k/5`, otherwise `ε / ln²(15x/k)` (natural log).
    pub fn rho(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::InvalidParameter(format!("rho needs x > 0, got {x}")));
        }
        Ok(self.rho_at(x))
    }

    fn rho_at(&self, x: f64) -> f64 {
        if x < self.k / 5.0 {
            0.0
        } else {
            let l = (15.0 * x / self.k).ln();
            self.eps / (l * l)
        }
    }

    /// Set sizes `s` with `k/2 ≤ s ≤ n/2`, or `None` when that range is empty.
    pub fn size_range(&self, n: usize) -> Option<(usize, usize)> {
        let lo = ((self.k / 2.0).ceil() as usize).max(1);
        let hi = n / 2;
        (lo <= hi).then_some((lo, hi))
    }
}

/// `ρ(x, ε, k)`.
pub fn rho(x: f64, params: &ExpanderParams) -> Result<f64> {
    params.rho(x)
}

/// Upper bound `(2/ε)·ln³(15n/k)` on short-path lengths in an `(ε,k)`-robust expander.
pub fn short_path_length_bound(params: &ExpanderParams, n: usize) -> f64 {
    let l = (15.0 * n as f64 / params.k).ln();
    2.0 / params.eps * l * l * l
}

/// Upper bound `10·ρ⁻¹·ln(n/x)` on short paths under an expansion property.
pub fn general_short_path_length_bound(rho: f64, n: usize, x: f64) -> f64 {
    10.0 / rho * (n as f64 / x).ln()
}

pub(crate) fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Minimum of `|N_{G−F}(X)|` over edge sets `F` with `|F| ≤ budget`, with an
/// optimal `F`. Only edges between `X` and `N(X)` matter: cutting neighbour
/// `v` off costs its number of edges into `X`, and removing the cheapest
/// neighbours first is optimal because each removal gains exactly one.
pub fn min_neighborhood_under_deletion(
    g: &Graph,
    x: &VertexSet,
    budget: usize,
) -> Result<(usize, Vec<(usize, usize)>)> {
    let nbrs = external_neighborhood(g, x)?;
    let member = x.mask(g.n());
    let mut costs: Vec<(usize, usize)> = nbrs
        .iter()
        .map(|v| (g.neighbors(v).iter().filter(|&&u| member[u]).count(), v))
        .collect();
    costs.sort_unstable();
    let mut spent = 0;
    let mut deleted = Vec::new();
    let mut removed = 0;
    for (cost, v) in costs {
        if spent + cost > budget {
            break;
        }
        spent += cost;
        removed += 1;
        deleted.extend(g.neighbors(v).iter().filter(|&&u| member[u]).map(|&u| ordered(u, v)));
    }
    deleted.sort_unstable();
    Ok((nbrs.len() - removed, deleted))
}

/// How `check_robust_expander` explores sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Enumerate every set in the size range.
    Exact,
    /// Randomly grown connected sets plus uniform sets.
    Sampled,
    /// Exact when the graph is within the threshold, sampled otherwise.
    Auto,
}

/// Options for robust-expander checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub mode: CheckMode,
    /// Largest `n` for exact enumeration.
    pub exact_threshold: usize,
    /// Sets of each kind (connected, uniform) per size class; `None` means `10·n`.
    pub trials: Option<usize>,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { mode: CheckMode::Auto, exact_threshold: 14, trials: None, seed: 0 }
    }
}

impl CheckOptions {
    pub fn exact() -> Self {
        CheckOptions { mode: CheckMode::Exact, ..Default::default() }
    }

    pub fn sampled(seed: u64) -> Self {
        CheckOptions { mode: CheckMode::Sampled, seed, ..Default::default() }
    }
}

/// Outcome of a robust-expander check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    Refuted,
    SampledPass,
}

/// Which exploration produced a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessMode {
    Exact,
    Sampled,
}

/// Verdict of a robust-expander check; refutations carry `(X, F)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpanderWitness {
    pub verdict: Verdict,
    pub violating_set: Option<VertexSet>,
    pub deleted_edges: Option<Vec<(usize, usize)>>,
    pub mode: WitnessMode,
    /// Sets of each kind drawn per size class (sampled mode only).
    pub trials: Option<usize>,
}

impl ExpanderWitness {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }
}

fn budget_for(d: f64, params: &ExpanderParams, s: usize) -> (f64, usize) {
    let need = params.rho_at(s as f64) * s as f64;
    (need, (d * need).floor() as usize)
}

/// Independently re-checks a refutation: size range, `F ⊆ E(G)`,
/// `|F| ≤ d(G)ρ(|X|)|X|` and `|N_{G−F}(X)| < ρ(|X|)|X|`.
pub fn verify_refutation(g: &Graph, params: &ExpanderParams, witness: &ExpanderWitness) -> bool {
    let (Some(x), Some(f)) = (&witness.violating_set, &witness.deleted_edges) else {
        return false;
    };
    let Ok(d) = g.average_degree() else { return false };
    let s = x.len();
    if s == 0 || g.check_vertices(x.as_slice()).is_err() {
        return false;
    }
    if (s as f64) < params.k / 2.0 || 2 * s > g.n() {
        return false;
    }
    if f.iter().any(|&(u, v)| !g.has_edge(u, v)) {
        return false;
    }
    let rho = params.rho_at(s as f64);
    if f.len() as f64 > to_f64(d) * rho * s as f64 {
        return false;
    }
    let member = x.mask(g.n());
    let removed: std::collections::BTreeSet<(usize, usize)> = f.iter().map(|&(u, v)| ordered(u, v)).collect();
    let mut nbrs = vec![false; g.n()];
    for u in x.iter() {
        for &w in g.neighbors(u) {
            if !member[w] && !removed.contains(&ordered(u, w)) {
                nbrs[w] = true;
            }
        }
    }
    let size = nbrs.iter().filter(|&&b| b).count();
    (size as f64) < rho * s as f64
}

/// Checks the robust-expander property. Exact mode enumerates all sets with
/// `k/2 ≤ |X| ≤ n/2` by increasing size, lexicographically within a size, and
/// reports the first violation. Sampled mode can only refute or pass.
pub fn check_robust_expander(
    g: &Graph,
    params: &ExpanderParams,
    options: &CheckOptions,
) -> Result<ExpanderWitness> {
    let d = g.average_degree()?;
    let exact = match options.mode {
        CheckMode::Exact => true,
        CheckMode::Sampled => false,
        CheckMode::Auto => g.n() <= options.exact_threshold,
    };
    if exact && (g.n() > options.exact_threshold || g.n() > 63) {
        return Err(Error::ExactInfeasible { n: g.n(), threshold: options.exact_threshold.min(63) });
    }
    let trials = options.trials.unwrap_or(10 * g.n());
    let pass = |verdict, mode, trials| ExpanderWitness {
        verdict,
        violating_set: None,
        deleted_edges: None,
        mode,
        trials,
    };
    let Some((lo, hi)) = params.size_range(g.n()) else {
        return Ok(if exact {
            pass(Verdict::Certified, WitnessMode::Exact, None)
        } else {
            pass(Verdict::Certified, WitnessMode::Sampled, Some(trials))
        });
    };
    let d = to_f64(d);
    let found = if exact {
        exact_violation(g, params, d, lo, hi)
    } else {
        sampled_violation(g, params, d, lo, hi, trials, options.seed)
    };
    let mode = if exact { WitnessMode::Exact } else { WitnessMode::Sampled };
    let trials = (!exact).then_some(trials);
    Ok(match found {
        Some(x) => {
            let (_, budget) = budget_for(d, params, x.len());
            let (_, f) = min_neighborhood_under_deletion(g, &x, budget)?;
            ExpanderWitness {
                verdict: Verdict::Refuted,
                violating_set: Some(x),
                deleted_edges: Some(f),
                mode,
                trials,
            }
        }
        None if exact => pass(Verdict::Certified, mode, trials),
        None => pass(Verdict::SampledPass, mode, trials),
    })
}

/// Cheapest-first removal count given a histogram `hist[c]` of neighbour costs.
fn removable(hist: &[usize], budget: usize) -> usize {
    let mut rem = budget;
    let mut removed = 0;
    for (c, &count) in hist.iter().enumerate().skip(1) {
        if c > rem {
            break;
        }
        let take = count.min(rem / c);
        removed += take;
        rem -= take * c;
        if take < count {
            break;
        }
    }
    removed
}

fn exact_violation(g: &Graph, params: &ExpanderParams, d: f64, lo: usize, hi: usize) -> Option<VertexSet> {
    let n = g.n();
    let adj: Vec<u64> = (0..n).map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w)).collect();
    let mut hist = vec![0usize; g.max_degree() + 1];
    for s in lo..=hi {
        let (need, budget) = budget_for(d, params, s);
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            let x = idx.iter().fold(0u64, |m, &v| m | 1 << v);
            hist.iter_mut().for_each(|h| *h = 0);
            let mut nb = 0;
            for v in 0..n {
                if x >> v & 1 == 0 {
                    let c = (adj[v] & x).count_ones() as usize;
                    if c > 0 {
                        hist[c] += 1;
                        nb += 1;
                    }
                }
            }
            let size = nb - removable(&hist, budget);
            if (size as f64) < need {
                return Some(VertexSet::from_slice(&idx));
            }
            // Next combination in lexicographic order.
            let mut i = s;
            while i > 0 && idx[i - 1] == n - s + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..s {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    None
}

/// Incrementally grown vertex set tracking `N(X)` and the cost histogram.
struct Growth {
    in_x: Vec<bool>,
    mult: Vec<usize>,
    hist: Vec<usize>,
    nb: usize,
    members: Vec<usize>,
    frontier: Vec<usize>,
    pos: Vec<usize>,
}

impl Growth {
    fn new(n: usize, max_degree: usize) -> Self {
        Growth {
            in_x: vec![false; n],
            mult: vec![0; n],
            hist: vec![0; max_degree + 1],
            nb: 0,
            members: Vec::new(),
            frontier: Vec::new(),
            pos: vec![usize::MAX; n],
        }
    }

    fn reset(&mut self) {
        for &v in self.members.iter().chain(self.frontier.iter()) {
            self.in_x[v] = false;
            self.mult[v] = 0;
            self.pos[v] = usize::MAX;
        }
        for &v in &self.members {
            self.in_x[v] = false;
        }
        self.hist.iter_mut().for_each(|h| *h = 0);
        self.nb = 0;
        self.members.clear();
        self.frontier.clear();
    }

    fn frontier_remove(&mut self, v: usize) {
        let i = self.pos[v];
        let last = *self.frontier.last().expect("frontier non-empty");
        self.frontier.swap_remove(i);
        if last != v {
            self.pos[last] = i;
        }
        self.pos[v] = usize::MAX;
    }

    fn add(&mut self, g: &Graph, u: usize) {
        if self.mult[u] > 0 {
            self.hist[self.mult[u]] -= 1;
            self.nb -= 1;
            self.frontier_remove(u);
        }
        self.in_x[u] = true;
        self.members.push(u);
        for &w in g.neighbors(u) {
            if self.in_x[w] {
                continue;
            }
            if self.mult[w] > 0 {
                self.hist[self.mult[w]] -= 1;
            } else {
                self.nb += 1;
                self.pos[w] = self.frontier.len();
                self.frontier.push(w);
            }
            self.mult[w] += 1;
            self.hist[self.mult[w]] += 1;
        }
    }

    fn min_neighborhood(&self, budget: usize) -> usize {
        self.nb - removable(&self.hist, budget)
    }
}

fn sampled_violation(
    g: &Graph,
    params: &ExpanderParams,
    d: f64,
    lo: usize,
    hi: usize,
    trials: usize,
    seed: u64,
) -> Option<VertexSet> {
    let n = g.n();
    let bounds: Vec<(f64, usize)> = (0..=hi).map(|s| budget_for(d, params, s.max(1))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut growth = Growth::new(n, g.max_degree());
    let mut order: Vec<usize> = (0..n).collect();
    let check = |growth: &Growth| -> bool {
        let s = growth.members.len();
        s >= lo && (growth.min_neighborhood(bounds[s].1) as f64) < bounds[s].0
    };
    for _ in 0..trials {
        // Connected set grown by attaching a uniformly random frontier vertex.
        growth.reset();
        growth.add(g, rng.gen_range(0..n));
        loop {
            if check(&growth) {
                return Some(growth.members.iter().copied().collect());
            }
            if growth.members.len() >= hi || growth.frontier.is_empty() {
                break;
            }
            let v = growth.frontier[rng.gen_range(0..growth.frontier.len())];
            growth.add(g, v);
        }
        // Uniform sets: prefixes of a random permutation.
        growth.reset();
        order.shuffle(&mut rng);
        for &v in order.iter().take(hi) {
            growth.add(g, v);
            if check(&growth) {
                return Some(growth.members.iter().copied().collect());
            }
        }
    }
    None
}

/// Robust-expander subgraph found by [`extract_robust_expander`].
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    /// The subgraph `H` with its map back to the input graph.
    pub subgraph: Subgraph,
    /// Final check of `H`; may be `Refuted` when no descent keeps the degree
    /// guarantees, in which case `H` is the best subgraph found.
    pub witness: ExpanderWitness,
    pub iterations: usize,
}

/// Repeatedly deletes all vertices of degree `< d/2` (recomputing `d`) until
/// none remain; the average degree never decreases.
pub fn min_degree_peel(g: &Graph) -> Subgraph {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut n_alive = n;
    let mut e_alive = g.edge_count();
    loop {
        // deg < d/2 = e/n  ⇔  deg·n < e
        let drop: Vec<usize> = (0..n).filter(|&v| alive[v] && deg[v] * n_alive < e_alive).collect();
        if drop.is_empty() || drop.len() == n_alive {
            break;
        }
        // Vertices leave one at a time, so every edge is removed exactly once.
        for &v in &drop {
            alive[v] = false;
            for &w in g.neighbors(v) {
                if alive[w] {
                    deg[w] -= 1;
                    e_alive -= 1;
                }
            }
        }
        n_alive -= drop.len();
    }
    let keep: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    g.induced_subgraph(&keep)
}

/// Finds a subgraph `H` with `d(H) ≥ d(G)/2` and `δ(H) ≥ d(H)/2` (guaranteed
/// by min-degree peeling) that passes the robust-expander check. On a
/// refutation with witness `X`, descends into the denser of `H[X ∪ N(X)]` and
/// `H − X` (after peeling) provided it keeps `d ≥ d(G)/2`.
pub fn extract_robust_expander(
    g: &Graph,
    params: &ExpanderParams,
    options: &CheckOptions,
) -> Result<Extraction> {
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let d0 = g.average_degree()?;
    let floor = d0 / Rational::from_integer(2);
    let mut current = min_degree_peel(g);
    let cap = 10 * g.n();
    for iteration in 1..=cap {
        let witness = check_robust_expander(&current.graph, params, options)?;
        let Some(x) = witness.violating_set.clone() else {
            return Ok(Extraction { subgraph: current, witness, iterations: iteration });
        };
        let h = &current.graph;
        let nbrs = external_neighborhood(h, &x)?;
        let closure: Vec<usize> = x.union(&nbrs).into_vec();
        let member = x.mask(h.n());
        let rest: Vec<usize> = (0..h.n()).filter(|&v| !member[v]).collect();
        let mut best: Option<(Rational, Subgraph)> = None;
        for side in [closure, rest] {
            let sub = h.induced_subgraph(&side);
            if sub.graph.edge_count() == 0 {
                continue;
            }
            let peeled = sub.compose(&min_degree_peel(&sub.graph));
            let dd = peeled.graph.average_degree()?;
            if dd >= floor && best.as_ref().is_none_or(|(b, _)| dd > *b) {
                best = Some((dd, peeled));
            }
        }
        match best {
            Some((_, next)) => current = current.compose(&next),
            None => return Ok(Extraction { subgraph: current, witness, iterations: iteration }),
        }
    }
    Err(Error::IterationCap { cap, best: Box::new(current) })
}

/// `B^r_{G−avoid}(X)`: vertices within distance `r` of `X` in `G − avoid`.
pub fn ball(g: &Graph, x: &VertexSet, r: usize, avoid: &VertexSet) -> Result<VertexSet> {
    g.check_vertices(x.as_slice())?;
    g.check_vertices(avoid.as_slice())?;
    if x.intersects(avoid) {
        return Err(Error::Precondition("ball source set meets the avoided set".into()));
    }
    let blocked = avoid.mask(g.n());
    let mut bfs = Bfs::new(g.n());
    Ok(bfs.ball(g, x.as_slice(), r, |v| blocked[v]).into_iter().collect())
}

/// Shortest `X → Y` path in `G − W` (smallest-id parent first), or `None`.
pub fn short_path(g: &Graph, x: &VertexSet, y: &VertexSet, w: &VertexSet) -> Result<Option<Path>> {
    for s in [x, y, w] {
        g.check_vertices(s.as_slice())?;
    }
    if x.is_empty() || y.is_empty() {
        return Err(Error::Precondition("short_path needs non-empty endpoint sets".into()));
    }
    if w.intersects(x) || w.intersects(y) {
        return Err(Error::Precondition("avoided set meets an endpoint set".into()));
    }
    let blocked = w.mask(g.n());
    let target = y.mask(g.n());
    let mut bfs = Bfs::new(g.n());
    Ok(bfs.path(g, x.as_slice(), |v| target[v], |v| blocked[v], usize::MAX).map(Path::new))
}

/// `(a, b, ρ)`: every set with size in `[a, b]` has `|N(X)| ≥ ρ|X|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRange {
    pub a: usize,
    pub b: usize,
    pub rho: f64,
}

impl ExpansionRange {
    pub fn new(a: usize, b: usize, rho: f64) -> Result<Self> {
        if a < 1 || a > b {
            return Err(Error::InvalidParameter(format!("need 1 <= a <= b, got a = {a}, b = {b}")));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::InvalidParameter(format!("rho must lie in (0, 1], got {rho}")));
        }
        Ok(ExpansionRange { a, b, rho })
    }

    /// Exhaustively decides the property; `None` when `n` exceeds `threshold`.
    pub fn holds_exact(&self, g: &Graph, threshold: usize) -> Option<bool> {
        let n = g.n();
        if n > threshold.min(30) {
            return None;
        }
        let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w)).collect();
        let hi = self.b.min(n);
        for x in 1u32..(1u32 << n) {
            let s = x.count_ones() as usize;
            if s < self.a || s > hi {
                continue;
            }
            let nb = (0..n).filter(|&v| x >> v & 1 == 1).fold(0u32, |m, v| m | adj[v]) & !x;
            if (nb.count_ones() as f64) < self.rho * s as f64 {
                return Some(false);
            }
        }
        Some(true)
    }
}

/// A hypothesis of the ball-growth lemmas that failed on the given input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "hypothesis", rename_all = "snake_case")]
pub enum Hypothesis {
    /// Need `q > 2kr`.
    TooFewSets { q: usize, required_more_than: usize },
    /// Need `a ≤ kx < b/20` (or `a ≤ qx ≤ b/4` for the single-set form).
    SizeWindow { value: f64, a: usize, b: usize },
    /// Need `k ≥ (1+ρ/4)^r`.
    RadiusTooLarge { k: usize, growth: f64 },
    /// Need `|W|` below the stated limit.
    AvoidTooLarge { size: usize, limit: f64 },
    /// A1: `|A_i| ≥ x`.
    SetTooSmall { index: usize, size: usize, x: usize },
    /// A1: `|W_i| ≤ ρx/4`.
    LocalAvoidTooLarge { index: usize, size: usize, limit: f64 },
    /// A2: `A_i` disjoint from `W` and `W_i`.
    SetMeetsAvoid { index: usize },
    /// A3: unions of `k..3k` sets have size at least `|I|·x`.
    UnionTooSmall { indices: Vec<usize> },
    /// Single-set form: the `A_i` must be pairwise disjoint.
    SetsOverlap { first: usize, second: usize },
    /// Corollary form: `q > 20k·ln k/ρ`.
    CorollaryTooFewSets { q: usize, required_more_than: f64 },
    /// Corollary form: `r ≥ 10·ln k/ρ`.
    CorollaryRadiusTooSmall { r: usize, required: f64 },
    /// Single-set form: `|W_i ∩ N_{G−W}(A_i^{ℓ−1})| ≤ ℓxρ²/40` for every layer `ℓ`.
    ThickLayer { index: usize, layer: usize, size: usize, limit: f64 },
    /// The graph lacks the `(a, b, ρ)`-expansion property.
    ExpansionFails,
}

/// Which hypotheses failed and which could not be checked at this size.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub failed: Vec<Hypothesis>,
    pub unchecked: Vec<String>,
}

impl HypothesisReport {
    /// Every hypothesis was checked and holds.
    pub fn all_hold(&self) -> bool {
        self.failed.is_empty() && self.unchecked.is_empty()
    }
}

/// Input family `A_1..A_q` with global avoided set `W` and per-set `W_i`.
#[derive(Clone, Copy, Debug)]
pub struct Family<'a> {
    pub sets: &'a [VertexSet],
    pub avoid: &'a VertexSet,
    pub avoid_sets: &'a [VertexSet],
}

impl Family<'_> {
    fn validate(&self, g: &Graph) -> Result<()> {
        if self.sets.len() != self.avoid_sets.len() {
            return Err(Error::InvalidParameter(format!(
                "{} sets but {} avoid sets",
                self.sets.len(),
                self.avoid_sets.len()
            )));
        }
        g.check_vertices(self.avoid.as_slice())?;
        for s in self.sets.iter().chain(self.avoid_sets) {
            g.check_vertices(s.as_slice())?;
        }
        Ok(())
    }

    /// `|B^r_{G−(W∪W_i)}(A_i \ (W∪W_i))|`.
    fn ball_size(&self, g: &Graph, bfs: &mut Bfs, i: usize, r: usize) -> usize {
        let (w, wi) = (self.avoid, &self.avoid_sets[i]);
        let blocked = |v: usize| w.contains(v) || wi.contains(v);
        let src: Vec<usize> = self.sets[i].iter().filter(|&v| !blocked(v)).collect();
        bfs.ball(g, &src, r, blocked).len()
    }

    fn check_local(&self, x: usize, rho: f64, report: &mut HypothesisReport) {
        for (i, (a, wi)) in self.sets.iter().zip(self.avoid_sets).enumerate() {
            if a.len() < x {
                report.failed.push(Hypothesis::SetTooSmall { index: i, size: a.len(), x });
            }
            let limit = rho * x as f64 / 4.0;
            if wi.len() as f64 > limit {
                report.failed.push(Hypothesis::LocalAvoidTooLarge { index: i, size: wi.len(), limit });
            }
            if a.intersects(wi) || a.intersects(self.avoid) {
                report.failed.push(Hypothesis::SetMeetsAvoid { index: i });
            }
        }
    }

    fn pairwise_disjoint(&self) -> Option<(usize, usize)> {
        let mut owner = std::collections::HashMap::new();
        for (i, a) in self.sets.iter().enumerate() {
            for v in a.iter() {
                if let Some(&j) = owner.get(&v) {
                    return Some((j, i));
                }
                owner.insert(v, i);
            }
        }
        None
    }

    fn check_unions(&self, k: usize, x: usize, report: &mut HypothesisReport) {
        let q = self.sets.len();
        if self.pairwise_disjoint().is_none() && self.sets.iter().all(|a| a.len() >= x) {
            return;
        }
        if q > 16 {
            report.unchecked.push("union lower bounds (A3): family too large to enumerate".into());
            return;
        }
        for mask in 1u32..(1u32 << q) {
            let size = mask.count_ones() as usize;
            if size < k || size > 3 * k {
                continue;
            }
            let idx: Vec<usize> = (0..q).filter(|&i| mask >> i & 1 == 1).collect();
            let union: VertexSet = idx.iter().flat_map(|&i| self.sets[i].iter()).collect();
            if union.len() < size * x {
                report.failed.push(Hypothesis::UnionTooSmall { indices: idx });
                return;
            }
        }
    }
}

fn check_expansion(g: &Graph, range: &ExpansionRange, report: &mut HypothesisReport) {
    match range.holds_exact(g, 20) {
        Some(true) => {}
        Some(false) => report.failed.push(Hypothesis::ExpansionFails),
        None => report.unchecked.push("expansion property: graph too large to enumerate".into()),
    }
}

/// Indices whose balls grew past the threshold, with the hypothesis report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySelection {
    pub indices: Vec<usize>,
    pub ball_sizes: Vec<usize>,
    pub threshold: f64,
    pub hypotheses: HypothesisReport,
    /// `q − 2kr` when every hypothesis was verified.
    pub guaranteed: Option<usize>,
}

/// Returns every `j` with `|B^r_{G−(W∪W_j)}(A_j)| ≥ (1+ρ/4)^r·x`. Hypotheses
/// are checked and reported; when all hold, fewer than `q − 2kr` indices is
/// reported as a guarantee violation.
pub fn select_expanding_family(
    g: &Graph,
    range: &ExpansionRange,
    family: Family<'_>,
    k: usize,
    r: usize,
    x: usize,
) -> Result<FamilySelection> {
    family.validate(g)?;
    let q = family.sets.len();
    let rho = range.rho;
    let mut report = HypothesisReport::default();
    if q <= 2 * k * r {
        report.failed.push(Hypothesis::TooFewSets { q, required_more_than: 2 * k * r });
    }
    let kx = (k * x) as f64;
    if !(range.a as f64 <= kx && kx < range.b as f64 / 20.0) {
        report.failed.push(Hypothesis::SizeWindow { value: kx, a: range.a, b: range.b });
    }
    let growth = (1.0 + rho / 4.0).powi(r as i32);
    if (k as f64) < growth {
        report.failed.push(Hypothesis::RadiusTooLarge { k, growth });
    }
    let limit = rho * kx / 2.0;
    if family.avoid.len() as f64 > limit {
        report.failed.push(Hypothesis::AvoidTooLarge { size: family.avoid.len(), limit });
    }
    family.check_local(x, rho, &mut report);
    family.check_unions(k, x, &mut report);
    check_expansion(g, range, &mut report);

    let threshold = growth * x as f64;
    let mut bfs = Bfs::new(g.n());
    let ball_sizes: Vec<usize> = (0..q).map(|i| family.ball_size(g, &mut bfs, i, r)).collect();
    let indices: Vec<usize> = (0..q).filter(|&i| ball_sizes[i] as f64 >= threshold).collect();
    let guaranteed = report.all_hold().then(|| q.saturating_sub(2 * k * r));
    if let Some(min) = guaranteed {
        if indices.len() < min {
            return Err(Error::GuaranteeViolated(format!(
                "only {} of {q} sets expanded; at least {min} expected",
                indices.len()
            )));
        }
    }
    Ok(FamilySelection { indices, ball_sizes, threshold, hypotheses: report, guaranteed })
}

/// Which lemma's hypotheses `find_large_ball_index` checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallLemma {
    /// Many sets, strong expansion: some ball reaches `kx/2`.
    Corollary { k: usize, x: usize },
    /// Disjoint sets, thin avoided layers: some ball reaches `qx`.
    SingleLargeSet { x: usize },
}

/// First index whose ball reached the threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LargeBall {
    pub index: Option<usize>,
    pub ball_size: Option<usize>,
    pub hypotheses: HypothesisReport,
}

/// First `i` (in index order) with `|B^r_{G−(W∪W_i)}(A_i)| ≥ threshold`.
pub fn find_large_ball_index(
    g: &Graph,
    range: &ExpansionRange,
    family: Family<'_>,
    threshold: f64,
    r: usize,
    lemma: BallLemma,
) -> Result<LargeBall> {
    family.validate(g)?;
    let q = family.sets.len();
    let rho = range.rho;
    let mut report = HypothesisReport::default();
    match lemma {
        BallLemma::Corollary { k, x } => {
            let lnk = (k.max(1) as f64).ln();
            let need_q = 20.0 * k as f64 * lnk / rho;
            if q as f64 <= need_q {
                report.failed.push(Hypothesis::CorollaryTooFewSets { q, required_more_than: need_q });
            }
            let need_r = 10.0 * lnk / rho;
            if (r as f64) < need_r {
                report.failed.push(Hypothesis::CorollaryRadiusTooSmall { r, required: need_r });
            }
            let kx = (k * x) as f64;
            if !(range.a as f64 <= kx && kx < range.b as f64 / 20.0) {
                report.failed.push(Hypothesis::SizeWindow { value: kx, a: range.a, b: range.b });
            }
            let limit = rho * kx / 2.0;
            if family.avoid.len() as f64 > limit {
                report.failed.push(Hypothesis::AvoidTooLarge { size: family.avoid.len(), limit });
            }
            family.check_local(x, rho, &mut report);
            family.check_unions(k, x, &mut report);
        }
        BallLemma::SingleLargeSet { x } => {
            if let Some((first, second)) = family.pairwise_disjoint() {
                report.failed.push(Hypothesis::SetsOverlap { first, second });
            }
            let qx = (q * x) as f64;
            if !(range.a as f64 <= qx && qx <= range.b as f64 / 4.0) {
                report.failed.push(Hypothesis::SizeWindow { value: qx, a: range.a, b: range.b });
            }
            let limit = rho * qx / 2.0;
            if family.avoid.len() as f64 > limit {
                report.failed.push(Hypothesis::AvoidTooLarge { size: family.avoid.len(), limit });
            }
            for (i, a) in family.sets.iter().enumerate() {
                if a.len() < x {
                    report.failed.push(Hypothesis::SetTooSmall { index: i, size: a.len(), x });
                }
                if a.intersects(&family.avoid_sets[i]) || a.intersects(family.avoid) {
                    report.failed.push(Hypothesis::SetMeetsAvoid { index: i });
                }
            }
            check_thin_layers(g, family, r, x, rho, &mut report);
        }
    }
    check_expansion(g, range, &mut report);
    let mut bfs = Bfs::new(g.n());
    for i in 0..q {
        let size = family.ball_size(g, &mut bfs, i, r);
        if size as f64 >= threshold {
            return Ok(LargeBall { index: Some(i), ball_size: Some(size), hypotheses: report });
        }
    }
    Ok(LargeBall { index: None, ball_size: None, hypotheses: report })
}

fn check_thin_layers(g: &Graph, family: Family<'_>, r: usize, x: usize, rho: f64, report: &mut HypothesisReport) {
    let w = family.avoid;
    let mut bfs = Bfs::new(g.n());
    for (i, (a, wi)) in family.sets.iter().zip(family.avoid_sets).enumerate() {
        let src: Vec<usize> = a.iter().filter(|&v| !w.contains(v) && !wi.contains(v)).collect();
        for layer in 1..=r {
            let inner: VertexSet =
                bfs.ball(g, &src, layer - 1, |v| w.contains(v) || wi.contains(v)).into_iter().collect();
            let member = inner.mask(g.n());
            let mut hit = std::collections::BTreeSet::new();
            for u in inner.iter() {
                for &v in g.neighbors(u) {
                    if !member[v] && !w.contains(v) && wi.contains(v) {
                        hit.insert(v);
                    }
                }
            }
            let limit = layer as f64 * x as f64 * rho * rho / 40.0;
            if hit.len() as f64 > limit {
                report.failed.push(Hypothesis::ThickLayer { index: i, layer, size: hit.len(), limit });
                break;
            }
        }
    }
}

/// Average degree after deleting `W`, next to the lower bound `ρ(n)·d/20`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeletedDegree {
    pub actual: Rational,
    pub bound: f64,
    /// Whether `|W| ≤ ρ(n)·n/20`.
    pub precondition_holds: bool,
}

/// Compares `d(G − W)` with `ρ(n, ε, k)·d(G)/20`.
pub fn deleted_avg_degree_bound(g: &Graph, params: &ExpanderParams, w: &VertexSet) -> Result<DeletedDegree> {
    g.check_vertices(w.as_slice())?;
    let n = g.n();
    let d = g.average_degree()?;
    let rho_n = params.rho(n as f64)?;
    let rest = g.without_vertices(w.as_slice());
    let actual = rest.graph.average_degree()?;
    Ok(DeletedDegree {
        actual,
        bound: rho_n * to_f64(d) / 20.0,
        precondition_holds: w.len() as f64 <= rho_n * n as f64 / 20.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(ids: &[usize]) -> VertexSet {
        VertexSet::from_slice(ids)
    }

    fn params(eps: f64, k: f64) -> ExpanderParams {
        ExpanderParams::new(eps, k).unwrap()
    }

    /// Midpoint rule after mapping the support of ρ onto `[0, 1)` via
    /// `x = exp(u0 + s/(1−s))`. ρ is evaluated in log space because `x`
    /// overflows near `s = 1`; the log-space form is checked against `rho`.
    fn integral_by_quadrature(p: &ExpanderParams) -> f64 {
        let rho_log = |u: f64| {
            let l = 15f64.ln() + u - p.k().ln();
            p.eps() / (l * l)
        };
        for u in [0.0f64, 1.0, 5.0, 50.0] {
            if u.exp() >= p.k() / 5.0 {
                assert!((rho_log(u) - p.rho(u.exp()).unwrap()).abs() < 1e-15);
            }
        }
        let u0 = (p.k() / 5.0).max(1.0).ln();
        let steps = 200_000;
        let h = 1.0 / steps as f64;
        (0..steps)
            .map(|i| {
                let s = (i as f64 + 0.5) * h;
                let u = u0 + s / (1.0 - s);
                rho_log(u) / ((1.0 - s) * (1.0 - s)) * h
            })
            .sum()
    }

    #[test]
    fn rho_examples() {
        let p = params(0.01, 100.0);
        assert_eq!(p.rho(10.0).unwrap(), 0.0);
        let expected = 0.01 / 15f64.ln().powi(2);
        assert!((p.rho(100.0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 1.364e-3).abs() < 1e-6);
        assert!(p.rho(200.0).unwrap() < p.rho(100.0).unwrap());
        assert!(p.rho(0.0).is_err());
        assert!(p.rho(-1.0).is_err());
    }

    #[test]
    fn integral_condition_matches_quadrature() {
        for (eps, k) in [(0.01, 1.0), (0.05, 3.0), (0.1, 10.0), (0.01, 1000.0)] {
            let p = params(eps, k);
            let numeric = integral_by_quadrature(&p);
            assert!((numeric - p.rho_integral()).abs() < 1e-6 * p.rho_integral(), "{eps} {k}: {numeric}");
        }
        assert!(ExpanderParams::new(0.4, 1.0).is_err());
        assert!(ExpanderParams::new(0.5, 5.0).is_err());
        assert!(ExpanderParams::new(0.0, 5.0).is_err());
        assert!(ExpanderParams::new(0.01, 0.5).is_err());
        assert!(ExpanderParams::without_integral_check(0.9, 4.0).is_ok());
    }

    #[test]
    fn min_neighborhood_examples() {
        let star = Graph::complete_bipartite(1, 3);
        assert_eq!(min_neighborhood_under_deletion(&star, &vs(&[0]), 1).unwrap().0, 2);
        let (size, f) = min_neighborhood_under_deletion(&Graph::complete(4), &vs(&[0]), 2).unwrap();
        assert_eq!((size, f), (1, vec![(0, 1), (0, 2)]));
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(min_neighborhood_under_deletion(&c5, &vs(&[0, 1]), 1).unwrap().0, 1);
    }

    #[test]
    fn check_examples() {
        let k8 = Graph::complete(8);
        let w = check_robust_expander(&k8, &params(0.01, 2.0), &CheckOptions::exact()).unwrap();
        assert_eq!(w.verdict, Verdict::Certified);

        let two = Graph::disjoint_union(&[Graph::complete(4), Graph::complete(4)]);
        let p = params(0.01, 2.0);
        let w = check_robust_expander(&two, &p, &CheckOptions::exact()).unwrap();
        assert_eq!(w.verdict, Verdict::Refuted);
        assert_eq!(w.violating_set, Some(vs(&[0, 1, 2, 3])));
        assert!(verify_refutation(&two, &p, &w));

        let w = check_robust_expander(&two, &params(0.01, 20.0), &CheckOptions::sampled(1)).unwrap();
        assert_eq!(w.verdict, Verdict::Certified);

        let big = Graph::complete(20);
        assert!(matches!(
            check_robust_expander(&big, &p, &CheckOptions::exact()),
            Err(Error::ExactInfeasible { .. })
        ));
    }

    #[test]
    fn sampled_check_finds_small_components() {
        let g = Graph::disjoint_union(&[Graph::complete(30), Graph::complete(5)]);
        let p = params(0.01, 2.0);
        let w = check_robust_expander(&g, &p, &CheckOptions::sampled(3)).unwrap();
        assert_eq!(w.verdict, Verdict::Refuted);
        assert!(verify_refutation(&g, &p, &w));
        let w = check_robust_expander(&Graph::complete(30), &p, &CheckOptions::sampled(3)).unwrap();
        assert_eq!(w.verdict, Verdict::SampledPass);
        assert_eq!(w.trials, Some(300));
        let json = w.to_json();
        assert!(json.contains("\"verdict\":\"sampled-pass\""), "{json}");
    }

    #[test]
    fn extraction_examples() {
        let p = params(0.01, 2.0);
        let k10 = Graph::complete(10);
        let h = extract_robust_expander(&k10, &p, &CheckOptions::default()).unwrap();
        assert_eq!(h.subgraph.to_parent, (0..10).collect::<Vec<_>>());

        let g = Graph::disjoint_union(&[Graph::complete(6), Graph::cycle(4).unwrap()]);
        let h = extract_robust_expander(&g, &p, &CheckOptions::default()).unwrap();
        assert!(h.subgraph.to_parent.iter().all(|&v| v < 6));
        assert_eq!(h.witness.verdict, Verdict::Certified);

        let pet = Graph::petersen();
        let h = extract_robust_expander(&pet, &p, &CheckOptions::default()).unwrap();
        assert_eq!(h.subgraph.graph, pet);
        assert!(extract_robust_expander(&Graph::empty(3), &p, &CheckOptions::default()).is_err());
    }

    #[test]
    fn peel_enforces_min_degree() {
        // K5 with a pendant path attached.
        let mut edges: Vec<(usize, usize)> = Graph::complete(5).edges().collect();
        edges.extend([(4, 5), (5, 6), (6, 7)]);
        let g = Graph::from_edges(8, edges).unwrap();
        let h = min_degree_peel(&g);
        assert_eq!(h.to_parent, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn ball_examples() {
        let q3 = Graph::hypercube(3);
        assert_eq!(ball(&q3, &vs(&[0]), 1, &vs(&[])).unwrap().len(), 4);
        assert_eq!(ball(&q3, &vs(&[0]), 3, &vs(&[])).unwrap().len(), 8);
        assert_eq!(ball(&q3, &vs(&[0]), 0, &vs(&[])).unwrap(), vs(&[0]));
        let c6 = Graph::cycle(6).unwrap();
        assert_eq!(ball(&c6, &vs(&[0]), 2, &vs(&[1])).unwrap(), vs(&[0, 4, 5]));
        assert!(ball(&c6, &vs(&[0]), 2, &vs(&[0])).is_err());
    }

    #[test]
    fn short_path_examples() {
        let k6 = Graph::complete(6);
        let p = short_path(&k6, &vs(&[0]), &vs(&[5]), &vs(&[])).unwrap().unwrap();
        assert_eq!(p.len(), 1);
        let c6 = Graph::cycle(6).unwrap();
        let p = short_path(&c6, &vs(&[0]), &vs(&[3]), &vs(&[1, 2])).unwrap().unwrap();
        assert_eq!(p.vertices(), &[0, 5, 4, 3]);
        let two = Graph::disjoint_union(&[Graph::complete(3), Graph::complete(3)]);
        assert_eq!(short_path(&two, &vs(&[0]), &vs(&[4]), &vs(&[])).unwrap(), None);
        assert!(short_path(&two, &vs(&[0]), &vs(&[4]), &vs(&[0])).is_err());
        assert!(short_path(&two, &vs(&[]), &vs(&[4]), &vs(&[])).is_err());
    }

    #[test]
    fn family_selection_examples() {
        let k20 = Graph::complete(20);
        let range = ExpansionRange::new(1, 20, 0.5).unwrap();
        let sets: Vec<VertexSet> = (0..4).map(|i| vs(&[i])).collect();
        let empties = vec![VertexSet::new(); 4];
        let w = VertexSet::new();
        let fam = Family { sets: &sets, avoid: &w, avoid_sets: &empties };
        let sel = select_expanding_family(&k20, &range, fam, 1, 1, 1).unwrap();
        assert_eq!(sel.indices, vec![0, 1, 2, 3]);

        let r0 = select_expanding_family(&k20, &range, fam, 1, 0, 1).unwrap();
        assert_eq!(r0.indices, vec![0, 1, 2, 3]);
        let r0 = select_expanding_family(&k20, &range, fam, 1, 0, 2).unwrap();
        assert!(r0.indices.is_empty());
        assert!(r0.hypotheses.failed.iter().any(|h| matches!(h, Hypothesis::SetTooSmall { .. })));

        let g = Graph::disjoint_union(&[Graph::complete(2), Graph::complete(10)]);
        let sets = vec![vs(&[0]), vs(&[2]), vs(&[3])];
        let empties = vec![VertexSet::new(); 3];
        let fam = Family { sets: &sets, avoid: &w, avoid_sets: &empties };
        let range = ExpansionRange::new(1, 12, 0.5).unwrap();
        let sel = select_expanding_family(&g, &range, fam, 1, 2, 3).unwrap();
        assert!(!sel.indices.contains(&0));
        assert!(sel.hypotheses.failed.contains(&Hypothesis::ExpansionFails));
    }

    #[test]
    fn large_ball_examples() {
        let k30 = Graph::complete(30);
        let range = ExpansionRange::new(1, 30, 0.5).unwrap();
        let sets = vec![vs(&[3])];
        let empties = vec![VertexSet::new()];
        let w = VertexSet::new();
        let fam = Family { sets: &sets, avoid: &w, avoid_sets: &empties };
        let lemma = BallLemma::SingleLargeSet { x: 1 };
        assert_eq!(find_large_ball_index(&k30, &range, fam, 20.0, 2, lemma).unwrap().index, Some(0));
        assert_eq!(find_large_ball_index(&k30, &range, fam, 31.0, 2, lemma).unwrap().index, None);

        let p50 = Graph::path(50);
        let sets: Vec<VertexSet> = (1..10).map(|i| vs(&[5 * i])).collect();
        let empties = vec![VertexSet::new(); sets.len()];
        let fam = Family { sets: &sets, avoid: &w, avoid_sets: &empties };
        let range = ExpansionRange::new(1, 50, 0.1).unwrap();
        for i in 0..sets.len() {
            let one = Family { sets: &sets[i..=i], avoid: &w, avoid_sets: &empties[i..=i] };
            let hit = find_large_ball_index(&p50, &range, one, 3.0, 1, lemma).unwrap();
            assert_eq!(hit.ball_size, Some(3));
        }
        let first = find_large_ball_index(&p50, &range, fam, 3.0, 1, lemma).unwrap();
        assert_eq!(first.index, Some(0));
    }

    #[test]
    fn deleted_degree_examples() {
        let p = params(0.01, 2.0);
        let k20 = Graph::complete(20);
        let none = deleted_avg_degree_bound(&k20, &p, &VertexSet::new()).unwrap();
        assert_eq!(none.actual, Rational::from_integer(19));
        assert!(none.bound <= 19.0);
        let one = deleted_avg_degree_bound(&k20, &p, &vs(&[0])).unwrap();
        assert_eq!(one.actual, Rational::from_integer(18));
        let expected = p.rho(20.0).unwrap() * 19.0 / 20.0;
        assert!((one.bound - expected).abs() < 1e-15);
        assert!(!one.precondition_holds);
    }
}
