//! End-to-end search for a large clique subdivision.
//!
//! Each connected component is treated separately. Three nested robust
//! expanders are extracted (at levels `εd`, `d²` and a hundredth of the crux
//! size); inside them the pipeline tries the unit construction, the web
//! construction (uniform or skewed star harvest), and the greedy builder.
//! Every candidate is checked with [`verify_subdivision`] and the largest
//! one, lifted to the input graph, is returned with a JSON-lines trace.

use serde::{Deserialize, Serialize};

use crate::crux::{crux_bounds_with_budget, default_alpha};
use crate::error::{Error, Result};
use crate::expansion::{extract_robust_expander, CheckMode, CheckOptions, ExpanderParams, Verdict};
use crate::graph::{Graph, Path, Rational, Subgraph, VertexSet};
use crate::ratio::format_rational;
use crate::subdivision::{greedy_max_budgeted, verify_subdivision, GreedyBudget, SubdivisionCertificate};
use crate::webs::{
    build_unit, build_web, connect_units, connect_webs_traced, find_disjoint_stars, find_split_stars, ConnectionStats,
    Unit, UnitParams, Web, WebParams,
};

/// One schedule entry: `max(min, ⌈multiplier · shape⌉)`, capped at `max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Knob {
    pub multiplier: f64,
    pub min: usize,
    pub max: Option<usize>,
}

impl Knob {
    pub const fn raw(multiplier: f64, min: usize, max: Option<usize>) -> Self {
        Knob { multiplier, min, max }
    }

    fn apply(&self, shape: f64) -> usize {
        let scaled = (self.multiplier * shape).ceil();
        let v = if scaled.is_finite() && scaled < 1e15 { scaled.max(0.0) as usize } else { usize::MAX / 4 };
        let v = v.max(self.min);
        self.max.map_or(v, |m| v.min(m.max(self.min)))
    }
}

/// Schedule knobs for the three unit sizes `(branches, leaves, length)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitKnobs {
    pub branches: Knob,
    pub leaves: Knob,
    pub length: Knob,
}

/// Schedule knobs for webs: unit knobs plus `(branches, length)` of the web.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WebKnobs {
    pub unit: UnitKnobs,
    pub branches: Knob,
    pub length: Knob,
}

/// Configuration of [`pipeline_find_subdivision`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Expansion parameter of all extracted expanders.
    pub eps: f64,
    /// Crux fraction used to size the innermost expander.
    #[serde(with = "crate::ratio::as_string")]
    pub alpha: Rational,
    /// Largest graph whose expander checks are exhaustive.
    pub expander_exact_threshold: usize,
    /// Sampled sets per size class in expander checks (`None`: `10·n`).
    pub expander_trials: Option<usize>,
    /// Search-node budget for the crux bounds.
    pub crux_budget: u64,
    pub greedy: GreedyBudget,
    /// Units in the `εd` expander.
    pub dense: UnitKnobs,
    /// Webs in the `d²` expander.
    pub degree_webs: WebKnobs,
    /// Webs in the crux-level expander.
    pub crux_webs: WebKnobs,
    /// The skewed branch is taken when removing at most `n / skew_fraction`
    /// top-degree vertices drops the average degree below `d / skew_divisor`.
    pub skew_fraction: f64,
    pub skew_divisor: f64,
    /// Stop once a certificate of this size is found.
    pub target_t: Option<usize>,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl PipelineConfig {
    /// All schedule multipliers at 1 with no caps: the asymptotic shapes
    /// verbatim, which at laptop scale make every structured stage skip.
    pub fn asymptotic() -> Self {
        let one = Knob::raw(1.0, 1, None);
        let unit = UnitKnobs { branches: one, leaves: one, length: Knob::raw(1.0, 2, None) };
        let web = WebKnobs { unit, branches: one, length: one };
        PipelineConfig {
            eps: 0.01,
            alpha: default_alpha(),
            expander_exact_threshold: 14,
            expander_trials: None,
            crux_budget: crate::crux::DEFAULT_SCAN_BUDGET,
            greedy: GreedyBudget::default(),
            dense: unit,
            degree_webs: web,
            crux_webs: web,
            skew_fraction: 10.0,
            skew_divisor: 100.0,
            target_t: None,
            seed: 0,
        }
    }

    /// Multipliers scaled down and clamped so that units and webs fit in
    /// graphs with hundreds to thousands of vertices.
    pub fn desk() -> Self {
        let unit = UnitKnobs {
            branches: Knob::raw(0.1, 1, None),
            leaves: Knob::raw(1e-3, 2, Some(6)),
            length: Knob::raw(1e-3, 3, Some(8)),
        };
        let web_unit = UnitKnobs {
            branches: Knob::raw(1e-6, 2, Some(3)),
            leaves: Knob::raw(1e-2, 2, Some(4)),
            length: Knob::raw(1e-3, 3, Some(6)),
        };
        let web = WebKnobs { unit: web_unit, branches: Knob::raw(1.0, 1, None), length: Knob::raw(1e-2, 4, Some(10)) };
        PipelineConfig {
            expander_trials: Some(16),
            crux_budget: 20_000,
            dense: unit,
            degree_webs: web,
            crux_webs: web,
            ..Self::asymptotic()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    fn check_options(&self) -> CheckOptions {
        CheckOptions {
            mode: CheckMode::Auto,
            exact_threshold: self.expander_exact_threshold,
            trials: self.expander_trials,
            seed: self.seed,
        }
    }
}

/// Which expander a stage event refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Input,
    Eps,
    DegreeSquared,
    Crux,
}

/// One line of the pipeline trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum StageEvent {
    Component { component: usize, n: usize, edges: usize },
    Extract { component: usize, level: Level, k: f64, n: usize, avg_degree: String, verdict: Verdict, iterations: usize },
    ExtractFailed { component: usize, level: Level, k: f64, reason: String },
    Crux { component: usize, lower: usize, upper: usize },
    Greedy { component: usize, level: Level, floor: usize, t: Option<usize> },
    Units {
        component: usize,
        level: Level,
        target: usize,
        params: UnitParams,
        stars: usize,
        units_built: usize,
        stats: ConnectionStats,
        t: Option<usize>,
    },
    Webs {
        component: usize,
        level: Level,
        target: usize,
        skewed: bool,
        unit_params: UnitParams,
        web_params: WebParams,
        units_built: usize,
        webs_built: usize,
        stats: ConnectionStats,
        t: Option<usize>,
    },
    Skipped { component: usize, level: Level, stage: String, reason: String },
    Done { t: usize, component: usize },
}

/// Verified outcome of [`pipeline_find_subdivision`].
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineResult {
    pub t: usize,
    /// Certificate in the ids of the input graph.
    pub certificate: SubdivisionCertificate,
    pub trace: Vec<StageEvent>,
}

impl PipelineResult {
    /// The trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        self.trace.iter().map(|e| serde_json::to_string(e).expect("event serializes") + "\n").collect()
    }
}

fn ln_at_least_one(x: f64) -> f64 {
    x.max(std::f64::consts::E).ln()
}

/// Unit shape inside the `εd` expander for target `t`: `10t` branches,
/// `t·log⁷K` leaves and paths of length `40·log³K/ε`, with `K = n/d`.
pub fn dense_unit_params(n: usize, d: f64, eps: f64, t: usize, knobs: &UnitKnobs) -> UnitParams {
    let lk = ln_at_least_one(n as f64 / d.max(1.0));
    UnitParams {
        h1: knobs.branches.apply(10.0 * t as f64).max(t.saturating_sub(1)).max(1),
        h2: knobs.leaves.apply(t as f64 * lk.powi(7)),
        h3: knobs.length.apply(40.0 / eps * lk.powi(3)).max(2),
    }
}

/// Web shape inside the `d²` expander: units with `2·log¹⁰n` branches,
/// `d/log³n` leaves and length `log⁴n`; webs with `t` branches and paths of
/// length `50·log⁴n`.
pub fn degree_web_params(n: usize, d: f64, t: usize, knobs: &WebKnobs) -> (UnitParams, WebParams) {
    let ln = ln_at_least_one(n as f64);
    let unit = UnitParams {
        h1: knobs.unit.branches.apply(2.0 * ln.powi(10)).max(1),
        h2: knobs.unit.leaves.apply(d / ln.powi(3)).max(1),
        h3: knobs.unit.length.apply(ln.powi(4)).max(2),
    };
    let web = WebParams {
        h4: knobs.branches.apply(t as f64).max(t.saturating_sub(1)).max(1),
        h5: knobs.length.apply(50.0 * ln.powi(4)).max(1),
    };
    (unit, web)
}

/// Web shape inside the crux-level expander with crux size `nc` and
/// `K = n/nc`: units with `log nc·loglog nc·log²⁰K` branches, `t/log²K`
/// leaves and length `loglog nc·log¹⁰K`; webs with `t` branches and paths of
/// length `20·log nc·log¹⁰K`.
pub fn crux_web_params(n: usize, nc: usize, t: usize, knobs: &WebKnobs) -> (UnitParams, WebParams) {
    let lnc = ln_at_least_one(nc as f64);
    let llnc = ln_at_least_one(lnc);
    let lk = ln_at_least_one(n as f64 / nc.max(1) as f64);
    let unit = UnitParams {
        h1: knobs.unit.branches.apply(lnc * llnc * lk.powi(20)).max(1),
        h2: knobs.unit.leaves.apply(t as f64 / lk.powi(2)).max(1),
        h3: knobs.unit.length.apply(llnc * lk.powi(10)).max(2),
    };
    let web = WebParams {
        h4: knobs.branches.apply(t as f64).max(t.saturating_sub(1)).max(1),
        h5: knobs.length.apply(20.0 * lnc * lk.powi(10)).max(1),
    };
    (unit, web)
}

fn unit_footprint(p: &UnitParams) -> usize {
    p.h1.saturating_mul(p.h2.saturating_add(p.h3)).saturating_add(1)
}

/// Top-degree vertices whose removal (at most `n / fraction` of them) drops
/// the average degree below `d / divisor`, if any: the skewed case.
pub fn skew_split(g: &Graph, fraction: f64, divisor: f64) -> Option<VertexSet> {
    let n = g.n();
    let e = g.edge_count();
    if n == 0 || e == 0 {
        return None;
    }
    let limit = (n as f64 / fraction).floor() as usize;
    let d = 2.0 * e as f64 / n as f64;
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut gone = vec![false; n];
    let mut edges = e;
    let mut q = Vec::new();
    while q.len() < limit && q.len() + 1 < n {
        let v = (0..n).filter(|&v| !gone[v]).max_by_key(|&v| (deg[v], std::cmp::Reverse(v)))?;
        gone[v] = true;
        edges -= deg[v];
        for &u in g.neighbors(v) {
            if !gone[u] {
                deg[u] -= 1;
            }
        }
        q.push(v);
        let rest = (n - q.len()) as f64;
        if 2.0 * edges as f64 / rest < d / divisor {
            return Some(VertexSet::from_vec(q));
        }
    }
    None
}

/// Builds up to `count` fully vertex-disjoint units outside `w`.
fn harvest_units(g: &Graph, w: &VertexSet, params: UnitParams, count: usize) -> (Vec<Unit>, usize) {
    let mut taken = w.clone();
    let mut units = Vec::new();
    let mut stars_seen = 0;
    let leaves = params.h2 + params.h1;
    while units.len() < count {
        let stars = find_disjoint_stars(g, &taken, leaves, 4 * params.h1.max(1));
        stars_seen += stars.len();
        if stars.len() < 2 {
            break;
        }
        let half = (stars.len() / 2).max(1);
        let Some(unit) = build_unit(g, &taken, &stars[..half], &stars[half..], params) else { break };
        taken = taken.union(&unit.vertices());
        units.push(unit);
    }
    (units, stars_seen)
}

/// Dense-regime attempt: `s` disjoint units joined pairwise.
fn run_units(g: &Graph, s: usize, params: UnitParams) -> (Option<SubdivisionCertificate>, usize, usize, ConnectionStats) {
    let (units, stars) = harvest_units(g, &VertexSet::new(), params, s);
    if units.len() < s {
        return (None, stars, units.len(), ConnectionStats::default());
    }
    let (cert, stats) = connect_units(g, &units);
    (cert, stars, units.len(), stats)
}

/// Web attempt: `s` disjoint webs, each from fresh units and center stars,
/// then joined with [`connect_webs_traced`].
fn run_webs(
    g: &Graph,
    s: usize,
    unit: UnitParams,
    web: WebParams,
    skew: Option<&VertexSet>,
) -> (Option<SubdivisionCertificate>, usize, usize, ConnectionStats) {
    let mut taken = VertexSet::new();
    let mut webs: Vec<Web> = Vec::new();
    let mut units_built = 0;
    while webs.len() < s {
        let (units, _) = harvest_units(g, &taken, unit, 2 * web.h4 + 1);
        units_built += units.len();
        if units.len() < 2 * web.h4 {
            break;
        }
        let occupied = units.iter().fold(taken.clone(), |acc, u| acc.union(&u.vertices()));
        let stars = match skew {
            Some(q) => find_split_stars(g, &occupied, q, web.h4, 4),
            None => find_disjoint_stars(g, &occupied, web.h4, 4),
        };
        let Some(w) = build_web(g, &taken, &stars, &units, web) else { break };
        taken = taken.union(&w.vertices());
        webs.push(w);
    }
    if webs.len() < s {
        return (None, units_built, webs.len(), ConnectionStats::default());
    }
    let (cert, stats) = connect_webs_traced(g, &webs, s);
    (cert, units_built, webs.len(), stats)
}

struct ComponentRun<'a> {
    config: &'a PipelineConfig,
    component: usize,
    trace: Vec<StageEvent>,
    best: SubdivisionCertificate,
    greedy_on: Option<(usize, usize)>,
}

impl ComponentRun<'_> {
    /// Keeps `cert` (in the ids of `sub`'s parent) if it verifies and is larger.
    fn offer(&mut self, host: &Graph, sub: &Subgraph, cert: Option<SubdivisionCertificate>) -> Option<usize> {
        let cert = cert?;
        if !verify_subdivision(&sub.graph, &cert).is_empty() {
            return None;
        }
        let lifted = cert.lift(sub);
        debug_assert!(verify_subdivision(host, &lifted).is_empty());
        let t = lifted.t;
        if t > self.best.t {
            self.best = lifted;
        }
        Some(t)
    }

    fn satisfied(&self) -> bool {
        self.config.target_t.is_some_and(|t| self.best.t >= t)
    }

    fn greedy(&mut self, host: &Graph, sub: &Subgraph, level: Level) {
        let floor = self.best.t + 1;
        // Stages are nested, so an unchanged size means an unchanged graph.
        let size = (sub.graph.n(), sub.graph.edge_count());
        if self.greedy_on.replace(size) == Some(size) {
            self.skip(level, "greedy", "same graph as the previous stage".into());
            return;
        }
        let cert = greedy_max_budgeted(&sub.graph, floor, usize::MAX, None, &self.config.greedy);
        let t = self.offer(host, sub, cert);
        self.trace.push(StageEvent::Greedy { component: self.component, level, floor, t });
    }

    fn extract(&mut self, sub: &Subgraph, level: Level, k: f64) -> Option<Subgraph> {
        let k = k.max(1.0);
        let params = ExpanderParams::new(self.config.eps, k)
            .or_else(|_| ExpanderParams::without_integral_check(self.config.eps, k));
        let outcome = params.and_then(|p| extract_robust_expander(&sub.graph, &p, &self.config.check_options()));
        match outcome {
            Ok(x) => {
                let next = sub.compose(&x.subgraph);
                let avg = next.graph.average_degree().map(|d| format_rational(&d)).unwrap_or_default();
                self.trace.push(StageEvent::Extract {
                    component: self.component,
                    level,
                    k,
                    n: next.graph.n(),
                    avg_degree: avg,
                    verdict: x.witness.verdict,
                    iterations: x.iterations,
                });
                Some(next)
            }
            Err(Error::IterationCap { best, .. }) => {
                self.trace.push(StageEvent::ExtractFailed {
                    component: self.component,
                    level,
                    k,
                    reason: "iteration cap; continuing with best subgraph".into(),
                });
                Some(sub.compose(&best))
            }
            Err(e) => {
                self.trace.push(StageEvent::ExtractFailed { component: self.component, level, k, reason: e.to_string() });
                None
            }
        }
    }

    fn skip(&mut self, level: Level, stage: &str, reason: String) {
        self.trace.push(StageEvent::Skipped { component: self.component, level, stage: stage.into(), reason });
    }

    fn units(&mut self, host: &Graph, sub: &Subgraph) {
        let g = &sub.graph;
        let s = self.best.t + 1;
        let d = avg_degree(g);
        let params = dense_unit_params(g.n(), d, self.config.eps, s, &self.config.dense);
        if s.saturating_mul(unit_footprint(&params)) > g.n() || params.h2 + params.h1 > g.max_degree() {
            self.skip(Level::Eps, "units", format!("{s} units of shape {params:?} cannot fit"));
            return;
        }
        let (cert, stars, units_built, stats) = run_units(g, s, params);
        let t = self.offer(host, sub, cert);
        self.trace.push(StageEvent::Units {
            component: self.component,
            level: Level::Eps,
            target: s,
            params,
            stars,
            units_built,
            stats,
            t,
        });
    }

    fn webs(&mut self, host: &Graph, sub: &Subgraph, level: Level, shapes: (UnitParams, WebParams)) {
        let g = &sub.graph;
        let s = self.best.t + 1;
        let (unit, web) = shapes;
        let per_web = 1 + web.h4.saturating_mul(web.h5.saturating_add(unit_footprint(&unit)));
        if s.saturating_mul(per_web) > g.n() || web.h4 > g.max_degree() {
            self.skip(level, "webs", format!("{s} webs of shape {web:?}/{unit:?} cannot fit"));
            return;
        }
        let q = skew_split(g, self.config.skew_fraction, self.config.skew_divisor);
        let (cert, units_built, webs_built, stats) = run_webs(g, s, unit, web, q.as_ref());
        let t = self.offer(host, sub, cert);
        self.trace.push(StageEvent::Webs {
            component: self.component,
            level,
            target: s,
            skewed: q.is_some(),
            unit_params: unit,
            web_params: web,
            units_built,
            webs_built,
            stats,
            t,
        });
    }
}

fn avg_degree(g: &Graph) -> f64 {
    if g.n() == 0 {
        0.0
    } else {
        2.0 * g.edge_count() as f64 / g.n() as f64
    }
}

fn run_component<'a>(host: &Graph, component: usize, config: &'a PipelineConfig) -> ComponentRun<'a> {
    let (u, v) = host.edges().next().expect("component has an edge");
    let mut run = ComponentRun {
        config,
        component,
        trace: vec![StageEvent::Component { component, n: host.n(), edges: host.edge_count() }],
        best: SubdivisionCertificate::from_paths(vec![u, v], [Path::new(vec![u, v])]),
        greedy_on: None,
    };
    let input = Subgraph::identity(host);
    let d = avg_degree(host);
    run.greedy(host, &input, Level::Input);
    if run.satisfied() {
        return run;
    }
    let Some(g1) = run.extract(&input, Level::Eps, config.eps * d) else { return run };
    run.greedy(host, &g1, Level::Eps);
    run.units(host, &g1);
    if run.satisfied() {
        return run;
    }
    let Some(g2) = run.extract(&g1, Level::DegreeSquared, d * d) else { return run };
    run.greedy(host, &g2, Level::DegreeSquared);
    let s = run.best.t + 1;
    let shapes = degree_web_params(g2.graph.n(), avg_degree(&g2.graph), s, &config.degree_webs);
    run.webs(host, &g2, Level::DegreeSquared, shapes);
    if run.satisfied() {
        return run;
    }
    let crux = match crux_bounds_with_budget(&g2.graph, config.alpha, config.crux_budget) {
        Ok(c) => c,
        Err(e) => {
            run.skip(Level::Crux, "crux", e.to_string());
            return run;
        }
    };
    run.trace.push(StageEvent::Crux { component, lower: crux.lower, upper: crux.upper });
    let Some(h) = run.extract(&g2, Level::Crux, crux.upper as f64 / 100.0) else { return run };
    run.greedy(host, &h, Level::Crux);
    let s = run.best.t + 1;
    let shapes = crux_web_params(h.graph.n(), crux.upper, s, &config.crux_webs);
    run.webs(host, &h, Level::Crux, shapes);
    run
}

/// Largest verified clique subdivision found by the staged search; the
/// certificate is in the ids of `g`. Requires at least one edge.
pub fn pipeline_find_subdivision(g: &Graph, config: &PipelineConfig) -> Result<PipelineResult> {
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let mut best: Option<(SubdivisionCertificate, usize)> = None;
    let mut trace = Vec::new();
    for (index, comp) in g.components().into_iter().enumerate() {
        let sub = g.induced_subgraph(&comp);
        if sub.graph.edge_count() == 0 {
            continue;
        }
        let run = run_component(&sub.graph, index, config);
        trace.extend(run.trace);
        let lifted = run.best.lift(&sub);
        if best.as_ref().is_none_or(|(b, _)| lifted.t > b.t) {
            best = Some((lifted, index));
        }
        if config.target_t.is_some_and(|t| best.as_ref().is_some_and(|(b, _)| b.t >= t)) {
            break;
        }
    }
    let (certificate, component) = best.expect("some component has an edge");
    if !verify_subdivision(g, &certificate).is_empty() {
        return Err(Error::GuaranteeViolated("lifted certificate failed verification".into()));
    }
    trace.push(StageEvent::Done { t: certificate.t, component });
    Ok(PipelineResult { t: certificate.t, certificate, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::{greedy_max_subdivision, max_subdivision_bruteforce};
    use proptest::prelude::*;

    #[test]
    fn complete_graph_is_its_own_subdivision() {
        let r = pipeline_find_subdivision(&Graph::complete(20), &PipelineConfig::default()).unwrap();
        assert_eq!(r.t, 20);
        assert!(verify_subdivision(&Graph::complete(20), &r.certificate).is_empty());
    }

    #[test]
    fn jung_copies_match_single() {
        let one = Graph::complete_bipartite(8, 8);
        let many = Graph::disjoint_union(&vec![one.clone(); 4]);
        let cfg = PipelineConfig::default();
        let a = pipeline_find_subdivision(&one, &cfg).unwrap();
        let b = pipeline_find_subdivision(&many, &cfg).unwrap();
        assert_eq!(a.t, b.t);
        assert!(verify_subdivision(&many, &b.certificate).is_empty());
    }

    #[test]
    fn pipeline_at_least_direct_greedy() {
        let g = Graph::gnp(64, 0.5, 1).unwrap();
        let r = pipeline_find_subdivision(&g, &PipelineConfig::default()).unwrap();
        let greedy = greedy_max_subdivision(&g, usize::MAX, None).unwrap();
        assert!(r.t >= greedy.t);
    }

    #[test]
    fn edgeless_graph_is_rejected_and_single_edge_gives_two() {
        assert_eq!(pipeline_find_subdivision(&Graph::empty(5), &PipelineConfig::default()), Err(Error::NoEdges));
        let g = Graph::from_edges(4, [(1, 3)]).unwrap();
        let r = pipeline_find_subdivision(&g, &PipelineConfig::default()).unwrap();
        assert_eq!(r.t, 2);
        assert_eq!(r.certificate.core, vec![1, 3]);
    }

    #[test]
    fn trace_is_json_lines() {
        let r = pipeline_find_subdivision(&Graph::petersen(), &PipelineConfig::default()).unwrap();
        let text = r.trace_jsonl();
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.get("event").is_some());
        }
        assert!(text.lines().last().unwrap().contains("\"done\""));
        let t = max_subdivision_bruteforce(&Graph::petersen(), usize::MAX).unwrap().t;
        assert!(r.t <= t);
    }

    #[test]
    fn config_json_round_trip_and_partial() {
        let cfg = PipelineConfig::asymptotic();
        assert_eq!(PipelineConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        let partial = PipelineConfig::from_json(r#"{"eps":0.02,"seed":9}"#).unwrap();
        assert_eq!(partial.eps, 0.02);
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.crux_budget, PipelineConfig::desk().crux_budget);
        assert!(PipelineConfig::from_json("{").is_err());
    }

    #[test]
    fn skew_split_examples() {
        let star = Graph::complete_bipartite(1, 50);
        assert_eq!(skew_split(&star, 10.0, 100.0).unwrap().as_slice(), &[0]);
        assert!(skew_split(&Graph::complete(30), 10.0, 100.0).is_none());
    }

    #[test]
    fn schedules_respect_floors() {
        let cfg = PipelineConfig::desk();
        let p = dense_unit_params(256, 128.0, 0.01, 12, &cfg.dense);
        assert!(p.h1 >= 11 && p.h3 >= 2 && p.h2 >= 1);
        let (u, w) = degree_web_params(1024, 16.0, 5, &cfg.degree_webs);
        assert!(w.h4 >= 4 && u.h1 <= 3 && w.h5 <= 10);
        let (u, _) = crux_web_params(1024, 40, 5, &PipelineConfig::asymptotic().crux_webs);
        assert!(u.h1 > 1000);
    }

    #[test]
    fn structured_stages_can_succeed() {
        // Tiny targets let the unit and web pipelines run end to end.
        let g = Graph::complete(120);
        let units = dense_unit_params(120, 119.0, 0.01, 3, &PipelineConfig::desk().dense);
        let (cert, _, built, _) = run_units(&g, 3, units);
        assert_eq!(built, 3);
        assert!(verify_subdivision(&g, &cert.unwrap()).is_empty());
        let unit = UnitParams { h1: 2, h2: 2, h3: 3 };
        let web = WebParams { h4: 2, h5: 4 };
        let (cert, _, webs, _) = run_webs(&g, 3, unit, web, None);
        assert_eq!(webs, 3);
        assert!(verify_subdivision(&g, &cert.unwrap()).is_empty());
    }

    #[test]
    fn union_with_an_edge_keeps_t() {
        let g = Graph::gnp(30, 0.3, 4).unwrap();
        let cfg = PipelineConfig::default();
        let a = pipeline_find_subdivision(&g, &cfg).unwrap();
        let b = pipeline_find_subdivision(&Graph::disjoint_union(&[g.clone(), Graph::complete(2)]), &cfg).unwrap();
        assert_eq!(a.t, b.t);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pipeline_output_verifies(n in 2usize..=40, p in 0.05f64..0.9, seed in any::<u64>()) {
            let g = Graph::gnp(n, p, seed).unwrap();
            prop_assume!(g.edge_count() > 0);
            let r = pipeline_find_subdivision(&g, &PipelineConfig { seed, ..Default::default() }).unwrap();
            prop_assert!(verify_subdivision(&g, &r.certificate).is_empty());
            prop_assert!(r.t >= 2 && r.t <= g.max_degree() + 1);
        }
    }
}
