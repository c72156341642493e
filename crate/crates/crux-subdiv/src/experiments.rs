//! Reproducible experiment runners with JSON and CSV reports.
//!
//! All randomness derives from one master seed: trial `i` uses
//! [`trial_seed`]`(master, i)`. Reports store the graph recipe of every
//! recorded certificate so that it can be re-verified after loading.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{generate, Graph, GraphSpec};
use crate::pipeline::{pipeline_find_subdivision, PipelineConfig};
use crate::subdivision::{max_subdivision_bruteforce, verify_subdivision, SubdivisionCertificate, Violation};

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `master`: `splitmix64(master ⊕ splitmix64(index))`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// One trial: its seed, measured quantities and optional certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub measurements: BTreeMap<String, Value>,
    /// Recipe of the graph the certificate lives in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<SubdivisionCertificate>,
}

/// Output of every experiment runner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub input: Value,
    pub trials: Vec<TrialRecord>,
    pub summary: BTreeMap<String, Value>,
    pub config: Value,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }

    /// Regenerates each recorded graph and re-checks its certificate;
    /// returns `(trial index, violations)` for every failure.
    pub fn verify_certificates(&self) -> Result<Vec<(usize, Vec<Violation>)>> {
        let mut failures = Vec::new();
        for (i, trial) in self.trials.iter().enumerate() {
            if let (Some(spec), Some(cert)) = (&trial.graph, &trial.certificate) {
                let violations = verify_subdivision(&generate(spec)?, cert);
                if !violations.is_empty() {
                    failures.push((i, violations));
                }
            }
        }
        Ok(failures)
    }

    /// One row per trial: `trial,seed` then every measurement key (sorted).
    /// Strings are written bare; missing values are empty.
    pub fn to_csv(&self) -> String {
        let mut keys: Vec<&String> = self.trials.iter().flat_map(|t| t.measurements.keys()).collect();
        keys.sort();
        keys.dedup();
        let mut out = String::from("trial,seed");
        for k in &keys {
            out.push(',');
            out.push_str(k);
        }
        out.push('\n');
        for (i, t) in self.trials.iter().enumerate() {
            out.push_str(&format!("{i},{}", t.seed));
            for k in &keys {
                out.push(',');
                match t.measurements.get(*k) {
                    Some(Value::String(s)) => out.push_str(s),
                    Some(Value::Null) | None => {}
                    Some(v) => out.push_str(&v.to_string()),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Median of a non-empty list (mean of the two middle values for even length).
pub fn median(values: &[usize]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m] as f64
    } else {
        (v[m - 1] + v[m]) as f64 / 2.0
    }
}

fn config_echo(config: &PipelineConfig) -> Value {
    serde_json::to_value(config).expect("config serializes")
}

/// Random-graph dichotomy: for each `p` and trial, generates `G(n, p)` with
/// seed [`trial_seed`]`(master, p_index·trials + trial)`, runs the pipeline
/// and records the verified `t` against `np` and `√n`. The summary lists the
/// median `t` per `p`, whether it is non-decreasing in `p`, and the ratio of
/// the last to the first median.
pub fn experiment_dichotomy(
    n: usize,
    p_list: &[f64],
    trials: usize,
    master: u64,
    config: &PipelineConfig,
) -> Result<ExperimentReport> {
    if p_list.is_empty() || trials == 0 {
        return Err(Error::InvalidParameter("need at least one p and one trial".into()));
    }
    let pmax = p_list.iter().cloned().fold(f64::MIN, f64::max);
    if (n as f64) * pmax < 1.0 {
        return Err(Error::InvalidParameter(format!("n·max(p) = {} < 1", n as f64 * pmax)));
    }
    let mut records = Vec::new();
    let mut medians = Vec::new();
    for (pi, &p) in p_list.iter().enumerate() {
        let mut ts = Vec::new();
        for ti in 0..trials {
            let seed = trial_seed(master, (pi * trials + ti) as u64);
            let spec = GraphSpec::Gnp { n, p, seed };
            let g = generate(&spec)?;
            let mut m = BTreeMap::new();
            m.insert("p".into(), json!(p));
            m.insert("np".into(), json!(n as f64 * p));
            m.insert("sqrt_n".into(), json!((n as f64).sqrt()));
            m.insert("edges".into(), json!(g.edge_count()));
            let certificate = if g.edge_count() == 0 {
                m.insert("t".into(), json!(usize::from(n > 0)));
                ts.push(usize::from(n > 0));
                None
            } else {
                let r = pipeline_find_subdivision(&g, &PipelineConfig { seed, ..config.clone() })?;
                m.insert("t".into(), json!(r.t));
                ts.push(r.t);
                Some(r.certificate)
            };
            records.push(TrialRecord { seed, measurements: m, graph: Some(spec), certificate });
        }
        medians.push((p, median(&ts)));
    }
    let monotone = medians.windows(2).all(|w| w[0].1 <= w[1].1);
    let ratio = medians.last().unwrap().1 / medians[0].1.max(1.0);
    let mut summary = BTreeMap::new();
    summary.insert(
        "median_t".into(),
        Value::Array(medians.iter().map(|(p, m)| json!({"p": p, "median_t": m})).collect()),
    );
    summary.insert("monotone".into(), json!(monotone));
    summary.insert("last_over_first".into(), json!(ratio));
    Ok(ExperimentReport {
        experiment: "dichotomy".into(),
        input: json!({"n": n, "p": p_list, "trials": trials, "seed": master}),
        trials: records,
        summary,
        config: config_echo(config),
    })
}

/// Disjoint copies of `K_{a,a}`: pipeline `t` on one copy versus on
/// `copies` copies, plus the exact value for one copy when `a ≤ 6`.
pub fn experiment_jung(a: usize, copies: usize, config: &PipelineConfig) -> Result<ExperimentReport> {
    if a == 0 || copies == 0 {
        return Err(Error::InvalidParameter("a and copies must be positive".into()));
    }
    let single = GraphSpec::CompleteBipartite { a, b: a };
    let union = GraphSpec::DisjointUnion { parts: vec![single.clone(); copies] };
    let mut records = Vec::new();
    let mut ts = Vec::new();
    for (name, spec) in [("single", &single), ("union", &union)] {
        let g = generate(spec)?;
        let r = pipeline_find_subdivision(&g, config)?;
        let mut m = BTreeMap::new();
        m.insert("graph".into(), json!(name));
        m.insert("n".into(), json!(g.n()));
        m.insert("t".into(), json!(r.t));
        ts.push(r.t);
        records.push(TrialRecord { seed: config.seed, measurements: m, graph: Some(spec.clone()), certificate: Some(r.certificate) });
    }
    let mut summary = BTreeMap::new();
    summary.insert("t_single".into(), json!(ts[0]));
    summary.insert("t_union".into(), json!(ts[1]));
    summary.insert("equal".into(), json!(ts[0] == ts[1]));
    if a <= 6 {
        let oracle = max_subdivision_bruteforce(&Graph::complete_bipartite(a, a), usize::MAX)?;
        summary.insert("oracle_t_single".into(), json!(oracle.t));
    }
    Ok(ExperimentReport {
        experiment: "jung".into(),
        input: json!({"a": a, "copies": copies}),
        trials: records,
        summary,
        config: config_echo(config),
    })
}

/// Host used by [`experiment_bipartite_obstruction`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionHost {
    /// `G(max(t, ⌈ct²/100⌉), c/4)`.
    Random,
    /// Complete graph on the same number of vertices (negative control).
    Complete,
}

/// Largest `e(X, Y)` over disjoint `X, Y` with `|X| + |Y| = t`.
pub fn max_bipartite_edges(g: &Graph, t: usize) -> Result<usize> {
    let n = g.n();
    if t > n || t > 30 {
        return Err(Error::InvalidParameter(format!("t = {t} must be at most min(n, 30) = {}", n.min(30))));
    }
    let subsets = binomial(n, t);
    let work = subsets.saturating_mul(1u128 << t.saturating_sub(1));
    if work > 200_000_000 {
        return Err(Error::InvalidParameter(format!("{work} bipartitions exceed the enumeration limit")));
    }
    if t < 2 {
        return Ok(0);
    }
    let mut best = 0;
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        // Fix idx[0] in X to skip mirrored splits.
        for mask in 0u32..(1u32 << (t - 1)) {
            let side = |i: usize| i > 0 && mask >> (i - 1) & 1 == 1;
            let mut cut = 0;
            for i in 0..t {
                for j in i + 1..t {
                    if side(i) != side(j) && g.has_edge(idx[i], idx[j]) {
                        cut += 1;
                    }
                }
            }
            best = best.max(cut);
        }
        let Some(k) = (0..t).rev().find(|&k| idx[k] < n - t + k) else { break };
        idx[k] += 1;
        for j in k + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(best)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Dense random hosts have no dense bipartite `t`-sets: on
/// `G(max(t, ⌈ct²/100⌉), c/4)` (or a complete host), records the largest
/// `e(X, Y)` with `|X| + |Y| = t` against `ct²/12`, and the host's average
/// degree against `c²t²/1000`. A single sample, so empirical only.
pub fn experiment_bipartite_obstruction(t: usize, c: f64, seed: u64, host: ObstructionHost) -> Result<ExperimentReport> {
    if !(c > 0.0 && c <= 4.0) || t == 0 || t > 14 {
        return Err(Error::InvalidParameter(format!("need 0 < c ≤ 4 and 1 ≤ t ≤ 14, got c = {c}, t = {t}")));
    }
    let n = ((c * (t * t) as f64 / 100.0).ceil() as usize).max(t);
    let spec = match host {
        ObstructionHost::Random => GraphSpec::Gnp { n, p: c / 4.0, seed },
        ObstructionHost::Complete => GraphSpec::Complete { n },
    };
    let g = generate(&spec)?;
    let max_edges = max_bipartite_edges(&g, t)?;
    let bound = c * (t * t) as f64 / 12.0;
    let d = if n == 0 { 0.0 } else { 2.0 * g.edge_count() as f64 / n as f64 };
    let degree_bound = c * c * (t * t) as f64 / 1000.0;
    let mut m = BTreeMap::new();
    m.insert("n".into(), json!(n));
    m.insert("max_bipartite_edges".into(), json!(max_edges));
    m.insert("edge_bound".into(), json!(bound));
    m.insert("avg_degree".into(), json!(d));
    m.insert("degree_bound".into(), json!(degree_bound));
    let mut summary = BTreeMap::new();
    summary.insert("within_edge_bound".into(), json!((max_edges as f64) <= bound));
    summary.insert("degree_at_least_bound".into(), json!(d >= degree_bound));
    summary.insert("single_sample".into(), json!(true));
    Ok(ExperimentReport {
        experiment: "bipartite_obstruction".into(),
        input: json!({"t": t, "c": c, "seed": seed, "host": host}),
        trials: vec![TrialRecord { seed, measurements: m, graph: Some(spec), certificate: None }],
        summary,
        config: Value::Null,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trial_seeds_are_distinct_and_stable() {
        let seeds: Vec<u64> = (0..100).map(|i| trial_seed(42, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 100);
        assert_eq!(trial_seed(42, 7), seeds[7]);
        assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[3, 1, 2]), 2.0);
        assert_eq!(median(&[4, 1, 2, 3]), 2.5);
    }

    #[test]
    fn small_dichotomy_report() {
        let cfg = PipelineConfig::default();
        let r = experiment_dichotomy(40, &[0.05, 0.5], 3, 11, &cfg).unwrap();
        assert_eq!(r.trials.len(), 6);
        assert!(r.verify_certificates().unwrap().is_empty());
        let again = experiment_dichotomy(40, &[0.05, 0.5], 3, 11, &cfg).unwrap();
        assert_eq!(r.to_json(), again.to_json());
        let loaded = ExperimentReport::from_json(&r.to_json()).unwrap();
        assert_eq!(loaded, r);
        let csv = r.to_csv();
        assert!(csv.starts_with("trial,seed,edges,np,p,sqrt_n,t\n"));
        assert_eq!(csv.lines().count(), 7);
        assert!(experiment_dichotomy(10, &[0.01], 1, 0, &cfg).is_err());
    }

    #[test]
    fn subcritical_graphs_have_tiny_t() {
        let r = experiment_dichotomy(200, &[0.5 / 200.0, 0.01], 3, 5, &PipelineConfig::default()).unwrap();
        for trial in &r.trials[..3] {
            assert!(trial.measurements["t"].as_u64().unwrap() <= 4);
        }
    }

    #[test]
    fn tampered_report_fails_reverification() {
        let r = experiment_jung(3, 2, &PipelineConfig::default()).unwrap();
        let mut bad = r.clone();
        let cert = bad.trials[0].certificate.as_mut().unwrap();
        let key = *cert.paths.keys().next().unwrap();
        cert.paths.insert(key, crate::graph::Path::new(vec![key.0, key.0]));
        assert_eq!(bad.verify_certificates().unwrap().len(), 1);
    }

    #[test]
    fn jung_examples() {
        let cfg = PipelineConfig::default();
        let r = experiment_jung(3, 4, &cfg).unwrap();
        assert_eq!(r.summary["equal"], json!(true));
        assert_eq!(r.summary["oracle_t_single"], json!(4));
        assert!(r.verify_certificates().unwrap().is_empty());
        let one = experiment_jung(5, 1, &cfg).unwrap();
        assert_eq!(one.summary["t_single"], one.summary["t_union"]);
    }

    #[test]
    fn obstruction_examples() {
        let r = experiment_bipartite_obstruction(10, 1.0, 3, ObstructionHost::Random).unwrap();
        assert_eq!(r.trials[0].measurements["n"], json!(10));
        assert_eq!(r.trials[0].measurements["edge_bound"], json!(100.0 / 12.0));
        let toy = experiment_bipartite_obstruction(4, 1.0, 0, ObstructionHost::Random).unwrap();
        assert_eq!(toy.trials.len(), 1);
        let control = experiment_bipartite_obstruction(10, 1.0, 0, ObstructionHost::Complete).unwrap();
        assert_eq!(control.trials[0].measurements["max_bipartite_edges"], json!(25));
        assert_eq!(control.summary["within_edge_bound"], json!(false));
    }

    /// Independent oracle: every assignment of each vertex to X, Y or neither.
    fn ternary_max(g: &Graph, t: usize) -> usize {
        let n = g.n();
        let mut best = 0;
        for code in 0..3usize.pow(n as u32) {
            let mut side = vec![0u8; n];
            let mut c = code;
            for s in side.iter_mut() {
                *s = (c % 3) as u8;
                c /= 3;
            }
            if side.iter().filter(|&&s| s != 0).count() != t {
                continue;
            }
            let cut = g.edges().filter(|&(u, v)| side[u] != 0 && side[v] != 0 && side[u] != side[v]).count();
            best = best.max(cut);
        }
        best
    }

    proptest! {
        #[test]
        fn bipartite_max_matches_ternary_oracle(n in 1usize..=7, p in 0.0f64..1.0, seed in any::<u64>(), t in 1usize..=7) {
            prop_assume!(t <= n);
            let g = Graph::gnp(n, p, seed).unwrap();
            prop_assert_eq!(max_bipartite_edges(&g, t).unwrap(), ternary_max(&g, t));
        }
    }
}
