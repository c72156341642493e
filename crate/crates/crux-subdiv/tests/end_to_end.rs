//! Cross-module flows through the public API.

use crux_subdiv::crux::{crux_bounds, crux_exact, is_crux_witness};
use crux_subdiv::expansion::{extract_robust_expander, CheckOptions, ExpanderParams, Verdict};
use crux_subdiv::experiments::{experiment_dichotomy, ExperimentReport};
use crux_subdiv::graph::{generate, parse_graph, serialize_graph};
use crux_subdiv::pipeline::{pipeline_find_subdivision, PipelineConfig};
use crux_subdiv::subdivision::{
    greedy_max_subdivision, max_subdivision_bruteforce, verify_subdivision, SubdivisionCertificate,
};
use crux_subdiv::webs::{build_unit, connect_units, find_disjoint_stars, validate_unit, UnitParams};
use crux_subdiv::{Graph, GraphSpec, Rational, VertexSet};
use proptest::prelude::*;

#[test]
fn spec_to_file_to_certificate_round_trip() {
    let spec = GraphSpec::from_json(r#"{"kind":"blowup","base":{"kind":"petersen"},"s":2}"#).unwrap();
    let g = generate(&spec).unwrap();
    let reread = parse_graph(&serialize_graph(&g)).unwrap();
    assert_eq!(reread, g);
    let res = pipeline_find_subdivision(&reread, &PipelineConfig::default()).unwrap();
    let cert = SubdivisionCertificate::from_json(&res.certificate.to_json()).unwrap();
    assert!(verify_subdivision(&g, &cert).is_empty());
    assert!(res.t >= 5);
}

#[test]
fn subdivision_found_inside_extracted_expander_lifts() {
    let g = Graph::disjoint_union(&[Graph::gnp(40, 0.3, 1).unwrap(), Graph::complete(9)]);
    let params = ExpanderParams::new(0.1, 1.0).unwrap();
    let ex = extract_robust_expander(&g, &params, &CheckOptions::sampled(4)).unwrap();
    assert_ne!(ex.witness.verdict, Verdict::Refuted);
    let local = greedy_max_subdivision(&ex.subgraph.graph, usize::MAX, None).unwrap();
    let lifted = local.lift(&ex.subgraph);
    assert!(verify_subdivision(&g, &lifted).is_empty());
}

#[test]
fn crux_witnesses_check_out() {
    let alpha = Rational::new(1, 2);
    for g in [Graph::hypercube(4), Graph::gnp(18, 0.4, 3).unwrap(), Graph::gnp(120, 0.1, 3).unwrap()] {
        let rep = if g.n() <= 20 { crux_exact(&g, alpha) } else { crux_bounds(&g, alpha) }.unwrap();
        let w = rep.witness.unwrap();
        assert_eq!(w.len(), rep.upper);
        assert!(rep.lower <= rep.upper);
        assert!(is_crux_witness(&g, alpha, &w).unwrap());
    }
}

#[test]
fn units_built_from_harvested_stars_connect() {
    let g = Graph::complete(60);
    let params = UnitParams { h1: 3, h2: 2, h3: 3 };
    let mut used = VertexSet::new();
    let mut units = Vec::new();
    for _ in 0..3 {
        let stars = find_disjoint_stars(&g, &used, 3, 5);
        assert_eq!(stars.len(), 5);
        let unit = build_unit(&g, &used, &stars[..2], &stars[2..], params).unwrap();
        assert!(validate_unit(&g, &unit).is_empty());
        used = used.union(&unit.vertices());
        units.push(unit);
    }
    let (cert, _) = connect_units(&g, &units);
    let cert = cert.unwrap();
    assert_eq!(cert.t, 3);
    assert!(verify_subdivision(&g, &cert).is_empty());
}

#[test]
fn experiment_report_survives_serialization() {
    let rep = experiment_dichotomy(30, &[0.2, 0.6], 2, 5, &PipelineConfig::default()).unwrap();
    let back = ExperimentReport::from_json(&rep.to_json()).unwrap();
    assert_eq!(back.trials.len(), 4);
    assert!(back.verify_certificates().unwrap().is_empty());
    assert_eq!(back.to_csv(), rep.to_csv());
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (3usize..=8, 0.2f64..0.9, any::<u64>()).prop_map(|(n, p, seed)| Graph::gnp(n, p, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heuristics_never_beat_the_oracle(g in small_graph()) {
        prop_assume!(g.edge_count() > 0);
        let oracle = max_subdivision_bruteforce(&g, usize::MAX).unwrap();
        let piped = pipeline_find_subdivision(&g, &PipelineConfig::default()).unwrap();
        prop_assert!(piped.t <= oracle.t);
        prop_assert!(verify_subdivision(&g, &piped.certificate).is_empty());
        if let Some(greedy) = greedy_max_subdivision(&g, usize::MAX, None) {
            prop_assert!(greedy.t <= oracle.t);
        }
    }
}
