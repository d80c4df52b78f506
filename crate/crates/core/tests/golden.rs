mod common;

use std::fs;

use seuguard_core::{analyze, emit_report, Engine, Format};

use common::manifest;

#[test]
fn benchmark_reports_match_expected_files() {
    let m = manifest();
    for entry in &m.benchmarks {
        let report = analyze(&m.config(entry, Engine::Checker).unwrap()).unwrap();
        let expected = fs::read_to_string(m.expected_path(entry)).unwrap();
        assert_eq!(emit_report(&report, Format::Json), expected, "{}", entry.name);
    }
}

#[test]
fn oracle_reproduces_the_same_aggregates() {
    let m = manifest();
    for entry in &m.benchmarks {
        let checked = analyze(&m.config(entry, Engine::Checker).unwrap()).unwrap();
        let oracle = analyze(&m.config(entry, Engine::Oracle).unwrap()).unwrap();
        assert_eq!((checked.t, checked.s, checked.m), (oracle.t, oracle.s, oracle.m), "{}", entry.name);
        for (a, b) in checked.per_variable.iter().zip(&oracle.per_variable) {
            assert_eq!(a.verdict.classification, b.verdict.classification, "{} {}", entry.name, a.variable);
            assert_eq!(a.verdict.direction, b.verdict.direction, "{} {}", entry.name, a.variable);
        }
    }
}

#[test]
fn window_property_tolerates_single_cycle_excursions() {
    let m = manifest();
    let entry = m.benchmarks.iter().find(|b| b.name == "Level Control").unwrap();
    let mut c = m.config(entry, Engine::Checker).unwrap();
    let windowed = analyze(&c).unwrap();
    c.property = "window valve in (0,100) persist 1".into();
    let strict = analyze(&c).unwrap();
    let crvs = |r: &seuguard_core::AnalysisReport| r.crv_count;
    assert!(crvs(&windowed) <= crvs(&strict));
    let valve = windowed.per_variable.iter().find(|v| v.variable == "valve").unwrap();
    assert_eq!(valve.verdict.counterexample.as_ref().unwrap().cycles, Some(2));
}
