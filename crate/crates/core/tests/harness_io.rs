use std::path::Path;

use proptest::prelude::*;
use vlineq_core::harness::instance::BUNDLED_EXAMPLE;
use vlineq_core::harness::{
    exit, generate_instance, load_instance, parse_instance, run_instance, run_suite, save_instance,
    GeneratorKind, HarnessError, Suite,
};
use vlineq_core::{GridConfig, ScalarField};

fn cfg() -> GridConfig {
    GridConfig::default()
}

#[test]
fn bundled_example_verifies() {
    let inst = parse_instance(BUNDLED_EXAMPLE, &cfg()).unwrap();
    assert_eq!(inst.checks.len(), 3);
    let report = run_instance(&inst, Suite::All, &cfg(), 42).unwrap();
    assert!(report.all_passed(), "{report}");
    assert_eq!(report.instances, 3);
    let eq = report.child("cs-equality").unwrap();
    let witness = eq.worst_witness.as_ref().unwrap();
    assert_eq!(witness["equality"], true);
    assert!(witness["classical_witness"].is_null());
    assert_eq!(witness["closed_gap"], serde_json::json!([0.0, 0.0]));
}

#[test]
fn bundled_example_file_matches_embedded_copy() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/example_noclaeqco.json");
    let loaded = load_instance(&path, &cfg()).unwrap();
    assert_eq!(loaded.file, parse_instance(BUNDLED_EXAMPLE, &cfg()).unwrap().file);
}

#[test]
fn empty_checks_run_nothing() {
    let inst = parse_instance(r#"{"field": "real", "checks": []}"#, &cfg()).unwrap();
    let report = run_instance(&inst, Suite::All, &cfg(), 1).unwrap();
    assert_eq!((report.instances, report.passes), (0, 0));
    assert!(report.all_passed());
}

#[test]
fn non_hermitian_flag_is_a_validation_error() {
    let text = r#"{
        "field": "complex",
        "forms": {"T": {"matrices": [[[[1, 0], [0, 1]], [[0, 0], [1, 0]]]]}},
        "checks": []
    }"#;
    match parse_instance(text, &cfg()) {
        Err(e @ HarnessError::Validation { .. }) => {
            assert_eq!(e.exit_code(), exit::VALIDATION);
            assert!(e.to_string().contains("/forms/T/matrices/0"), "{e}");
        }
        other => panic!("expected validation error, got {other:?}"),
    }
}

#[test]
fn malformed_json_is_a_parse_error() {
    let e = parse_instance(r#"{"field": "real", "elements": {"x": [[1, 0, 3]]}}"#, &cfg()).unwrap_err();
    assert_eq!(e.exit_code(), exit::PARSE);
    assert!(e.to_string().contains("/elements/x"), "{e}");
    let e = parse_instance("{", &cfg()).unwrap_err();
    assert_eq!(e.exit_code(), exit::PARSE);
    let e = parse_instance(r#"{"field": "quaternion", "checks": []}"#, &cfg()).unwrap_err();
    assert_eq!(e.exit_code(), exit::PARSE);
}

#[test]
fn unresolved_names_are_validation_errors() {
    let text = r#"{"field": "real", "checks": [{"suite": "modulus", "operands": {"elements": ["nope"]}}]}"#;
    let e = parse_instance(text, &cfg()).unwrap_err();
    assert_eq!(e.exit_code(), exit::VALIDATION);
    assert!(e.to_string().contains("/checks/0/operands"), "{e}");
}

#[test]
fn imaginary_part_in_real_field_is_rejected() {
    let text = r#"{"field": "real", "elements": {"x": [[1, 0.5]]}, "checks": []}"#;
    let e = parse_instance(text, &cfg()).unwrap_err();
    assert_eq!(e.exit_code(), exit::VALIDATION);
    assert!(e.to_string().contains("/elements/x/0/1"), "{e}");
}

#[test]
fn missing_file_is_an_io_error() {
    let e = load_instance(Path::new("/nonexistent/instance.json"), &cfg()).unwrap_err();
    assert_eq!(e.exit_code(), exit::IO);
}

#[test]
fn unknown_names_are_usage_errors() {
    assert_eq!("nope".parse::<Suite>().unwrap_err().exit_code(), exit::USAGE);
    assert_eq!("nope".parse::<GeneratorKind>().unwrap_err().exit_code(), exit::USAGE);
    let e = generate_instance(GeneratorKind::PsdForm, (0, 2), ScalarField::Real, 1).unwrap_err();
    assert_eq!(e.exit_code(), exit::USAGE);
}

#[test]
fn zero_trials_give_an_empty_report() {
    for name in Suite::names() {
        let report = run_suite(name.parse().unwrap(), &cfg(), 0, 42).unwrap();
        assert_eq!((report.instances, report.passes), (0, 0), "{name}");
    }
}

#[test]
fn cauchy_schwarz_suite_passes_every_trial() {
    let report = run_suite(Suite::CauchySchwarz, &cfg(), 1000, 42).unwrap();
    assert_eq!(report.passes, 1000, "{report}");
}

#[test]
fn suites_are_deterministic() {
    let a = run_suite(Suite::All, &cfg(), 20, 7).unwrap();
    let b = run_suite(Suite::All, &cfg(), 20, 7).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn generated_psd_example_validates() {
    let file = generate_instance(GeneratorKind::PsdForm, (3, 2), ScalarField::Complex, 7).unwrap();
    let inst = parse_instance(&file.to_json_pretty(), &cfg()).unwrap();
    let report = run_instance(&inst, Suite::All, &cfg(), 7).unwrap();
    assert!(report.all_passed(), "{report}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_instances_round_trip(
        kind in prop::sample::select(GeneratorKind::ALL.to_vec()),
        m in 1usize..5,
        n in 2usize..5,
        complex in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let field = if complex { ScalarField::Complex } else { ScalarField::Real };
        let file = generate_instance(kind, (m.max(2), n), field, seed)?;
        prop_assert_eq!(&file, &generate_instance(kind, (m.max(2), n), field, seed)?);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        save_instance(&file, &path)?;
        let loaded = load_instance(&path, &cfg())?;
        prop_assert_eq!(&loaded.file, &file);
        let report = run_instance(&loaded, Suite::All, &cfg(), seed)?;
        prop_assert!(report.all_passed(), "{}", report);
    }
}
