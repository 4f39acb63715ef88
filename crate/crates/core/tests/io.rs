use std::fs;

use onto_slu::io::{
    load_ontology, load_ontology_with, parse_ontology, to_document_text, LoadError,
};
use onto_slu::ontology::{Concept, OntologyHeader, OntologyKind};
use onto_slu::{load_ontologies, sample, save_ontology, Ontology};

#[test]
fn bundled_ontologies_have_expected_sizes() {
    let d = load_ontology(sample::data_dir().join("railway_domain.toml")).unwrap();
    assert_eq!(d.concepts().len(), 15);
    assert_eq!(d.kind(), OntologyKind::Domain);
    let o = load_ontologies(
        sample::data_dir().join("railway_domain.toml"),
        sample::data_dir().join("railway_task.toml"),
    )
    .unwrap();
    assert_eq!(o.task().concepts().len(), 6);
    assert_eq!(o, sample::ontologies());
}

#[test]
fn saving_to_unwritable_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing-dir").join("o.toml");
    assert!(save_ontology(&sample::domain_ontology(), &target).is_err());
}

#[test]
fn ontology_without_instances_round_trips() {
    let o = Ontology::new(
        OntologyHeader::new("bare", OntologyKind::Domain),
        vec![Concept::new("Station").with_gloss("محطة")],
        vec![],
        vec![],
        vec![],
    );
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bare.toml");
    save_ontology(&o, &path).unwrap();
    let back = load_ontology(&path).unwrap();
    assert_eq!(back, o);
    assert!(back.instances().is_empty());
}

#[test]
fn bundled_files_are_stable_under_save() {
    // Re-serializing a parsed ontology and parsing again is a fixed point.
    for o in [sample::domain_ontology(), sample::task_ontology()] {
        let text = to_document_text(&o);
        let again = parse_ontology(&text, "again.toml".as_ref()).unwrap();
        assert_eq!(to_document_text(&again), text);
    }
}

#[test]
fn missing_file_error_names_the_path() {
    let err = load_ontology("/no/such/ontology.toml").unwrap_err();
    assert!(matches!(err, LoadError::Io { .. }));
    assert!(err.to_string().contains("/no/such/ontology.toml"));
}

#[test]
fn task_ontology_needs_its_domain() {
    let path = sample::data_dir().join("railway_task.toml");
    let err = load_ontology(&path).unwrap_err();
    match err {
        LoadError::Invalid { report, .. } => assert!(!report.is_clean()),
        other => panic!("unexpected {other}"),
    }
    let domain = sample::domain_ontology();
    load_ontology_with(&path, &[&domain]).unwrap();
}

#[test]
fn invalid_document_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        "format_version = 1\nname = \"x\"\nkind = \"domain\"\n[[concepts]]\nname = 3\n",
    )
    .unwrap();
    let err = load_ontology(&path).unwrap_err();
    match err {
        LoadError::Parse {
            position: Some(p), ..
        } => assert_eq!(p.line, 5),
        other => panic!("unexpected {other}"),
    }
}
