//! Oracles, generators and property checks shared by the integration tests
//! and the acceptance runner.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;

use onto_slu::annotator::{annotate_token, AnnotatedUtterance, TokenAnnotation};
use onto_slu::corpus::{GoldCorpus, GoldToken, GoldUtterance, NO_LABEL};
use onto_slu::interpreter::{resolve_token, Consumed, FinalLabel, Outcome};
use onto_slu::io::{load_ontology, parse_ontology, save_ontology, to_document_text};
use onto_slu::ontology::{
    Concept, Instance, OntologyHeader, OntologyKind, SemanticRelation, TaxonomyEdge,
    SEMANTIC_RELATION_LABEL,
};
use onto_slu::{
    compare, interpret, normalize, sample, Ontologies, Ontology, Pipeline, RawUtterance,
    ScoringPolicy, TieBreak, UnresolvedScoring,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

// ---------------------------------------------------------------------------
// Brute-force interpretation oracle

/// What the oracle decides for one ambiguous token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Resolved {
        label: String,
        relation: String,
        marker: usize,
    },
    Unresolved,
}

/// Considers every (marker occurrence, relation) pair whose target is a
/// candidate and keeps the minimum under (distance, side, relation id).
pub fn oracle_resolve(
    index: usize,
    tokens: &[TokenAnnotation],
    ontologies: &Ontologies,
    consumed: &BTreeSet<usize>,
    tie_break: TieBreak,
) -> Expected {
    let candidates: BTreeSet<String> = tokens[index]
        .labels
        .iter()
        .map(|l| l.as_str().to_owned())
        .collect();
    let mut pairs = Vec::new();
    for (m, token) in tokens.iter().enumerate() {
        if m == index || consumed.contains(&m) {
            continue;
        }
        for rel in &token.relation_ids {
            let target = ontologies.relation_target(rel.as_str()).unwrap().as_str();
            if candidates.contains(target) {
                let distance = m.abs_diff(index);
                let preferred_side = match tie_break {
                    TieBreak::Left => m > index,
                    TieBreak::Right => m < index,
                };
                pairs.push((
                    distance,
                    preferred_side,
                    rel.as_str().to_owned(),
                    m,
                    target.to_owned(),
                ));
            }
        }
    }
    match pairs.into_iter().min() {
        Some((_, _, relation, marker, label)) => Expected::Resolved {
            label,
            relation,
            marker,
        },
        None => Expected::Unresolved,
    }
}

/// Left-to-right application of [`oracle_resolve`] with per-occurrence
/// consumption. One entry per token: `None` for tokens with fewer than two
/// candidates.
pub fn oracle_interpret(
    tokens: &[TokenAnnotation],
    ontologies: &Ontologies,
    tie_break: TieBreak,
) -> Vec<Option<Expected>> {
    let mut consumed = BTreeSet::new();
    let mut out = Vec::new();
    for i in 0..tokens.len() {
        if tokens[i].labels.len() < 2 {
            out.push(None);
            continue;
        }
        let e = oracle_resolve(i, tokens, ontologies, &consumed, tie_break);
        if let Expected::Resolved { marker, .. } = &e {
            consumed.insert(*marker);
        }
        out.push(Some(e));
    }
    out
}

fn to_expected(outcome: &Outcome) -> Option<Expected> {
    match outcome {
        Outcome::Resolved {
            label,
            relation,
            marker_index,
        } => Some(Expected::Resolved {
            label: label.as_str().to_owned(),
            relation: relation.as_str().to_owned(),
            marker: *marker_index,
        }),
        Outcome::Unresolved { .. } => Some(Expected::Unresolved),
        Outcome::Unchanged => None,
    }
}

/// A small ontology pair where one marker (`x`) triggers two relations and
/// every ambiguous word shares a candidate with some relation target.
pub fn synthetic_ontologies() -> Ontologies {
    let concepts = ["A", "B", "C", "D", "S"].map(Concept::new).to_vec();
    let domain = Ontology::new(
        OntologyHeader::new("synthetic_domain", OntologyKind::Domain),
        concepts,
        vec![],
        vec![
            Instance::new("ab", ["A", "B"]),
            Instance::new("bc", ["B", "C"]),
            Instance::new("cd", ["C", "D"]),
        ],
        vec![
            SemanticRelation::new("r_a", ["x"], "S", "A"),
            SemanticRelation::new("r_c", ["x"], "S", "C"),
            SemanticRelation::new("r_b", ["y"], "S", "B"),
            SemanticRelation::new("r_d", ["z"], "S", "D"),
        ],
    );
    let mut header = OntologyHeader::new("synthetic_task", OntologyKind::Task);
    header.depends_on = Some("synthetic_domain".into());
    let task = Ontology::new(header, vec![], vec![], vec![], vec![]);
    Ontologies::new(domain, task).expect("synthetic pair validates")
}

pub const SYNTHETIC_ALPHABET: [&str; 7] = ["ab", "bc", "cd", "x", "y", "z", "q"];

/// Visits every word sequence over `alphabet` of length 1 to `max_len`.
pub fn for_each_sequence(alphabet: &[&str], max_len: usize, mut f: impl FnMut(&[&str])) {
    let mut seq: Vec<&str> = Vec::with_capacity(max_len);
    fn go<'a>(
        alphabet: &[&'a str],
        max_len: usize,
        seq: &mut Vec<&'a str>,
        f: &mut dyn FnMut(&[&str]),
    ) {
        if !seq.is_empty() {
            f(seq);
        }
        if seq.len() == max_len {
            return;
        }
        for w in alphabet {
            seq.push(w);
            go(alphabet, max_len, seq, f);
            seq.pop();
        }
    }
    go(alphabet, max_len, &mut seq, &mut f);
}

fn annotated(words: &[&str], ontologies: &Ontologies) -> AnnotatedUtterance {
    AnnotatedUtterance {
        id: "e".into(),
        tokens: words
            .iter()
            .map(|w| annotate_token(w, ontologies))
            .collect(),
        warnings: vec![],
    }
}

/// Compares the interpreter with the oracle on every utterance of at most
/// `max_len` tokens over the synthetic alphabet, under both tie-breaks.
/// Returns the number of utterances checked.
pub fn check_oracle_enumeration(max_len: usize) -> Result<usize, String> {
    let o = synthetic_ontologies();
    let mut checked = 0;
    let mut failure = None;
    for_each_sequence(&SYNTHETIC_ALPHABET, max_len, |words| {
        if failure.is_some() {
            return;
        }
        checked += 1;
        let a = annotated(words, &o);
        for tie in [TieBreak::Left, TieBreak::Right] {
            // Each ambiguous token in isolation, nothing consumed.
            for i in 0..words.len() {
                if a.tokens[i].labels.len() < 2 {
                    continue;
                }
                let got = resolve_token(i, &a, &o, &mut Consumed::new(), tie);
                let want = oracle_resolve(i, &a.tokens, &o, &BTreeSet::new(), tie);
                if to_expected(&got.outcome) != Some(want.clone()) {
                    failure = Some(format!(
                        "{words:?} token {i} ({tie}): got {:?}, oracle {want:?}",
                        got.outcome
                    ));
                    return;
                }
            }
            // The whole utterance, with consumption.
            let got = interpret(&a, &o, tie);
            let got: Vec<Option<Expected>> = got
                .resolutions
                .iter()
                .map(|r| to_expected(&r.outcome))
                .collect();
            let want = oracle_interpret(&a.tokens, &o, tie);
            if got != want {
                failure = Some(format!("{words:?} ({tie}): got {got:?}, oracle {want:?}"));
                return;
            }
        }
    });
    match failure {
        Some(f) => Err(f),
        None => Ok(checked),
    }
}

// ---------------------------------------------------------------------------
// Generators

/// Words a raw utterance may be built from: ontology surfaces and triggers,
/// variant spellings, compound parts, clitic-attached forms, Arabic-script
/// forms and out-of-vocabulary noise.
pub fn lexicon() -> Vec<String> {
    let o = sample::ontologies();
    let t = sample::tables();
    let mut words: BTreeSet<String> = BTreeSet::new();
    for ont in o.iter() {
        words.extend(ont.instances().iter().map(|i| i.surface.clone()));
        for r in ont.relations() {
            words.extend(r.triggers.iter().cloned());
        }
    }
    words.extend(t.variants().keys().cloned());
    for c in t.compounds() {
        words.insert(c.tokens.join(" "));
        words.extend(c.tokens.iter().cloned());
    }
    let stems: Vec<String> = words.iter().take(12).cloned().collect();
    for prefix in t.clitics().keys() {
        for stem in &stems {
            words.insert(format!("{prefix}{stem}"));
        }
        words.insert(format!("{prefix}twns"));
        words.insert(format!("{prefix}sfAqs"));
    }
    for w in ["Euh", "Ahh", "nHb", "wlA", "xyz", "l", "m", "mn"] {
        words.insert(w.into());
    }
    for w in [
        "التران",
        "لتونس",
        "ساعة",
        "إلماضي",
        "وقتاش",
        "كلاس",
        "أن",
        "من",
    ] {
        words.insert(w.into());
    }
    words.into_iter().collect()
}

pub fn raw_text(lexicon: Vec<String>) -> impl Strategy<Value = String> {
    (
        prop::collection::vec(prop::sample::select(lexicon), 0..9),
        prop::sample::select(vec!["", "?", " !", "؟"]),
    )
        .prop_map(|(words, end)| format!("{}{end}", words.join(" ")))
}

fn identifier() -> impl Strategy<Value = String> {
    "[A-Z][a-z]{0,3}(_[A-Z][a-z]{0,3})?"
}

fn surface() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-zA-Z$~'*]{1,7}",
        "[a-zA-Z]{1,4}_[a-zA-Z]{1,4}",
        "[\u{0621}-\u{064A}]{1,5}",
    ]
}

/// Arbitrary ontologies, not necessarily valid: references may dangle.
pub fn ontology() -> impl Strategy<Value = Ontology> {
    let header = (
        identifier(),
        prop::bool::ANY,
        prop::option::of(identifier()),
    )
        .prop_map(|(name, domain, dep)| OntologyHeader {
            name,
            kind: if domain {
                OntologyKind::Domain
            } else {
                OntologyKind::Task
            },
            depends_on: dep,
        });
    let concepts = prop::collection::btree_map(
        identifier(),
        prop::option::of(prop_oneof!["[\u{0621}-\u{064A} ]{1,8}", "[a-z \"'<&]{1,8}"]),
        0..8,
    );
    (header, concepts).prop_flat_map(|(header, concepts)| {
        let labels: Vec<String> = concepts.keys().cloned().collect();
        let pool = if labels.is_empty() {
            vec!["Dangling".to_owned()]
        } else {
            labels.clone()
        };
        let concepts: Vec<Concept> = concepts
            .into_iter()
            .map(|(label, gloss)| match gloss {
                Some(g) => Concept::new(label).with_gloss(g),
                None => Concept::new(label),
            })
            .collect();
        let label = prop::sample::select(pool);
        let taxonomy =
            prop::collection::btree_set((label.clone(), label.clone()), 0..5).prop_map(|edges| {
                edges
                    .into_iter()
                    .map(|(c, p)| TaxonomyEdge::new(c, p))
                    .collect::<Vec<_>>()
            });
        let instances = prop::collection::btree_map(
            surface(),
            prop::collection::btree_set(label.clone(), 0..3),
            0..8,
        )
        .prop_map(|m| {
            m.into_iter()
                .map(|(s, c)| Instance::new(s, c))
                .collect::<Vec<_>>()
        });
        let relations = prop::collection::vec(
            (
                prop::collection::btree_set(surface(), 0..3),
                label.clone(),
                label,
            ),
            0..4,
        )
        .prop_map(|rs| {
            rs.into_iter()
                .enumerate()
                .map(|(i, (triggers, s, t))| {
                    SemanticRelation::new(format!("rel_{i}"), triggers, s, t)
                })
                .collect::<Vec<_>>()
        });
        (Just(header), Just(concepts), taxonomy, instances, relations)
            .prop_map(|(h, c, t, i, r)| Ontology::new(h, c, t, i, r))
    })
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

// ---------------------------------------------------------------------------
// Properties

/// Normalizing the normalized text changes nothing.
pub fn check_normalize_idempotent(cases: u32) -> Result<(), String> {
    let o = sample::ontologies();
    let t = sample::tables();
    runner(cases)
        .run(&raw_text(lexicon()), |text| {
            let once = normalize(&RawUtterance::new("p", text.clone()), &t, &o);
            let twice = normalize(&RawUtterance::new("p", once.to_text()), &t, &o);
            prop_assert_eq!(once.surfaces(), twice.surfaces(), "input `{}`", text);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Resolved labels come from the candidate set, each consumed marker is a
/// marker token used once, and unambiguous tokens keep their label.
pub fn check_soundness_and_consumption(cases: u32) -> Result<(), String> {
    let pipeline = Pipeline::new(sample::ontologies(), sample::tables(), TieBreak::Left);
    let synthetic = synthetic_ontologies();
    let synthetic_words: Vec<String> = SYNTHETIC_ALPHABET.iter().map(|s| s.to_string()).collect();
    let input = prop_oneof![
        raw_text(lexicon()).prop_map(|t| (t, false)),
        prop::collection::vec(prop::sample::select(synthetic_words), 0..12)
            .prop_map(|w| (w.join(" "), true)),
    ];
    runner(cases)
        .run(&(input, prop::bool::ANY), |((text, synth), right)| {
            let tie = if right {
                TieBreak::Right
            } else {
                TieBreak::Left
            };
            let (annotated, o) = if synth {
                let words: Vec<&str> = text.split_whitespace().collect();
                (annotated(&words, &synthetic), &synthetic)
            } else {
                (
                    pipeline.annotate(&RawUtterance::new("p", text)),
                    pipeline.ontologies(),
                )
            };
            let out = interpret(&annotated, o, tie);
            prop_assert_eq!(out.tokens.len(), annotated.tokens.len());
            let mut used = BTreeSet::new();
            let markers = annotated.tokens.iter().filter(|t| t.is_marker()).count();
            for (k, (tok, res)) in out.tokens.iter().zip(&out.resolutions).enumerate() {
                prop_assert_eq!(res.token_index, k);
                let before = &annotated.tokens[k];
                match &res.outcome {
                    Outcome::Resolved {
                        label,
                        relation,
                        marker_index,
                    } => {
                        prop_assert!(before.labels.contains(label));
                        prop_assert!(annotated.tokens[*marker_index].is_marker());
                        prop_assert!(annotated.tokens[*marker_index]
                            .relation_ids
                            .contains(relation));
                        prop_assert!(used.insert(*marker_index), "marker reused");
                        prop_assert_eq!(out.consumed_relations.get(marker_index), Some(relation));
                        prop_assert_eq!(&tok.final_label, &FinalLabel::Concept(label.clone()));
                    }
                    Outcome::Unresolved { candidates } => {
                        prop_assert_eq!(candidates, &before.labels);
                    }
                    Outcome::Unchanged => {
                        prop_assert!(before.labels.len() < 2);
                        let expected = if before.is_marker() {
                            Some(SEMANTIC_RELATION_LABEL)
                        } else {
                            before.labels.iter().next().map(|l| l.as_str())
                        };
                        prop_assert_eq!(tok.final_label.committed(), expected);
                    }
                }
            }
            prop_assert_eq!(out.consumed_relations.len(), used.len());
            prop_assert!(used.len() <= markers);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Saving then loading an ontology gives back an equal ontology.
pub fn check_save_load_round_trip(cases: u32) -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("o.toml");
    runner(cases)
        .run(&ontology(), |o| {
            let text = to_document_text(&o);
            let parsed = parse_ontology(&text, Path::new("mem"))
                .map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(&parsed, &o);
            save_ontology(&o, &path).unwrap();
            // Loading validates, so only compare when the ontology is sound.
            if o.validate().is_clean() {
                prop_assert_eq!(load_ontology(&path).unwrap(), o);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// a + b + c = d, and d counts exactly the scored gold tokens.
pub fn check_count_conservation(cases: u32) -> Result<(), String> {
    let pipeline = Pipeline::new(sample::ontologies(), sample::tables(), TieBreak::Left);
    let mut labels: Vec<String> = pipeline
        .ontologies()
        .iter()
        .flat_map(|o| o.concepts().iter().map(|c| c.label.as_str().to_owned()))
        .collect();
    labels.push(SEMANTIC_RELATION_LABEL.into());
    labels.push(NO_LABEL.into());
    let utterances = prop::collection::vec(raw_text(lexicon()), 1..6);
    let seeds = prop::collection::vec(any::<usize>(), 64);
    runner(cases)
        .run(
            &(utterances, seeds, prop::bool::ANY, prop::bool::ANY),
            |(texts, seeds, strict, markers)| {
                let raws: Vec<RawUtterance> = texts
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| RawUtterance::new(format!("u{i}"), t))
                    .collect();
                let predicted = pipeline.interpret_all(&raws);
                let mut k = 0;
                let mut gold = GoldCorpus::default();
                let mut scored = 0u64;
                for p in &predicted {
                    let tokens = p
                        .tokens
                        .iter()
                        .map(|t| {
                            // Half the time copy the prediction, otherwise a random label.
                            let s = seeds[k % seeds.len()];
                            k += 1;
                            let label = match t.final_label.committed() {
                                Some(l) if s % 2 == 0 => l.to_owned(),
                                _ => labels[s % labels.len()].clone(),
                            };
                            if markers || label != SEMANTIC_RELATION_LABEL {
                                scored += 1;
                            }
                            GoldToken {
                                surface: t.surface().to_owned(),
                                label,
                            }
                        })
                        .collect();
                    gold.utterances.push(GoldUtterance {
                        id: p.id.clone(),
                        tokens,
                    });
                }
                let policy = ScoringPolicy {
                    unresolved: if strict {
                        UnresolvedScoring::Incorrect
                    } else {
                        UnresolvedScoring::NotRecognized
                    },
                    include_relation_markers: markers,
                };
                let c = compare(&predicted, &gold, &policy).unwrap();
                prop_assert_eq!(c.correct + c.incorrect + c.not_recognized, c.total);
                prop_assert_eq!(c.total, scored);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}
