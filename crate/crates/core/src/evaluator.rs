//! Token-level scoring of interpreted utterances against gold labels.
//!
//! Counts follow the usual four-row layout: correct (a), incorrect (b), not
//! recognized (c) and total (d). Precision is `a / (a + b)` and the reported
//! "F-measure" is `a / d`. A conventional harmonic-mean F1 of those two is
//! also emitted as `f1_conventional`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write};
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::annotator::AnnotationStatus;
use crate::corpus::GoldCorpus;
use crate::interpreter::{FinalLabel, InterpretedToken, InterpretedUtterance};
use crate::ontology::SEMANTIC_RELATION_LABEL;
use crate::scalar::{format_decimal, Exact, Rounding, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("utterance `{0}` is in the gold corpus but was not predicted")]
    MissingPrediction(String),
    #[error("utterance `{0}` was predicted but is not in the gold corpus")]
    UnexpectedPrediction(String),
    #[error("utterance `{id}`: {predicted} predicted tokens, {gold} gold tokens")]
    TokenCount {
        id: String,
        predicted: usize,
        gold: usize,
    },
    #[error(
        "utterance `{id}` token {index}: predicted surface `{predicted}`, gold surface `{gold}`"
    )]
    SurfaceMismatch {
        id: String,
        index: usize,
        predicted: String,
        gold: String,
    },
    #[error("inconsistent counts: {correct} + {incorrect} + {not_recognized} != {total}")]
    InconsistentCounts {
        correct: u64,
        incorrect: u64,
        not_recognized: u64,
        total: u64,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EvaluationCounts {
    pub correct: u64,
    pub incorrect: u64,
    pub not_recognized: u64,
    pub total: u64,
}

impl EvaluationCounts {
    pub fn new(correct: u64, incorrect: u64, not_recognized: u64) -> Self {
        Self {
            correct,
            incorrect,
            not_recognized,
            total: correct + incorrect + not_recognized,
        }
    }

    /// Builds counts from all four values, checking `a + b + c = d`.
    pub fn from_parts(
        correct: u64,
        incorrect: u64,
        not_recognized: u64,
        total: u64,
    ) -> Result<Self, EvalError> {
        let sum = correct
            .checked_add(incorrect)
            .and_then(|s| s.checked_add(not_recognized));
        if sum != Some(total) {
            return Err(EvalError::InconsistentCounts {
                correct,
                incorrect,
                not_recognized,
                total,
            });
        }
        Ok(Self::new(correct, incorrect, not_recognized))
    }

    pub fn record(&mut self, outcome: TokenOutcome) {
        match outcome {
            TokenOutcome::Correct => self.correct += 1,
            TokenOutcome::Incorrect => self.incorrect += 1,
            TokenOutcome::NotRecognized => self.not_recognized += 1,
        }
        self.total += 1;
    }

    /// Tokens that received a committed label: `a + b`.
    pub fn annotated(&self) -> u64 {
        self.correct + self.incorrect
    }
}

impl Add for EvaluationCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            correct: self.correct + rhs.correct,
            incorrect: self.incorrect + rhs.incorrect,
            not_recognized: self.not_recognized + rhs.not_recognized,
            total: self.total + rhs.total,
        }
    }
}

impl AddAssign for EvaluationCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sum for EvaluationCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), Add::add)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics<T> {
    /// `a / (a + b)`; `None` when nothing was annotated.
    pub precision: Option<T>,
    /// `a / d`; `None` on an empty corpus.
    pub f_measure: Option<T>,
    /// Harmonic mean of the two above; `None` when either is absent or both
    /// are zero.
    pub f1_conventional: Option<T>,
}

/// Computes the metrics of `counts` in scalar type `T`.
pub fn metrics<T: Scalar>(counts: &EvaluationCounts) -> Metrics<T> {
    let precision = T::ratio(counts.correct, counts.annotated());
    let f_measure = T::ratio(counts.correct, counts.total);
    let f1_conventional = match (&precision, &f_measure) {
        (Some(p), Some(r)) => {
            let sum = p.clone() + r.clone();
            (!sum.is_zero()).then(|| T::from_count(2) * p.clone() * r.clone() / sum)
        }
        _ => None,
    };
    Metrics {
        precision,
        f_measure,
        f1_conventional,
    }
}

/// How an ambiguous token left unresolved is scored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnresolvedScoring {
    #[default]
    NotRecognized,
    Incorrect,
}

impl FromStr for UnresolvedScoring {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "not-recognized" => Ok(UnresolvedScoring::NotRecognized),
            "incorrect" => Ok(UnresolvedScoring::Incorrect),
            other => Err(format!(
                "unknown unresolved scoring `{other}` (expected not-recognized or incorrect)"
            )),
        }
    }
}

impl fmt::Display for UnresolvedScoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnresolvedScoring::NotRecognized => "not-recognized",
            UnresolvedScoring::Incorrect => "incorrect",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScoringPolicy {
    pub unresolved: UnresolvedScoring,
    /// Score relation-marker tokens (gold label `Semantic_Relation`).
    pub include_relation_markers: bool,
}

impl Default for ScoringPolicy {
    fn default() -> Self {
        Self {
            unresolved: UnresolvedScoring::NotRecognized,
            include_relation_markers: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenOutcome {
    Correct,
    Incorrect,
    NotRecognized,
}

/// Scores one predicted token against its gold label.
pub fn score_token(
    predicted: &FinalLabel,
    gold_label: &str,
    policy: &ScoringPolicy,
) -> TokenOutcome {
    match predicted {
        FinalLabel::Unresolved(_) if policy.unresolved == UnresolvedScoring::Incorrect => {
            TokenOutcome::Incorrect
        }
        FinalLabel::Unresolved(_) | FinalLabel::NotRecognized => TokenOutcome::NotRecognized,
        committed => {
            if committed.committed() == Some(gold_label) {
                TokenOutcome::Correct
            } else {
                TokenOutcome::Incorrect
            }
        }
    }
}

/// One scored token, aligned with its gold label.
struct Scored<'a> {
    token: &'a InterpretedToken,
    gold: &'a str,
    outcome: TokenOutcome,
}

fn align<'a>(
    predicted: &'a [InterpretedUtterance],
    gold: &'a GoldCorpus,
    policy: &ScoringPolicy,
) -> Result<Vec<Scored<'a>>, EvalError> {
    let by_id: HashMap<&str, &InterpretedUtterance> =
        predicted.iter().map(|u| (u.id.as_str(), u)).collect();
    for u in predicted {
        if gold.get(&u.id).is_none() {
            return Err(EvalError::UnexpectedPrediction(u.id.clone()));
        }
    }
    let mut out = Vec::new();
    for g in &gold.utterances {
        let p = by_id
            .get(g.id.as_str())
            .ok_or_else(|| EvalError::MissingPrediction(g.id.clone()))?;
        if p.tokens.len() != g.tokens.len() {
            return Err(EvalError::TokenCount {
                id: g.id.clone(),
                predicted: p.tokens.len(),
                gold: g.tokens.len(),
            });
        }
        for (index, (pt, gt)) in p.tokens.iter().zip(&g.tokens).enumerate() {
            if pt.surface() != gt.surface {
                return Err(EvalError::SurfaceMismatch {
                    id: g.id.clone(),
                    index,
                    predicted: pt.surface().to_owned(),
                    gold: gt.surface.clone(),
                });
            }
            if !policy.include_relation_markers && gt.label == SEMANTIC_RELATION_LABEL {
                continue;
            }
            out.push(Scored {
                token: pt,
                gold: &gt.label,
                outcome: score_token(&pt.final_label, &gt.label, policy),
            });
        }
    }
    Ok(out)
}

/// Aligns predictions with gold utterances by id and counts outcomes.
pub fn compare(
    predicted: &[InterpretedUtterance],
    gold: &GoldCorpus,
    policy: &ScoringPolicy,
) -> Result<EvaluationCounts, EvalError> {
    let mut counts = EvaluationCounts::default();
    for scored in align(predicted, gold, policy)? {
        counts.record(scored.outcome);
    }
    Ok(counts)
}

/// A ratio rendered exactly and at the two display precisions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Score {
    pub exact: String,
    pub rounded: String,
    pub truncated: String,
}

impl Score {
    pub fn from_exact(value: &Exact) -> Self {
        Self {
            exact: format!("{}/{}", value.numer(), value.denom()),
            rounded: format_decimal(value, 4, Rounding::HalfUp),
            truncated: format_decimal(value, 2, Rounding::Truncate),
        }
    }

    fn of(value: Option<Exact>) -> Option<Self> {
        value.as_ref().map(Self::from_exact)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScoreSet {
    pub precision: Option<Score>,
    pub f_measure: Option<Score>,
    pub f1_conventional: Option<Score>,
}

impl From<&EvaluationCounts> for ScoreSet {
    fn from(counts: &EvaluationCounts) -> Self {
        let m = metrics::<Exact>(counts);
        Self {
            precision: Score::of(m.precision),
            f_measure: Score::of(m.f_measure),
            f1_conventional: Score::of(m.f1_conventional),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConceptRow {
    pub counts: EvaluationCounts,
    pub precision: Option<Score>,
    /// Predicted label (or `<not_recognized>` / `<unresolved>`) -> count.
    pub predicted_as: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvaluationReport {
    pub policy: ScoringPolicy,
    pub counts: EvaluationCounts,
    pub scores: ScoreSet,
    /// Precision over tokens that received exactly one label at annotation.
    pub single_label_precision: Option<Score>,
    pub single_label_counts: EvaluationCounts,
    /// Rows keyed by gold label.
    pub per_concept: BTreeMap<String, ConceptRow>,
}

fn predicted_key(label: &FinalLabel) -> String {
    match label {
        FinalLabel::Unresolved(_) => "<unresolved>".into(),
        FinalLabel::NotRecognized => "<not_recognized>".into(),
        other => other.committed().unwrap_or_default().to_owned(),
    }
}

impl EvaluationReport {
    /// Builds a report from counts alone, without breakdowns.
    pub fn from_counts(counts: EvaluationCounts) -> Self {
        Self {
            policy: ScoringPolicy::default(),
            counts,
            scores: ScoreSet::from(&counts),
            single_label_precision: None,
            single_label_counts: EvaluationCounts::default(),
            per_concept: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// Human-readable summary in the four-count layout.
    pub fn table(&self) -> String {
        let c = &self.counts;
        let show = |s: &Option<Score>| match s {
            Some(s) => format!("{:<6} ({})", s.truncated, s.rounded),
            None => "n/a".to_owned(),
        };
        let mut out = String::new();
        writeln!(
            out,
            "{:<22}{:<12}{:>6}",
            "Correct Annotation", "(a)", c.correct
        )
        .unwrap();
        writeln!(
            out,
            "{:<22}{:<12}{:>6}",
            "Incorrect Annotation", "(b)", c.incorrect
        )
        .unwrap();
        writeln!(
            out,
            "{:<22}{:<12}{:>6}",
            "Not Recognized", "(c)", c.not_recognized
        )
        .unwrap();
        writeln!(out, "{:<22}{:<12}{:>6}", "Total", "(d)", c.total).unwrap();
        writeln!(
            out,
            "{:<22}{:<12}{}",
            "F-Measure",
            "(a / d)",
            show(&self.scores.f_measure)
        )
        .unwrap();
        writeln!(
            out,
            "{:<22}{:<12}{}",
            "Precision",
            "(a/(a+b))",
            show(&self.scores.precision)
        )
        .unwrap();
        if !self.per_concept.is_empty() {
            writeln!(out).unwrap();
            writeln!(
                out,
                "{:<24}{:>5}{:>5}{:>5}{:>5}  precision",
                "label", "a", "b", "c", "d"
            )
            .unwrap();
            for (label, row) in &self.per_concept {
                let rc = &row.counts;
                writeln!(
                    out,
                    "{:<24}{:>5}{:>5}{:>5}{:>5}  {}",
                    label,
                    rc.correct,
                    rc.incorrect,
                    rc.not_recognized,
                    rc.total,
                    row.precision.as_ref().map_or("n/a", |s| s.rounded.as_str())
                )
                .unwrap();
            }
            writeln!(
                out,
                "single-label precision: {}",
                self.single_label_precision
                    .as_ref()
                    .map_or("n/a", |s| s.rounded.as_str())
            )
            .unwrap();
        }
        out
    }
}

/// Full evaluation: counts, scores, per-gold-label breakdown and the
/// single-label slice.
pub fn report(
    predicted: &[InterpretedUtterance],
    gold: &GoldCorpus,
    policy: &ScoringPolicy,
) -> Result<EvaluationReport, EvalError> {
    let scored = align(predicted, gold, policy)?;
    let mut counts = EvaluationCounts::default();
    let mut single = EvaluationCounts::default();
    let mut rows: BTreeMap<String, (EvaluationCounts, BTreeMap<String, u64>)> = BTreeMap::new();
    for s in &scored {
        counts.record(s.outcome);
        if s.token.annotation.status == AnnotationStatus::Labeled {
            single.record(s.outcome);
        }
        let row = rows.entry(s.gold.to_owned()).or_default();
        row.0.record(s.outcome);
        *row.1
            .entry(predicted_key(&s.token.final_label))
            .or_default() += 1;
    }
    let per_concept = rows
        .into_iter()
        .map(|(label, (counts, predicted_as))| {
            let precision = Score::of(Exact::ratio(counts.correct, counts.annotated()));
            (
                label,
                ConceptRow {
                    counts,
                    precision,
                    predicted_as,
                },
            )
        })
        .collect();
    Ok(EvaluationReport {
        policy: *policy,
        counts,
        scores: ScoreSet::from(&counts),
        single_label_precision: Score::of(Exact::ratio(single.correct, single.annotated())),
        single_label_counts: single,
        per_concept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotator::TokenAnnotation;
    use crate::corpus::{GoldToken, GoldUtterance};
    use crate::ontology::ConceptLabel;
    use std::collections::BTreeSet;

    fn token(surface: &str, label: FinalLabel, status: AnnotationStatus) -> InterpretedToken {
        let mut annotation = TokenAnnotation::new(surface, BTreeSet::new(), BTreeSet::new());
        annotation.status = status;
        InterpretedToken {
            annotation,
            final_label: label,
        }
    }

    fn concept(name: &str) -> FinalLabel {
        FinalLabel::Concept(ConceptLabel::new(name))
    }

    fn utterance(id: &str, tokens: Vec<InterpretedToken>) -> InterpretedUtterance {
        InterpretedUtterance {
            id: id.into(),
            tokens,
            resolutions: vec![],
            consumed_relations: Default::default(),
        }
    }

    fn gold(id: &str, pairs: &[(&str, &str)]) -> GoldCorpus {
        GoldCorpus {
            utterances: vec![GoldUtterance {
                id: id.into(),
                tokens: pairs
                    .iter()
                    .map(|(s, l)| GoldToken {
                        surface: (*s).into(),
                        label: (*l).into(),
                    })
                    .collect(),
            }],
        }
    }

    #[test]
    fn table_two_arithmetic() {
        let counts = EvaluationCounts::from_parts(448, 14, 208, 670).unwrap();
        let m = metrics::<f64>(&counts);
        assert!((m.precision.unwrap() - 0.9697).abs() < 1e-4);
        assert!((m.f_measure.unwrap() - 0.6687).abs() < 1e-4);
        let s = ScoreSet::from(&counts);
        assert_eq!(s.precision.as_ref().unwrap().truncated, "0.96");
        assert_eq!(s.f_measure.as_ref().unwrap().truncated, "0.66");
        assert_eq!(s.precision.unwrap().rounded, "0.9697");
        assert_eq!(s.f_measure.unwrap().rounded, "0.6687");
    }

    #[test]
    fn metrics_agree_across_scalar_types() {
        let counts = EvaluationCounts::new(448, 14, 208);
        let exact = metrics::<Exact>(&counts);
        assert_eq!(exact.precision, Some(Exact::new(448, 462)));
        assert_eq!(exact.f_measure, Some(Exact::new(448, 670)));
        let f32m = metrics::<f32>(&counts);
        assert!((f32m.precision.unwrap() - 448.0 / 462.0).abs() < 1e-6);
        // 2PR/(P+R) with P = a/(a+b), R = a/d reduces to 2a/(a+b+d).
        assert_eq!(exact.f1_conventional, Some(Exact::new(2 * 448, 462 + 670)));
    }

    #[test]
    fn perfect_and_empty_runs() {
        let m = metrics::<f64>(&EvaluationCounts::new(7, 0, 0));
        assert_eq!((m.precision, m.f_measure), (Some(1.0), Some(1.0)));
        let m = metrics::<f64>(&EvaluationCounts::new(0, 0, 5));
        assert_eq!((m.precision, m.f_measure), (None, Some(0.0)));
        assert_eq!(m.f1_conventional, None);
        let m = metrics::<f64>(&EvaluationCounts::default());
        assert_eq!(m.f_measure, None);
    }

    #[test]
    fn inconsistent_counts_rejected() {
        assert!(EvaluationCounts::from_parts(1, 1, 1, 4).is_err());
    }

    #[test]
    fn all_correct_three_tokens() {
        let p = vec![utterance(
            "u",
            vec![
                token("a", concept("Train"), AnnotationStatus::Labeled),
                token("b", FinalLabel::Relation, AnnotationStatus::RelationMarker),
                token("c", concept("Arrival_City"), AnnotationStatus::Ambiguous),
            ],
        )];
        let g = gold(
            "u",
            &[
                ("a", "Train"),
                ("b", "Semantic_Relation"),
                ("c", "Arrival_City"),
            ],
        );
        let counts = compare(&p, &g, &ScoringPolicy::default()).unwrap();
        assert_eq!(counts, EvaluationCounts::from_parts(3, 0, 0, 3).unwrap());
    }

    fn five_token_case() -> (Vec<InterpretedUtterance>, GoldCorpus) {
        let p = vec![utterance(
            "u",
            vec![
                token("a", concept("Train"), AnnotationStatus::Labeled),
                token("b", concept("Departure_City"), AnnotationStatus::Ambiguous),
                token(
                    "c",
                    FinalLabel::NotRecognized,
                    AnnotationStatus::NotRecognized,
                ),
                token("d", FinalLabel::Relation, AnnotationStatus::RelationMarker),
                token("e", concept("Ticket"), AnnotationStatus::Labeled),
            ],
        )];
        let g = gold(
            "u",
            &[
                ("a", "Train"),
                ("b", "Arrival_City"),
                ("c", "None"),
                ("d", "Semantic_Relation"),
                ("e", "Ticket"),
            ],
        );
        (p, g)
    }

    #[test]
    fn five_tokens_one_wrong_one_oov() {
        // Hand count: a, d, e correct; b wrong; c unknown.
        let (p, g) = five_token_case();
        let counts = compare(&p, &g, &ScoringPolicy::default()).unwrap();
        assert_eq!(counts, EvaluationCounts::from_parts(3, 1, 1, 5).unwrap());
        let without_markers = ScoringPolicy {
            include_relation_markers: false,
            ..ScoringPolicy::default()
        };
        assert_eq!(
            compare(&p, &g, &without_markers).unwrap(),
            EvaluationCounts::new(2, 1, 1)
        );
    }

    #[test]
    fn unresolved_policy() {
        let cands: BTreeSet<ConceptLabel> =
            ["A", "B"].into_iter().map(ConceptLabel::from).collect();
        let u = FinalLabel::Unresolved(cands);
        assert_eq!(
            score_token(&u, "A", &ScoringPolicy::default()),
            TokenOutcome::NotRecognized
        );
        let policy = ScoringPolicy {
            unresolved: UnresolvedScoring::Incorrect,
            ..ScoringPolicy::default()
        };
        assert_eq!(score_token(&u, "A", &policy), TokenOutcome::Incorrect);
        assert_eq!(
            score_token(&concept("X"), "None", &policy),
            TokenOutcome::Incorrect
        );
        assert_eq!(
            score_token(&FinalLabel::NotRecognized, "None", &policy),
            TokenOutcome::NotRecognized
        );
    }

    #[test]
    fn alignment_errors() {
        let g = gold("u", &[("a", "Train")]);
        assert_eq!(
            compare(&[], &g, &ScoringPolicy::default()),
            Err(EvalError::MissingPrediction("u".into()))
        );
        let p = vec![utterance("u", vec![])];
        assert!(matches!(
            compare(&p, &g, &ScoringPolicy::default()),
            Err(EvalError::TokenCount { .. })
        ));
        let p = vec![utterance(
            "u",
            vec![token("z", concept("Train"), AnnotationStatus::Labeled)],
        )];
        assert!(matches!(
            compare(&p, &g, &ScoringPolicy::default()),
            Err(EvalError::SurfaceMismatch { .. })
        ));
        let p = vec![
            utterance(
                "u",
                vec![token("a", concept("Train"), AnnotationStatus::Labeled)],
            ),
            utterance("v", vec![]),
        ];
        assert_eq!(
            compare(&p, &g, &ScoringPolicy::default()),
            Err(EvalError::UnexpectedPrediction("v".into()))
        );
    }

    #[test]
    fn report_breakdowns() {
        let (p, g) = five_token_case();
        let r = report(&p, &g, &ScoringPolicy::default()).unwrap();
        assert_eq!(r.counts, EvaluationCounts::new(3, 1, 1));
        // Single-label slice: a and e, both right.
        assert_eq!(r.single_label_counts, EvaluationCounts::new(2, 0, 0));
        assert_eq!(r.single_label_precision.as_ref().unwrap().rounded, "1.0000");
        let arrival = &r.per_concept["Arrival_City"];
        assert_eq!(arrival.counts, EvaluationCounts::new(0, 1, 0));
        assert_eq!(arrival.predicted_as["Departure_City"], 1);
        assert_eq!(r.per_concept["None"].predicted_as["<not_recognized>"], 1);
        assert!(r.table().contains("Correct Annotation"));
    }

    #[test]
    fn perfect_report_has_unit_precision_everywhere() {
        let p = vec![utterance(
            "u",
            vec![
                token("a", concept("Train"), AnnotationStatus::Labeled),
                token("b", FinalLabel::Relation, AnnotationStatus::RelationMarker),
            ],
        )];
        let g = gold("u", &[("a", "Train"), ("b", "Semantic_Relation")]);
        let r = report(&p, &g, &ScoringPolicy::default()).unwrap();
        for row in r.per_concept.values() {
            assert_eq!(row.precision.as_ref().unwrap().exact, "1/1");
        }
    }

    #[test]
    fn table_from_counts_shows_truncated_values() {
        let r = EvaluationReport::from_counts(EvaluationCounts::new(448, 14, 208));
        let t = r.table();
        assert!(t.contains("0.96"), "{t}");
        assert!(t.contains("0.66"), "{t}");
        assert!(t.contains("670"));
    }
}
