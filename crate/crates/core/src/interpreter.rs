//! Within-utterance disambiguation of multi-label tokens.
//!
//! An ambiguous token takes the target concept of the closest relation
//! marker in the same utterance whose target is among its candidates. A
//! marker occurrence that resolved a token is consumed and ignored for the
//! tokens after it. Ambiguous tokens are processed left to right.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::annotator::{AnnotatedUtterance, AnnotationStatus, TokenAnnotation};
use crate::ontology::{ConceptLabel, Ontologies, RelationId, SEMANTIC_RELATION_LABEL};

/// Which marker wins when two qualifying markers are equally close.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    /// Prefer the marker preceding the ambiguous token.
    #[default]
    Left,
    /// Prefer the marker following the ambiguous token.
    Right,
}

impl FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(TieBreak::Left),
            "right" => Ok(TieBreak::Right),
            other => Err(format!(
                "unknown tie-break `{other}` (expected left or right)"
            )),
        }
    }
}

impl fmt::Display for TieBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieBreak::Left => "left",
            TieBreak::Right => "right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Resolved {
        label: ConceptLabel,
        relation: RelationId,
        marker_index: usize,
    },
    Unresolved {
        candidates: BTreeSet<ConceptLabel>,
    },
    Unchanged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub token_index: usize,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Marker occurrences already used, keyed by token index.
pub type Consumed = BTreeMap<usize, RelationId>;

/// Final label of an interpreted token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum FinalLabel {
    Concept(ConceptLabel),
    /// The token is a relation marker.
    Relation,
    Unresolved(BTreeSet<ConceptLabel>),
    NotRecognized,
}

impl FinalLabel {
    /// The committed label, if any: a concept name or `Semantic_Relation`.
    pub fn committed(&self) -> Option<&str> {
        match self {
            FinalLabel::Concept(c) => Some(c.as_str()),
            FinalLabel::Relation => Some(SEMANTIC_RELATION_LABEL),
            FinalLabel::Unresolved(_) | FinalLabel::NotRecognized => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterpretedToken {
    pub annotation: TokenAnnotation,
    pub final_label: FinalLabel,
}

impl InterpretedToken {
    pub fn surface(&self) -> &str {
        &self.annotation.surface
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterpretedUtterance {
    pub id: String,
    pub tokens: Vec<InterpretedToken>,
    /// One entry per token, in token order.
    pub resolutions: Vec<Resolution>,
    pub consumed_relations: Consumed,
}

/// Resolves the ambiguous token at `index` against the unconsumed markers of
/// the utterance. On success the marker occurrence is added to `consumed`.
/// A token with fewer than two candidates is left unchanged.
pub fn resolve_token(
    index: usize,
    annotated: &AnnotatedUtterance,
    ontologies: &Ontologies,
    consumed: &mut Consumed,
    tie_break: TieBreak,
) -> Resolution {
    let candidates = &annotated.tokens[index].labels;
    if candidates.len() < 2 {
        return Resolution {
            token_index: index,
            outcome: Outcome::Unchanged,
        };
    }

    let mut markers: Vec<usize> = annotated
        .tokens
        .iter()
        .enumerate()
        .filter(|&(j, t)| j != index && t.is_marker() && !consumed.contains_key(&j))
        .map(|(j, _)| j)
        .collect();
    markers.sort_by_key(|&j| {
        let preferred = match tie_break {
            TieBreak::Left => j < index,
            TieBreak::Right => j > index,
        };
        (j.abs_diff(index), !preferred)
    });

    for marker in markers {
        for relation in &annotated.tokens[marker].relation_ids {
            let Ok(target) = ontologies.relation_target(relation.as_str()) else {
                continue;
            };
            if candidates.contains(target) {
                consumed.insert(marker, relation.clone());
                return Resolution {
                    token_index: index,
                    outcome: Outcome::Resolved {
                        label: target.clone(),
                        relation: relation.clone(),
                        marker_index: marker,
                    },
                };
            }
        }
    }
    Resolution {
        token_index: index,
        outcome: Outcome::Unresolved {
            candidates: candidates.clone(),
        },
    }
}

/// Interprets one annotated utterance. Never reads anything outside it.
pub fn interpret(
    annotated: &AnnotatedUtterance,
    ontologies: &Ontologies,
    tie_break: TieBreak,
) -> InterpretedUtterance {
    let mut consumed = Consumed::new();
    let mut tokens = Vec::with_capacity(annotated.tokens.len());
    let mut resolutions = Vec::with_capacity(annotated.tokens.len());

    for (i, annotation) in annotated.tokens.iter().enumerate() {
        let resolution = resolve_token(i, annotated, ontologies, &mut consumed, tie_break);
        let final_label = match (&resolution.outcome, annotation.status) {
            (Outcome::Resolved { label, .. }, _) => FinalLabel::Concept(label.clone()),
            (Outcome::Unresolved { candidates }, _) => FinalLabel::Unresolved(candidates.clone()),
            (Outcome::Unchanged, AnnotationStatus::RelationMarker) => FinalLabel::Relation,
            (Outcome::Unchanged, AnnotationStatus::NotRecognized) => FinalLabel::NotRecognized,
            (Outcome::Unchanged, _) => match annotation.labels.first() {
                Some(label) => FinalLabel::Concept(label.clone()),
                None => FinalLabel::NotRecognized,
            },
        };
        tokens.push(InterpretedToken {
            annotation: annotation.clone(),
            final_label,
        });
        resolutions.push(resolution);
    }

    InterpretedUtterance {
        id: annotated.id.clone(),
        tokens,
        resolutions,
        consumed_relations: consumed,
    }
}
