//! Context-free semantic annotation: each normalized token is looked up in
//! both ontologies, independently of its neighbours.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::normalizer::NormalizedUtterance;
use crate::ontology::{ConceptLabel, Ontologies, RelationId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationStatus {
    Labeled,
    Ambiguous,
    RelationMarker,
    NotRecognized,
}

impl AnnotationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationStatus::Labeled => "labeled",
            AnnotationStatus::Ambiguous => "ambiguous",
            AnnotationStatus::RelationMarker => "relation_marker",
            AnnotationStatus::NotRecognized => "not_recognized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenAnnotation {
    pub surface: String,
    pub labels: BTreeSet<ConceptLabel>,
    pub relation_ids: BTreeSet<RelationId>,
    pub status: AnnotationStatus,
}

impl TokenAnnotation {
    /// Derives the status from the label and relation sets. A token that is
    /// both a relation trigger and an instance is treated as a marker and its
    /// labels are dropped.
    pub fn new(
        surface: impl Into<String>,
        labels: BTreeSet<ConceptLabel>,
        relation_ids: BTreeSet<RelationId>,
    ) -> Self {
        let (labels, status) = if !relation_ids.is_empty() {
            (BTreeSet::new(), AnnotationStatus::RelationMarker)
        } else {
            let status = match labels.len() {
                0 => AnnotationStatus::NotRecognized,
                1 => AnnotationStatus::Labeled,
                _ => AnnotationStatus::Ambiguous,
            };
            (labels, status)
        };
        Self {
            surface: surface.into(),
            labels,
            relation_ids,
            status,
        }
    }

    pub fn is_marker(&self) -> bool {
        self.status == AnnotationStatus::RelationMarker
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotatedUtterance {
    pub id: String,
    pub tokens: Vec<TokenAnnotation>,
    /// Tokens that matched both an instance and a relation trigger, which
    /// only happens on an unvalidated ontology pair.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Annotates one token.
pub fn annotate_token(surface: &str, ontologies: &Ontologies) -> TokenAnnotation {
    TokenAnnotation::new(
        surface,
        ontologies.lookup_concepts(surface),
        ontologies.lookup_relations(surface),
    )
}

/// Labels every token of a normalized utterance from the union of both
/// ontologies. No token is dropped.
pub fn annotate(normalized: &NormalizedUtterance, ontologies: &Ontologies) -> AnnotatedUtterance {
    let mut warnings = Vec::new();
    let tokens = normalized
        .tokens
        .iter()
        .enumerate()
        .map(|(i, token)| {
            let labels = ontologies.lookup_concepts(&token.surface);
            let relations = ontologies.lookup_relations(&token.surface);
            if !labels.is_empty() && !relations.is_empty() {
                warnings.push(format!(
                    "token {i} `{}` is both an instance and a relation trigger; treated as a marker",
                    token.surface
                ));
            }
            TokenAnnotation::new(token.surface.clone(), labels, relations)
        })
        .collect();
    AnnotatedUtterance {
        id: normalized.id.clone(),
        tokens,
        warnings,
    }
}
