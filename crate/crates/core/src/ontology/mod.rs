//! In-memory domain and task ontologies.
//!
//! An [`Ontology`] is immutable once built. Every collection is kept sorted by
//! identifier so that two ontologies built from the same records compare equal
//! and serialize identically. Lookups go through indices computed at
//! construction time.

mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use validate::{Finding, ValidationReport};

/// Label attached to annotated tokens that trigger a semantic relation.
pub const SEMANTIC_RELATION_LABEL: &str = "Semantic_Relation";

/// Returns true when `s` matches `[A-Za-z][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

macro_rules! string_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Self {
                Self(name.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_newtype!(
    /// Identifier of a concept, e.g. `Departure_City`.
    ConceptLabel
);
string_newtype!(
    /// Identifier of a semantic relation, e.g. `rel_to_arrival`.
    RelationId
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OntologyKind {
    Domain,
    Task,
}

impl fmt::Display for OntologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OntologyKind::Domain => f.write_str("domain"),
            OntologyKind::Task => f.write_str("task"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Concept {
    pub label: ConceptLabel,
    /// Display gloss, usually the Arabic-script concept name.
    pub gloss: Option<String>,
}

impl Concept {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: ConceptLabel::new(label),
            gloss: None,
        }
    }

    pub fn with_gloss(mut self, gloss: impl Into<String>) -> Self {
        self.gloss = Some(gloss.into());
        self
    }
}

/// Subclass edge: `child` is a sub-concept of `parent`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaxonomyEdge {
    pub child: ConceptLabel,
    pub parent: ConceptLabel,
}

impl TaxonomyEdge {
    pub fn new(child: impl Into<String>, parent: impl Into<String>) -> Self {
        Self {
            child: ConceptLabel::new(child),
            parent: ConceptLabel::new(parent),
        }
    }
}

/// A normalized surface form and the concepts it instantiates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Instance {
    pub surface: String,
    pub concepts: BTreeSet<ConceptLabel>,
}

impl Instance {
    pub fn new<I, S>(surface: impl Into<String>, concepts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            surface: surface.into(),
            concepts: concepts.into_iter().map(ConceptLabel::new).collect(),
        }
    }
}

/// A lexically triggered, non-taxonomic relation from `source` (domain) to
/// `target` (range).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SemanticRelation {
    pub id: RelationId,
    pub triggers: BTreeSet<String>,
    pub source: ConceptLabel,
    pub target: ConceptLabel,
}

impl SemanticRelation {
    pub fn new<I, S>(
        id: impl Into<String>,
        triggers: I,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            id: RelationId::new(id),
            triggers: triggers.into_iter().map(Into::into).collect(),
            source: ConceptLabel::new(source),
            target: ConceptLabel::new(target),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("unknown concept `{0}`")]
    UnknownConcept(ConceptLabel),
    #[error("unknown relation `{0}`")]
    UnknownRelation(RelationId),
}

/// Identity of an ontology: its name, kind and the ontology it draws
/// concepts from, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyHeader {
    pub name: String,
    pub kind: OntologyKind,
    /// Name of another ontology whose concepts this one may reference.
    pub depends_on: Option<String>,
}

impl OntologyHeader {
    pub fn new(name: impl Into<String>, kind: OntologyKind) -> Self {
        Self {
            name: name.into(),
            kind,
            depends_on: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    header: OntologyHeader,
    concepts: Vec<Concept>,
    taxonomy: Vec<TaxonomyEdge>,
    instances: Vec<Instance>,
    relations: Vec<SemanticRelation>,
    // Derived indices.
    surfaces: BTreeMap<String, BTreeSet<ConceptLabel>>,
    triggers: BTreeMap<String, BTreeSet<RelationId>>,
    relation_index: BTreeMap<RelationId, usize>,
    parents: BTreeMap<ConceptLabel, BTreeSet<ConceptLabel>>,
}

impl Ontology {
    /// Builds an ontology from raw records. No validation happens here; call
    /// [`Ontology::validate`] before trusting referential integrity.
    pub fn new(
        header: OntologyHeader,
        mut concepts: Vec<Concept>,
        mut taxonomy: Vec<TaxonomyEdge>,
        mut instances: Vec<Instance>,
        mut relations: Vec<SemanticRelation>,
    ) -> Self {
        concepts.sort();
        taxonomy.sort();
        instances.sort();
        relations.sort();

        let mut surfaces: BTreeMap<String, BTreeSet<ConceptLabel>> = BTreeMap::new();
        for instance in &instances {
            surfaces
                .entry(instance.surface.clone())
                .or_default()
                .extend(instance.concepts.iter().cloned());
        }

        let mut triggers: BTreeMap<String, BTreeSet<RelationId>> = BTreeMap::new();
        let mut relation_index = BTreeMap::new();
        for (i, relation) in relations.iter().enumerate() {
            relation_index.entry(relation.id.clone()).or_insert(i);
            for trigger in &relation.triggers {
                triggers
                    .entry(trigger.clone())
                    .or_default()
                    .insert(relation.id.clone());
            }
        }

        let mut parents: BTreeMap<ConceptLabel, BTreeSet<ConceptLabel>> = BTreeMap::new();
        for edge in &taxonomy {
            parents
                .entry(edge.child.clone())
                .or_default()
                .insert(edge.parent.clone());
        }

        Self {
            header,
            concepts,
            taxonomy,
            instances,
            relations,
            surfaces,
            triggers,
            relation_index,
            parents,
        }
    }

    /// An ontology with no records at all.
    pub fn empty(header: OntologyHeader) -> Self {
        Self::new(header, Vec::new(), Vec::new(), Vec::new(), Vec::new())
    }

    pub fn header(&self) -> &OntologyHeader {
        &self.header
    }

    pub fn name(&self) -> &str {
        &self.header.name
    }

    pub fn kind(&self) -> OntologyKind {
        self.header.kind
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn taxonomy(&self) -> &[TaxonomyEdge] {
        &self.taxonomy
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn relations(&self) -> &[SemanticRelation] {
        &self.relations
    }

    pub fn has_concept(&self, label: &str) -> bool {
        self.concept(label).is_some()
    }

    pub fn concept(&self, label: &str) -> Option<&Concept> {
        self.concepts
            .binary_search_by(|c| c.label.as_str().cmp(label))
            .ok()
            .map(|i| &self.concepts[i])
    }

    /// Union of the concepts of every instance record whose surface is
    /// `surface`. Empty when the surface is not an instance.
    pub fn lookup_concepts(&self, surface: &str) -> BTreeSet<ConceptLabel> {
        self.surfaces.get(surface).cloned().unwrap_or_default()
    }

    /// Relations triggered by `surface`.
    pub fn lookup_relations(&self, surface: &str) -> BTreeSet<RelationId> {
        self.triggers.get(surface).cloned().unwrap_or_default()
    }

    pub fn relation(&self, id: &str) -> Option<&SemanticRelation> {
        self.relation_index.get(id).map(|&i| &self.relations[i])
    }

    pub fn relation_target(&self, id: &str) -> Result<&ConceptLabel, OntologyError> {
        self.relation(id)
            .map(|r| &r.target)
            .ok_or_else(|| OntologyError::UnknownRelation(RelationId::new(id)))
    }

    pub fn relation_source(&self, id: &str) -> Result<&ConceptLabel, OntologyError> {
        self.relation(id)
            .map(|r| &r.source)
            .ok_or_else(|| OntologyError::UnknownRelation(RelationId::new(id)))
    }

    /// Transitive parents of `concept`, nearest first. Concepts at the same
    /// depth come in label order. Terminates on cyclic input; a concept is
    /// never listed as its own ancestor.
    pub fn ancestors(&self, concept: &str) -> Result<Vec<ConceptLabel>, OntologyError> {
        if !self.has_concept(concept) {
            return Err(OntologyError::UnknownConcept(ConceptLabel::new(concept)));
        }
        Ok(self.walk_parents(concept))
    }

    pub(crate) fn walk_parents(&self, concept: &str) -> Vec<ConceptLabel> {
        let mut seen = BTreeSet::new();
        seen.insert(concept.to_owned());
        let mut out = Vec::new();
        let mut queue: VecDeque<&str> = VecDeque::from([concept]);
        while let Some(current) = queue.pop_front() {
            let Some(parents) = self.parents.get(current) else {
                continue;
            };
            for parent in parents {
                if seen.insert(parent.as_str().to_owned()) {
                    out.push(parent.clone());
                    queue.push_back(parent.as_str());
                }
            }
        }
        out
    }

    /// Every surface form known to this ontology: instance surfaces and
    /// relation triggers.
    pub fn surface_vocabulary(&self) -> impl Iterator<Item = &str> {
        self.surfaces
            .keys()
            .chain(self.triggers.keys())
            .map(String::as_str)
    }

    pub fn is_known_surface(&self, surface: &str) -> bool {
        self.surfaces.contains_key(surface) || self.triggers.contains_key(surface)
    }

    /// Checks every invariant of a standalone ontology.
    pub fn validate(&self) -> ValidationReport {
        validate::validate(self, &[])
    }

    /// Checks every invariant, resolving concept references against `imports`
    /// as well as this ontology's own concepts.
    pub fn validate_with(&self, imports: &[&Ontology]) -> ValidationReport {
        validate::validate(self, imports)
    }
}

/// The domain and task ontologies queried together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontologies {
    domain: Ontology,
    task: Ontology,
}

impl Ontologies {
    /// Pairs two ontologies and validates them jointly. The task ontology may
    /// reference domain concepts.
    pub fn new(domain: Ontology, task: Ontology) -> Result<Self, ValidationReport> {
        let pair = Self::new_unchecked(domain, task);
        let report = pair.validate();
        if report.is_clean() {
            Ok(pair)
        } else {
            Err(report)
        }
    }

    /// Pairs two ontologies without validating them.
    pub fn new_unchecked(domain: Ontology, task: Ontology) -> Self {
        Self { domain, task }
    }

    pub fn domain(&self) -> &Ontology {
        &self.domain
    }

    pub fn task(&self) -> &Ontology {
        &self.task
    }

    pub fn iter(&self) -> impl Iterator<Item = &Ontology> {
        [&self.domain, &self.task].into_iter()
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate_pair(&self.domain, &self.task)
    }

    pub fn has_concept(&self, label: &str) -> bool {
        self.iter().any(|o| o.has_concept(label))
    }

    pub fn lookup_concepts(&self, surface: &str) -> BTreeSet<ConceptLabel> {
        let mut out = self.domain.lookup_concepts(surface);
        out.extend(self.task.lookup_concepts(surface));
        out
    }

    pub fn lookup_relations(&self, surface: &str) -> BTreeSet<RelationId> {
        let mut out = self.domain.lookup_relations(surface);
        out.extend(self.task.lookup_relations(surface));
        out
    }

    pub fn relation(&self, id: &str) -> Option<&SemanticRelation> {
        self.domain.relation(id).or_else(|| self.task.relation(id))
    }

    pub fn relation_target(&self, id: &str) -> Result<&ConceptLabel, OntologyError> {
        self.relation(id)
            .map(|r| &r.target)
            .ok_or_else(|| OntologyError::UnknownRelation(RelationId::new(id)))
    }

    pub fn relation_source(&self, id: &str) -> Result<&ConceptLabel, OntologyError> {
        self.relation(id)
            .map(|r| &r.source)
            .ok_or_else(|| OntologyError::UnknownRelation(RelationId::new(id)))
    }

    pub fn is_known_surface(&self, surface: &str) -> bool {
        self.iter().any(|o| o.is_known_surface(surface))
    }
}
