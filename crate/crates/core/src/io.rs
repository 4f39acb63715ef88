//! Native ontology documents.
//!
//! Ontologies are stored as TOML documents with a mandatory
//! `format_version = 1`. The grammar is described in `docs/formats.md`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{
    Concept, ConceptLabel, Instance, Ontologies, Ontology, OntologyHeader, OntologyKind,
    RelationId, SemanticRelation, TaxonomyEdge, ValidationReport,
};

pub const FORMAT_VERSION: u32 = 1;

/// A 1-based position in a text document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Converts a byte offset into a line/column position.
pub fn position_of(text: &str, offset: usize) -> Position {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    Position {
        line,
        column: before[line_start..].chars().count() + 1,
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{}: {message}", position.map(|p| p.to_string()).unwrap_or_else(|| "?".into()))]
    Parse {
        path: PathBuf,
        position: Option<Position>,
        message: String,
    },
    #[error("{path}: unsupported format_version {found} (expected {FORMAT_VERSION})")]
    UnsupportedVersion { path: PathBuf, found: i64 },
    #[error("{path}: ontology failed validation:\n{report}")]
    Invalid {
        path: PathBuf,
        report: ValidationReport,
    },
}

impl LoadError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        LoadError::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub(crate) fn from_toml(path: &Path, text: &str, err: toml::de::Error) -> Self {
        LoadError::Parse {
            path: path.to_owned(),
            position: err.span().map(|span| position_of(text, span.start)),
            message: err.message().to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntologyDocument {
    pub format_version: u32,
    pub name: String,
    pub kind: OntologyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depends_on: Option<String>,
    #[serde(default)]
    pub concepts: Vec<ConceptRecord>,
    #[serde(default)]
    pub taxonomy: Vec<TaxonomyRecord>,
    #[serde(default)]
    pub instances: Vec<InstanceRecord>,
    #[serde(default)]
    pub relations: Vec<RelationRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptRecord {
    pub name: ConceptLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gloss: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaxonomyRecord {
    pub child: ConceptLabel,
    pub parent: ConceptLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRecord {
    pub surface: String,
    pub concepts: BTreeSet<ConceptLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationRecord {
    pub id: RelationId,
    pub triggers: BTreeSet<String>,
    pub source: ConceptLabel,
    pub target: ConceptLabel,
}

impl From<&Ontology> for OntologyDocument {
    fn from(ontology: &Ontology) -> Self {
        let header = ontology.header();
        OntologyDocument {
            format_version: FORMAT_VERSION,
            name: header.name.clone(),
            kind: header.kind,
            depends_on: header.depends_on.clone(),
            concepts: ontology
                .concepts()
                .iter()
                .map(|c| ConceptRecord {
                    name: c.label.clone(),
                    gloss: c.gloss.clone(),
                })
                .collect(),
            taxonomy: ontology
                .taxonomy()
                .iter()
                .map(|e| TaxonomyRecord {
                    child: e.child.clone(),
                    parent: e.parent.clone(),
                })
                .collect(),
            instances: ontology
                .instances()
                .iter()
                .map(|i| InstanceRecord {
                    surface: i.surface.clone(),
                    concepts: i.concepts.clone(),
                })
                .collect(),
            relations: ontology
                .relations()
                .iter()
                .map(|r| RelationRecord {
                    id: r.id.clone(),
                    triggers: r.triggers.clone(),
                    source: r.source.clone(),
                    target: r.target.clone(),
                })
                .collect(),
        }
    }
}

impl From<OntologyDocument> for Ontology {
    fn from(doc: OntologyDocument) -> Self {
        Ontology::new(
            OntologyHeader {
                name: doc.name,
                kind: doc.kind,
                depends_on: doc.depends_on,
            },
            doc.concepts
                .into_iter()
                .map(|c| Concept {
                    label: c.name,
                    gloss: c.gloss,
                })
                .collect(),
            doc.taxonomy
                .into_iter()
                .map(|t| TaxonomyEdge {
                    child: t.child,
                    parent: t.parent,
                })
                .collect(),
            doc.instances
                .into_iter()
                .map(|i| Instance {
                    surface: i.surface,
                    concepts: i.concepts,
                })
                .collect(),
            doc.relations
                .into_iter()
                .map(|r| SemanticRelation {
                    id: r.id,
                    triggers: r.triggers,
                    source: r.source,
                    target: r.target,
                })
                .collect(),
        )
    }
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: Option<toml::Value>,
}

/// Parses a document without validating the resulting ontology.
pub fn parse_ontology(text: &str, path: &Path) -> Result<Ontology, LoadError> {
    // Check the version before the full schema so that a future document
    // reports its version rather than an unrelated schema error.
    let probe: VersionProbe =
        toml::from_str(text).map_err(|e| LoadError::from_toml(path, text, e))?;
    match probe.format_version {
        Some(toml::Value::Integer(v)) if v == FORMAT_VERSION as i64 => {}
        Some(toml::Value::Integer(v)) => {
            return Err(LoadError::UnsupportedVersion {
                path: path.to_owned(),
                found: v,
            })
        }
        _ => {}
    }
    let doc: OntologyDocument =
        toml::from_str(text).map_err(|e| LoadError::from_toml(path, text, e))?;
    Ok(doc.into())
}

/// Loads and validates a standalone ontology.
pub fn load_ontology(path: impl AsRef<Path>) -> Result<Ontology, LoadError> {
    load_ontology_with(path, &[])
}

/// Loads an ontology and validates it against `imports`, which must contain
/// the ontology named by its `depends_on` field.
pub fn load_ontology_with(
    path: impl AsRef<Path>,
    imports: &[&Ontology],
) -> Result<Ontology, LoadError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| LoadError::io(path, e))?;
    let ontology = parse_ontology(&text, path)?;
    let report = ontology.validate_with(imports);
    if !report.is_clean() {
        return Err(LoadError::Invalid {
            path: path.to_owned(),
            report,
        });
    }
    Ok(ontology)
}

/// Loads a domain ontology and a task ontology and validates them as a pair.
pub fn load_ontologies(
    domain_path: impl AsRef<Path>,
    task_path: impl AsRef<Path>,
) -> Result<Ontologies, LoadError> {
    let domain = load_ontology(domain_path.as_ref())?;
    let task = load_ontology_with(task_path.as_ref(), &[&domain])?;
    Ontologies::new(domain, task).map_err(|report| LoadError::Invalid {
        path: task_path.as_ref().to_owned(),
        report,
    })
}

/// Serializes an ontology to its native document text.
pub fn to_document_text(ontology: &Ontology) -> String {
    let doc = OntologyDocument::from(ontology);
    toml::to_string(&doc).expect("ontology documents always serialize")
}

pub fn save_ontology(ontology: &Ontology, path: impl AsRef<Path>) -> Result<(), std::io::Error> {
    fs::write(path, to_document_text(ontology))
}
