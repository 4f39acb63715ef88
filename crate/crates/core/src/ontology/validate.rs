use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{is_identifier, ConceptLabel, Ontology, OntologyKind, RelationId};

/// One violated ontology invariant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Finding {
    InvalidIdentifier {
        what: &'static str,
        name: String,
    },
    DuplicateConcept(ConceptLabel),
    DanglingReference {
        referrer: String,
        concept: ConceptLabel,
    },
    /// Concepts forming one strongly connected taxonomy component.
    TaxonomyCycle(Vec<ConceptLabel>),
    DuplicateInstance(String),
    EmptyInstance(String),
    DuplicateRelation(RelationId),
    EmptyTriggers(RelationId),
    TriggerInstanceOverlap {
        surface: String,
        relation: RelationId,
    },
    UnresolvedDependency {
        ontology: String,
        depends_on: String,
    },
    KindMismatch {
        ontology: String,
        expected: OntologyKind,
        found: OntologyKind,
    },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::InvalidIdentifier { what, name } => {
                write!(f, "invalid {what} identifier `{name}`")
            }
            Finding::DuplicateConcept(c) => write!(f, "concept `{c}` declared more than once"),
            Finding::DanglingReference { referrer, concept } => {
                write!(f, "{referrer} references missing concept `{concept}`")
            }
            Finding::TaxonomyCycle(members) => {
                let names: Vec<&str> = members.iter().map(ConceptLabel::as_str).collect();
                write!(f, "taxonomy cycle through {}", names.join(", "))
            }
            Finding::DuplicateInstance(s) => {
                write!(f, "surface `{s}` has more than one instance record")
            }
            Finding::EmptyInstance(s) => write!(f, "instance `{s}` has no concepts"),
            Finding::DuplicateRelation(r) => write!(f, "relation `{r}` declared more than once"),
            Finding::EmptyTriggers(r) => write!(f, "relation `{r}` has no trigger forms"),
            Finding::TriggerInstanceOverlap { surface, relation } => write!(
                f,
                "surface `{surface}` is both an instance and a trigger of relation `{relation}`"
            ),
            Finding::UnresolvedDependency {
                ontology,
                depends_on,
            } => write!(
                f,
                "ontology `{ontology}` depends on `{depends_on}`, which was not supplied"
            ),
            Finding::KindMismatch {
                ontology,
                expected,
                found,
            } => write!(
                f,
                "ontology `{ontology}` is a {found} ontology, expected {expected}"
            ),
        }
    }
}

/// Every invariant violation found in an ontology. Empty iff well-formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.findings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    fn push(&mut self, finding: Finding) {
        self.findings.push(finding);
    }

    fn finish(mut self) -> Self {
        self.findings.sort();
        self.findings.dedup();
        self
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, finding) in self.findings.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{finding}")?;
        }
        Ok(())
    }
}

pub(super) fn validate(ontology: &Ontology, imports: &[&Ontology]) -> ValidationReport {
    let mut report = ValidationReport::default();

    let imported: Vec<&Ontology> = match &ontology.header.depends_on {
        Some(dep) => {
            let found: Vec<&Ontology> = imports
                .iter()
                .copied()
                .filter(|o| o.name() == dep)
                .collect();
            if found.is_empty() {
                report.push(Finding::UnresolvedDependency {
                    ontology: ontology.name().to_owned(),
                    depends_on: dep.clone(),
                });
            }
            found
        }
        None => Vec::new(),
    };
    let resolves = |label: &ConceptLabel| {
        ontology.has_concept(label.as_str())
            || imported.iter().any(|o| o.has_concept(label.as_str()))
    };

    let mut seen = BTreeSet::new();
    for concept in &ontology.concepts {
        if !is_identifier(concept.label.as_str()) {
            report.push(Finding::InvalidIdentifier {
                what: "concept",
                name: concept.label.to_string(),
            });
        }
        if !seen.insert(&concept.label) {
            report.push(Finding::DuplicateConcept(concept.label.clone()));
        }
    }

    for edge in &ontology.taxonomy {
        let referrer = format!("taxonomy edge {} < {}", edge.child, edge.parent);
        if !ontology.has_concept(edge.child.as_str()) {
            report.push(Finding::DanglingReference {
                referrer: referrer.clone(),
                concept: edge.child.clone(),
            });
        }
        if !resolves(&edge.parent) {
            report.push(Finding::DanglingReference {
                referrer,
                concept: edge.parent.clone(),
            });
        }
    }
    for cycle in taxonomy_cycles(ontology) {
        report.push(Finding::TaxonomyCycle(cycle));
    }

    let mut surfaces = BTreeSet::new();
    for instance in &ontology.instances {
        if !surfaces.insert(instance.surface.as_str()) {
            report.push(Finding::DuplicateInstance(instance.surface.clone()));
        }
        if instance.concepts.is_empty() {
            report.push(Finding::EmptyInstance(instance.surface.clone()));
        }
        for concept in &instance.concepts {
            if !resolves(concept) {
                report.push(Finding::DanglingReference {
                    referrer: format!("instance `{}`", instance.surface),
                    concept: concept.clone(),
                });
            }
        }
    }

    let mut ids = BTreeSet::new();
    for relation in &ontology.relations {
        if !is_identifier(relation.id.as_str()) {
            report.push(Finding::InvalidIdentifier {
                what: "relation",
                name: relation.id.to_string(),
            });
        }
        if !ids.insert(&relation.id) {
            report.push(Finding::DuplicateRelation(relation.id.clone()));
        }
        if relation.triggers.is_empty() {
            report.push(Finding::EmptyTriggers(relation.id.clone()));
        }
        for (end, concept) in [("source", &relation.source), ("target", &relation.target)] {
            if !resolves(concept) {
                report.push(Finding::DanglingReference {
                    referrer: format!("relation `{}` {end}", relation.id),
                    concept: concept.clone(),
                });
            }
        }
    }

    trigger_overlaps(ontology, ontology, &mut report);
    report.finish()
}

pub(super) fn validate_pair(domain: &Ontology, task: &Ontology) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (ontology, expected) in [(domain, OntologyKind::Domain), (task, OntologyKind::Task)] {
        if ontology.kind() != expected {
            report.push(Finding::KindMismatch {
                ontology: ontology.name().to_owned(),
                expected,
                found: ontology.kind(),
            });
        }
    }
    report.findings.extend(validate(domain, &[task]).findings);
    report.findings.extend(validate(task, &[domain]).findings);

    for concept in &task.concepts {
        if domain.has_concept(concept.label.as_str()) {
            report.push(Finding::DuplicateConcept(concept.label.clone()));
        }
    }
    for relation in &task.relations {
        if domain.relation(relation.id.as_str()).is_some() {
            report.push(Finding::DuplicateRelation(relation.id.clone()));
        }
    }
    trigger_overlaps(domain, task, &mut report);
    trigger_overlaps(task, domain, &mut report);
    report.finish()
}

/// Reports surfaces that are instances in `instances_of` and triggers in
/// `triggers_of`.
fn trigger_overlaps(
    instances_of: &Ontology,
    triggers_of: &Ontology,
    report: &mut ValidationReport,
) {
    for (surface, relations) in &triggers_of.triggers {
        if instances_of.surfaces.contains_key(surface) {
            for relation in relations {
                report.push(Finding::TriggerInstanceOverlap {
                    surface: surface.clone(),
                    relation: relation.clone(),
                });
            }
        }
    }
}

/// Strongly connected components of the taxonomy that contain a cycle
/// (including self-loops), each sorted, in label order.
fn taxonomy_cycles(ontology: &Ontology) -> Vec<Vec<ConceptLabel>> {
    let mut reach: BTreeMap<&ConceptLabel, BTreeSet<&ConceptLabel>> = BTreeMap::new();
    for edge in &ontology.taxonomy {
        reach.entry(&edge.child).or_default();
        reach.entry(&edge.parent).or_default();
    }
    // Reachability by repeated edge relaxation; taxonomies are small.
    for edge in &ontology.taxonomy {
        reach.get_mut(&edge.child).unwrap().insert(&edge.parent);
    }
    loop {
        let mut changed = false;
        let snapshot = reach.clone();
        for (node, targets) in reach.iter_mut() {
            for t in snapshot[node].iter() {
                for tt in snapshot[t].iter() {
                    changed |= targets.insert(tt);
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut components = BTreeSet::new();
    for (node, targets) in &reach {
        if !targets.contains(node) {
            continue;
        }
        let component: Vec<ConceptLabel> = targets
            .iter()
            .filter(|other| reach[*other].contains(node))
            .map(|c| (*c).clone())
            .collect();
        components.insert(component);
    }
    components.into_iter().collect()
}
