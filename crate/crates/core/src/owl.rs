//! One-way export to an OWL RDF/XML subset.
//!
//! Concepts become `owl:Class` elements, taxonomy edges become
//! `rdfs:subClassOf` children, relations become `owl:ObjectProperty`
//! elements with `rdfs:domain` and `rdfs:range`, and instances become
//! `owl:NamedIndividual` elements typed by their concepts. Trigger forms and
//! surfaces are carried as `rdfs:label`. Output is sorted by identifier.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::ontology::{Concept, Instance, Ontology, SemanticRelation, TaxonomyEdge};

const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
const OWL_NS: &str = "http://www.w3.org/2002/07/owl#";

/// Escapes text for use in XML content or a double-quoted attribute.
pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Percent-encodes everything outside the IRI unreserved set.
fn iri_segment(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~') {
            out.push(b as char);
        } else {
            write!(out, "%{b:02X}").unwrap();
        }
    }
    out
}

/// Exports one or more ontologies as a single RDF/XML document.
pub fn export_owl(ontologies: &[&Ontology]) -> String {
    let mut concepts: Vec<&Concept> = Vec::new();
    let mut parents: BTreeMap<&str, Vec<&TaxonomyEdge>> = BTreeMap::new();
    let mut relations: Vec<&SemanticRelation> = Vec::new();
    let mut instances: Vec<&Instance> = Vec::new();
    for ontology in ontologies {
        concepts.extend(ontology.concepts());
        for edge in ontology.taxonomy() {
            parents.entry(edge.child.as_str()).or_default().push(edge);
        }
        relations.extend(ontology.relations());
        instances.extend(ontology.instances());
    }
    concepts.sort_by(|a, b| a.label.cmp(&b.label));
    relations.sort_by(|a, b| a.id.cmp(&b.id));
    instances.sort_by(|a, b| a.surface.cmp(&b.surface));

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<rdf:RDF xmlns:rdf=\"{RDF_NS}\" xmlns:rdfs=\"{RDFS_NS}\" xmlns:owl=\"{OWL_NS}\">"
    )
    .unwrap();
    let names: Vec<&str> = ontologies.iter().map(|o| o.name()).collect();
    writeln!(
        out,
        "  <owl:Ontology rdf:about=\"{}\"/>",
        escape_xml(&iri_segment(&names.join("+")))
    )
    .unwrap();

    for concept in concepts {
        let about = escape_xml(concept.label.as_str());
        let edges = parents.get(concept.label.as_str());
        if concept.gloss.is_none() && edges.is_none() {
            writeln!(out, "  <owl:Class rdf:about=\"{about}\"/>").unwrap();
            continue;
        }
        writeln!(out, "  <owl:Class rdf:about=\"{about}\">").unwrap();
        if let Some(gloss) = &concept.gloss {
            writeln!(
                out,
                "    <rdfs:label xml:lang=\"ar\">{}</rdfs:label>",
                escape_xml(gloss)
            )
            .unwrap();
        }
        for edge in edges.into_iter().flatten() {
            writeln!(
                out,
                "    <rdfs:subClassOf rdf:resource=\"{}\"/>",
                escape_xml(edge.parent.as_str())
            )
            .unwrap();
        }
        out.push_str("  </owl:Class>\n");
    }

    for relation in relations {
        writeln!(
            out,
            "  <owl:ObjectProperty rdf:about=\"{}\">",
            escape_xml(relation.id.as_str())
        )
        .unwrap();
        writeln!(
            out,
            "    <rdfs:domain rdf:resource=\"{}\"/>",
            escape_xml(relation.source.as_str())
        )
        .unwrap();
        writeln!(
            out,
            "    <rdfs:range rdf:resource=\"{}\"/>",
            escape_xml(relation.target.as_str())
        )
        .unwrap();
        for trigger in &relation.triggers {
            writeln!(out, "    <rdfs:label>{}</rdfs:label>", escape_xml(trigger)).unwrap();
        }
        out.push_str("  </owl:ObjectProperty>\n");
    }

    for instance in instances {
        writeln!(
            out,
            "  <owl:NamedIndividual rdf:about=\"instance/{}\">",
            escape_xml(&iri_segment(&instance.surface))
        )
        .unwrap();
        for concept in &instance.concepts {
            writeln!(
                out,
                "    <rdf:type rdf:resource=\"{}\"/>",
                escape_xml(concept.as_str())
            )
            .unwrap();
        }
        writeln!(
            out,
            "    <rdfs:label>{}</rdfs:label>",
            escape_xml(&instance.surface)
        )
        .unwrap();
        out.push_str("  </owl:NamedIndividual>\n");
    }

    out.push_str("</rdf:RDF>\n");
    out
}
