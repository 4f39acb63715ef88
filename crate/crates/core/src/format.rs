//! Text serializations of annotation and interpretation results.
//!
//! XML: one `<utterance>` per input line inside an `<annotations>` root; each
//! token is a `<token value='...'>` element holding one `<annotation>` per
//! label. TSV: one token per line with a `#` header line. Both are described
//! in `docs/formats.md`.

use std::fmt::Write;

use crate::annotator::AnnotatedUtterance;
use crate::interpreter::{FinalLabel, InterpretedUtterance, Outcome};
use crate::ontology::SEMANTIC_RELATION_LABEL;
use crate::owl::escape_xml;

pub const ANNOTATION_TSV_HEADER: &str =
    "#utterance_id\ttoken_index\tsurface\tstatus\tlabels\trelations";
pub const INTERPRETATION_TSV_HEADER: &str =
    "#utterance_id\ttoken_index\tsurface\tstatus\tfinal_label\tcandidates\tvia_relation\tmarker_index";

fn join<I, S>(items: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let joined: Vec<String> = items.into_iter().map(|s| s.as_ref().to_owned()).collect();
    if joined.is_empty() {
        "-".to_owned()
    } else {
        joined.join("|")
    }
}

fn open_utterance(out: &mut String, id: &str) {
    writeln!(out, "<utterance id='{}'>", escape_xml(id)).unwrap();
}

pub fn annotations_to_xml(utterances: &[AnnotatedUtterance]) -> String {
    let mut out = String::from("<annotations>\n");
    for u in utterances {
        open_utterance(&mut out, &u.id);
        for token in &u.tokens {
            let labels: Vec<&str> = if token.is_marker() {
                vec![SEMANTIC_RELATION_LABEL]
            } else {
                token.labels.iter().map(|l| l.as_str()).collect()
            };
            write_token(&mut out, &token.surface, &[], &labels);
        }
        out.push_str("</utterance>\n");
    }
    out.push_str("</annotations>\n");
    out
}

fn write_token(out: &mut String, surface: &str, attrs: &[(&str, String)], labels: &[&str]) {
    write!(out, "<token value='{}'", escape_xml(surface)).unwrap();
    for (k, v) in attrs {
        write!(out, " {k}='{}'", escape_xml(v)).unwrap();
    }
    if labels.is_empty() {
        out.push_str("/>\n");
        return;
    }
    out.push_str(">\n");
    for label in labels {
        writeln!(out, "<annotation>{}</annotation>", escape_xml(label)).unwrap();
    }
    out.push_str("</token>\n");
}

pub fn annotations_to_tsv(utterances: &[AnnotatedUtterance]) -> String {
    let mut out = String::from(ANNOTATION_TSV_HEADER);
    out.push('\n');
    for u in utterances {
        for (i, t) in u.tokens.iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                u.id,
                i,
                t.surface,
                t.status.as_str(),
                join(t.labels.iter().map(|l| l.as_str())),
                join(t.relation_ids.iter().map(|r| r.as_str())),
            )
            .unwrap();
        }
    }
    out
}

fn interpreted_status(label: &FinalLabel, outcome: &Outcome) -> &'static str {
    match (outcome, label) {
        (Outcome::Resolved { .. }, _) => "resolved",
        (Outcome::Unresolved { .. }, _) => "unresolved",
        (Outcome::Unchanged, FinalLabel::Relation) => "relation_marker",
        (Outcome::Unchanged, FinalLabel::NotRecognized) => "not_recognized",
        (Outcome::Unchanged, _) => "labeled",
    }
}

pub fn interpretations_to_xml(utterances: &[InterpretedUtterance]) -> String {
    let mut out = String::from("<annotations>\n");
    for u in utterances {
        open_utterance(&mut out, &u.id);
        for (token, resolution) in u.tokens.iter().zip(&u.resolutions) {
            let status = interpreted_status(&token.final_label, &resolution.outcome);
            let mut attrs = vec![("status", status.to_owned())];
            if let Outcome::Resolved {
                relation,
                marker_index,
                ..
            } = &resolution.outcome
            {
                attrs.push(("relation", relation.to_string()));
                attrs.push(("marker", marker_index.to_string()));
            }
            let labels: Vec<&str> = match &token.final_label {
                FinalLabel::Concept(c) => vec![c.as_str()],
                FinalLabel::Relation => vec![SEMANTIC_RELATION_LABEL],
                FinalLabel::Unresolved(cands) => cands.iter().map(|c| c.as_str()).collect(),
                FinalLabel::NotRecognized => vec![],
            };
            write_token(&mut out, token.surface(), &attrs, &labels);
        }
        out.push_str("</utterance>\n");
    }
    out.push_str("</annotations>\n");
    out
}

pub fn interpretations_to_tsv(utterances: &[InterpretedUtterance]) -> String {
    let mut out = String::from(INTERPRETATION_TSV_HEADER);
    out.push('\n');
    for u in utterances {
        for (i, (t, r)) in u.tokens.iter().zip(&u.resolutions).enumerate() {
            let status = interpreted_status(&t.final_label, &r.outcome);
            let final_label = t.final_label.committed().unwrap_or("-");
            let candidates = join(t.annotation.labels.iter().map(|l| l.as_str()));
            let (via, marker) = match &r.outcome {
                Outcome::Resolved {
                    relation,
                    marker_index,
                    ..
                } => (relation.to_string(), marker_index.to_string()),
                _ => ("-".to_owned(), "-".to_owned()),
            };
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                u.id,
                i,
                t.surface(),
                status,
                final_label,
                candidates,
                via,
                marker
            )
            .unwrap();
        }
    }
    out
}
