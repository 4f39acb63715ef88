//! Raw utterance files, gold annotation files and corpus statistics.
//!
//! Raw corpus: one utterance per line, `id<TAB>text`. Gold corpus: one token
//! per line, `utterance_id<TAB>token_index<TAB>surface<TAB>gold_label`, with
//! a blank line between utterances. Lines starting with `#` are comments.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::normalizer::tokenize;
pub use crate::normalizer::RawUtterance;
use crate::ontology::{Ontologies, SEMANTIC_RELATION_LABEL};
use crate::scalar::Scalar;

pub const RAW_HEADER: &str = "# onto-slu raw utterances v1";
pub const GOLD_HEADER: &str = "# onto-slu gold annotations v1";

/// Gold label for a token with no domain meaning.
pub const NO_LABEL: &str = "None";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: duplicate utterance id `{id}`")]
    DuplicateId {
        path: PathBuf,
        line: usize,
        id: String,
    },
    #[error("{path}:{line}: unknown label `{label}`")]
    UnknownLabel {
        path: PathBuf,
        line: usize,
        label: String,
    },
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_owned(),
        source,
    })
}

fn is_comment(line: &str) -> bool {
    line.starts_with('#')
}

pub fn parse_utterances(text: &str, path: &Path) -> Result<Vec<RawUtterance>, CorpusError> {
    let mut ids = BTreeSet::new();
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() || is_comment(line) {
            continue;
        }
        let Some((id, utterance)) = line.split_once('\t') else {
            return Err(CorpusError::Parse {
                path: path.to_owned(),
                line: line_no,
                message: "expected `id<TAB>text`".into(),
            });
        };
        if id.is_empty() {
            return Err(CorpusError::Parse {
                path: path.to_owned(),
                line: line_no,
                message: "empty utterance id".into(),
            });
        }
        if !ids.insert(id.to_owned()) {
            return Err(CorpusError::DuplicateId {
                path: path.to_owned(),
                line: line_no,
                id: id.to_owned(),
            });
        }
        out.push(RawUtterance::new(id, utterance));
    }
    Ok(out)
}

pub fn load_utterances(path: impl AsRef<Path>) -> Result<Vec<RawUtterance>, CorpusError> {
    let path = path.as_ref();
    parse_utterances(&read(path)?, path)
}

pub fn utterances_to_text(utterances: &[RawUtterance]) -> String {
    let mut out = String::from(RAW_HEADER);
    out.push('\n');
    for u in utterances {
        out.push_str(&u.id);
        out.push('\t');
        out.push_str(&u.text);
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldToken {
    pub surface: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldUtterance {
    pub id: String,
    pub tokens: Vec<GoldToken>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldCorpus {
    pub utterances: Vec<GoldUtterance>,
}

impl GoldCorpus {
    pub fn get(&self, id: &str) -> Option<&GoldUtterance> {
        self.utterances.iter().find(|u| u.id == id)
    }

    pub fn token_count(&self) -> usize {
        self.utterances.iter().map(|u| u.tokens.len()).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from(GOLD_HEADER);
        out.push('\n');
        for (i, u) in self.utterances.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            for (k, t) in u.tokens.iter().enumerate() {
                out.push_str(&format!("{}\t{}\t{}\t{}\n", u.id, k, t.surface, t.label));
            }
        }
        out
    }
}

/// Returns true if `label` may appear in a gold file scored against
/// `ontologies`.
pub fn is_known_gold_label(label: &str, ontologies: &Ontologies) -> bool {
    label == SEMANTIC_RELATION_LABEL || label == NO_LABEL || ontologies.has_concept(label)
}

/// Parses a gold file. When `ontologies` is given, every label must be a
/// concept, `Semantic_Relation` or `None`.
pub fn parse_gold(
    text: &str,
    path: &Path,
    ontologies: Option<&Ontologies>,
) -> Result<GoldCorpus, CorpusError> {
    let parse_err = |line: usize, message: String| CorpusError::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    let mut corpus = GoldCorpus::default();
    let mut ids = BTreeSet::new();
    let mut current: Option<GoldUtterance> = None;

    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if is_comment(line) {
            continue;
        }
        if line.trim().is_empty() {
            corpus.utterances.extend(current.take());
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [id, index, surface, label] = fields[..] else {
            return Err(parse_err(
                line_no,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        };
        let index: usize = index
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid token index `{index}`")))?;
        if surface.is_empty() || label.is_empty() {
            return Err(parse_err(line_no, "empty surface or label".into()));
        }
        if let Some(ontologies) = ontologies {
            if !is_known_gold_label(label, ontologies) {
                return Err(CorpusError::UnknownLabel {
                    path: path.to_owned(),
                    line: line_no,
                    label: label.to_owned(),
                });
            }
        }

        if current.as_ref().is_some_and(|u| u.id != id) {
            corpus.utterances.extend(current.take());
        }
        if current.is_none() {
            if !ids.insert(id.to_owned()) {
                return Err(CorpusError::DuplicateId {
                    path: path.to_owned(),
                    line: line_no,
                    id: id.to_owned(),
                });
            }
            current = Some(GoldUtterance {
                id: id.to_owned(),
                tokens: Vec::new(),
            });
        }
        let utterance = current.as_mut().expect("set above");
        if index != utterance.tokens.len() {
            return Err(parse_err(
                line_no,
                format!("token index {index}, expected {}", utterance.tokens.len()),
            ));
        }
        utterance.tokens.push(GoldToken {
            surface: surface.to_owned(),
            label: label.to_owned(),
        });
    }
    corpus.utterances.extend(current);
    Ok(corpus)
}

pub fn load_gold(
    path: impl AsRef<Path>,
    ontologies: Option<&Ontologies>,
) -> Result<GoldCorpus, CorpusError> {
    let path = path.as_ref();
    parse_gold(&read(path)?, path, ontologies)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusStats {
    pub utterance_count: u64,
    pub word_count: u64,
}

impl CorpusStats {
    pub fn new(utterance_count: u64, word_count: u64) -> Self {
        Self {
            utterance_count,
            word_count,
        }
    }

    /// Words per utterance; `None` for an empty corpus.
    pub fn average<T: Scalar>(&self) -> Option<T> {
        T::ratio(self.word_count, self.utterance_count)
    }

    pub fn avg_words_per_utterance(&self) -> Option<f64> {
        self.average()
    }
}

/// Counts utterances and raw tokens, before any normalization.
pub fn stats(utterances: &[RawUtterance]) -> CorpusStats {
    CorpusStats {
        utterance_count: utterances.len() as u64,
        word_count: utterances.iter().map(|u| tokenize(u).len() as u64).sum(),
    }
}
