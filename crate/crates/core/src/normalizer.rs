//! Standardization of raw utterances into the surface forms the ontologies
//! are written in.
//!
//! The pipeline is: tokenize (with Arabic-script input transliterated to
//! Buckwalter) → expand clitic prefixes → merge compound words → radicalize
//! each token through the variant table. Every step is table driven.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::{position_of, Position};
use crate::ontology::Ontologies;
use crate::translit;

pub const TABLES_FORMAT_VERSION: u32 = 1;

/// Characters stripped from raw text; they never become tokens.
pub const PUNCTUATION: &[char] = &['?', '!', '.', ',', '\u{061F}', '\u{060C}', '\u{061B}'];

pub fn is_separator(c: char) -> bool {
    c.is_whitespace() || PUNCTUATION.contains(&c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawUtterance {
    pub id: String,
    pub text: String,
}

impl RawUtterance {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
        }
    }
}

/// A processing step applied to a token, in application order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    Transliterated,
    CliticExpanded { prefix: String },
    CompoundMerged { parts: Vec<String> },
    Radicalized { from: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub surface: String,
    /// Character range in the raw text.
    pub span: Range<usize>,
    pub trace: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalizedUtterance {
    pub id: String,
    pub tokens: Vec<Token>,
}

impl NormalizedUtterance {
    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    /// The normalized tokens joined by single spaces.
    pub fn to_text(&self) -> String {
        self.surfaces().join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompoundEntry {
    pub tokens: Vec<String>,
    pub replacement: String,
}

/// A violated table invariant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TableFinding {
    ShortCompound {
        replacement: String,
    },
    InvalidForm {
        context: String,
        form: String,
    },
    ChainedVariant {
        from: String,
        base: String,
        next: String,
    },
    ReplacementNotFixed {
        replacement: String,
    },
    CompoundUsesReplacement {
        replacement: String,
        token: String,
    },
    AmbiguousCompound {
        tokens: Vec<String>,
    },
    EmptyExpansion {
        prefix: String,
    },
    ExpansionTooLong {
        prefix: String,
    },
}

impl fmt::Display for TableFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableFinding::ShortCompound { replacement } => {
                write!(f, "compound `{replacement}` matches fewer than 2 tokens")
            }
            TableFinding::InvalidForm { context, form } => {
                write!(f, "{context}: `{form}` is empty or contains a separator")
            }
            TableFinding::ChainedVariant { from, base, next } => write!(
                f,
                "variant `{from}` -> `{base}` is not idempotent: `{base}` -> `{next}`"
            ),
            TableFinding::ReplacementNotFixed { replacement } => {
                write!(
                    f,
                    "compound replacement `{replacement}` is rewritten by the variant table"
                )
            }
            TableFinding::CompoundUsesReplacement { replacement, token } => write!(
                f,
                "compound `{replacement}` contains `{token}`, itself a compound replacement"
            ),
            TableFinding::AmbiguousCompound { tokens } => {
                write!(
                    f,
                    "compound `{}` has conflicting replacements",
                    tokens.join(" ")
                )
            }
            TableFinding::EmptyExpansion { prefix } => {
                write!(f, "clitic `{prefix}` has an empty expansion")
            }
            TableFinding::ExpansionTooLong { prefix } => write!(
                f,
                "clitic `{prefix}` expands to more tokens than it has characters"
            ),
        }
    }
}

#[derive(Debug, Error)]
pub enum TablesError {
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
    #[error("{path}: unsupported format_version {found} (expected {TABLES_FORMAT_VERSION})")]
    UnsupportedVersion { path: PathBuf, found: u32 },
    #[error("{path}: invalid normalization tables:\n{}", join_findings(findings))]
    Invalid {
        path: PathBuf,
        findings: Vec<TableFinding>,
    },
}

fn join_findings(findings: &[TableFinding]) -> String {
    findings
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TablesDocument {
    format_version: u32,
    #[serde(default)]
    clitics: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    compounds: Vec<CompoundEntry>,
    #[serde(default)]
    variants: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizationTables {
    compounds: Vec<CompoundEntry>,
    clitics: BTreeMap<String, Vec<String>>,
    variants: BTreeMap<String, String>,
    // Radicalized match side -> replacement.
    compound_index: BTreeMap<Vec<String>, String>,
    max_compound_len: usize,
}

impl NormalizationTables {
    /// Builds tables without checking them; see [`NormalizationTables::check`].
    pub fn new(
        compounds: Vec<CompoundEntry>,
        clitics: BTreeMap<String, Vec<String>>,
        variants: BTreeMap<String, String>,
    ) -> Self {
        let mut tables = Self {
            compounds,
            clitics,
            variants,
            compound_index: BTreeMap::new(),
            max_compound_len: 0,
        };
        for entry in &tables.compounds {
            let key: Vec<String> = entry
                .tokens
                .iter()
                .map(|t| tables.radicalize(t).to_owned())
                .collect();
            tables.max_compound_len = tables.max_compound_len.max(key.len());
            tables
                .compound_index
                .entry(key)
                .or_insert_with(|| entry.replacement.clone());
        }
        tables
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, TablesError> {
        let doc: TablesDocument = toml::from_str(text).map_err(|e| TablesError::Parse {
            path: path.to_owned(),
            position: e.span().map(|s| position_of(text, s.start)),
            message: e.message().to_owned(),
        })?;
        if doc.format_version != TABLES_FORMAT_VERSION {
            return Err(TablesError::UnsupportedVersion {
                path: path.to_owned(),
                found: doc.format_version,
            });
        }
        let tables = Self::new(doc.compounds, doc.clitics, doc.variants);
        let findings = tables.check();
        if findings.is_empty() {
            Ok(tables)
        } else {
            Err(TablesError::Invalid {
                path: path.to_owned(),
                findings,
            })
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TablesError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| TablesError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn to_document_text(&self) -> String {
        let doc = TablesDocument {
            format_version: TABLES_FORMAT_VERSION,
            clitics: self.clitics.clone(),
            compounds: self.compounds.clone(),
            variants: self.variants.clone(),
        };
        toml::to_string(&doc).expect("tables always serialize")
    }

    pub fn compounds(&self) -> &[CompoundEntry] {
        &self.compounds
    }

    pub fn clitics(&self) -> &BTreeMap<String, Vec<String>> {
        &self.clitics
    }

    pub fn variants(&self) -> &BTreeMap<String, String> {
        &self.variants
    }

    /// Lists every violated table invariant.
    pub fn check(&self) -> Vec<TableFinding> {
        let mut findings = Vec::new();
        let valid_form = |s: &str| !s.is_empty() && !s.chars().any(is_separator);
        let bad_form = |findings: &mut Vec<TableFinding>, context: String, form: &str| {
            if !valid_form(form) {
                findings.push(TableFinding::InvalidForm {
                    context,
                    form: form.to_owned(),
                });
            }
        };

        for (prefix, expansion) in &self.clitics {
            bad_form(&mut findings, "clitic prefix".into(), prefix);
            if expansion.is_empty() {
                findings.push(TableFinding::EmptyExpansion {
                    prefix: prefix.clone(),
                });
            } else if expansion.len() > prefix.chars().count() {
                findings.push(TableFinding::ExpansionTooLong {
                    prefix: prefix.clone(),
                });
            }
            for token in expansion {
                bad_form(&mut findings, format!("clitic `{prefix}` expansion"), token);
            }
        }

        for (from, base) in &self.variants {
            bad_form(&mut findings, "variant".into(), from);
            bad_form(&mut findings, format!("variant `{from}` base"), base);
            if let Some(next) = self.variants.get(base) {
                if next != base {
                    findings.push(TableFinding::ChainedVariant {
                        from: from.clone(),
                        base: base.clone(),
                        next: next.clone(),
                    });
                }
            }
        }

        let replacements: BTreeSet<&str> = self
            .compounds
            .iter()
            .map(|c| c.replacement.as_str())
            .collect();
        let mut seen: BTreeMap<Vec<String>, &str> = BTreeMap::new();
        for entry in &self.compounds {
            if entry.tokens.len() < 2 {
                findings.push(TableFinding::ShortCompound {
                    replacement: entry.replacement.clone(),
                });
            }
            bad_form(
                &mut findings,
                "compound replacement".into(),
                &entry.replacement,
            );
            if self.radicalize(&entry.replacement) != entry.replacement {
                findings.push(TableFinding::ReplacementNotFixed {
                    replacement: entry.replacement.clone(),
                });
            }
            for token in &entry.tokens {
                bad_form(
                    &mut findings,
                    format!("compound `{}` token", entry.replacement),
                    token,
                );
                if replacements.contains(self.radicalize(token)) {
                    findings.push(TableFinding::CompoundUsesReplacement {
                        replacement: entry.replacement.clone(),
                        token: token.clone(),
                    });
                }
            }
            let key: Vec<String> = entry
                .tokens
                .iter()
                .map(|t| self.radicalize(t).to_owned())
                .collect();
            if let Some(previous) = seen.insert(key.clone(), &entry.replacement) {
                if previous != entry.replacement {
                    findings.push(TableFinding::AmbiguousCompound { tokens: key });
                }
            }
        }

        findings.sort();
        findings.dedup();
        findings
    }

    /// Variant-table lookup. Unknown tokens are returned unchanged.
    pub fn radicalize<'a>(&'a self, token: &'a str) -> &'a str {
        self.variants.get(token).map_or(token, String::as_str)
    }

    fn is_table_form(&self, token: &str) -> bool {
        self.variants.contains_key(token)
            || self.variants.values().any(|v| v == token)
            || self
                .compounds
                .iter()
                .any(|c| c.replacement == token || c.tokens.iter().any(|t| t == token))
            || self.clitics.values().flatten().any(|t| t == token)
    }
}

/// Variant-table lookup. Unknown tokens are returned unchanged and the result
/// is a fixed point of the table.
pub fn radicalize<'a>(token: &'a str, tables: &'a NormalizationTables) -> &'a str {
    tables.radicalize(token)
}

/// Splits raw text into tokens. Arabic-script characters are transliterated
/// first; whitespace and punctuation separate tokens and are discarded.
pub fn tokenize(raw: &RawUtterance) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut transliterated = false;

    let mut flush = |current: &mut String, start: usize, end: usize, transliterated: &mut bool| {
        if !current.is_empty() {
            tokens.push(Token {
                surface: std::mem::take(current),
                span: start..end,
                trace: if *transliterated {
                    vec![Step::Transliterated]
                } else {
                    Vec::new()
                },
            });
        }
        *transliterated = false;
    };

    let mut count = 0;
    for (i, c) in raw.text.chars().enumerate() {
        count = i + 1;
        if is_separator(c) {
            flush(&mut current, start, i, &mut transliterated);
            start = i + 1;
            continue;
        }
        let mapped = translit::to_buckwalter_char(c);
        transliterated |= translit::is_arabic(c);
        current.push(mapped);
    }
    flush(&mut current, start, count, &mut transliterated);
    tokens
}

/// Merges contiguous tokens listed in the compound dictionary into their
/// underscore-joined replacement. Matching compares radicalized forms, picks
/// the longest entry at each position and scans left to right.
pub fn merge_compounds(tokens: Vec<Token>, tables: &NormalizationTables) -> Vec<Token> {
    if tables.max_compound_len < 2 {
        return tokens;
    }
    let keys: Vec<String> = tokens
        .iter()
        .map(|t| tables.radicalize(&t.surface).to_owned())
        .collect();
    let mut out = Vec::with_capacity(tokens.len());
    let mut tokens = tokens.into_iter().map(Some).collect::<Vec<_>>();
    let mut i = 0;
    while i < tokens.len() {
        let longest = (2..=tables.max_compound_len.min(tokens.len() - i))
            .rev()
            .find_map(|n| tables.compound_index.get(&keys[i..i + n]).map(|r| (n, r)));
        match longest {
            Some((n, replacement)) => {
                let parts: Vec<Token> = tokens[i..i + n]
                    .iter_mut()
                    .map(|t| t.take().unwrap())
                    .collect();
                let mut trace: Vec<Step> =
                    parts.iter().flat_map(|p| p.trace.iter().cloned()).collect();
                trace.push(Step::CompoundMerged {
                    parts: parts.iter().map(|p| p.surface.clone()).collect(),
                });
                out.push(Token {
                    surface: replacement.clone(),
                    span: parts[0].span.start..parts[n - 1].span.end,
                    trace,
                });
                i += n;
            }
            None => {
                out.push(tokens[i].take().unwrap());
                i += 1;
            }
        }
    }
    out
}

/// Runs the normalization pipeline with precomputed vocabulary gating.
#[derive(Debug, Clone)]
pub struct Normalizer<'a> {
    tables: &'a NormalizationTables,
    ontologies: &'a Ontologies,
    // Clitic prefixes, longest first.
    prefixes: Vec<(&'a str, &'a [String])>,
}

impl<'a> Normalizer<'a> {
    pub fn new(tables: &'a NormalizationTables, ontologies: &'a Ontologies) -> Self {
        let mut prefixes: Vec<(&str, &[String])> = tables
            .clitics
            .iter()
            .map(|(p, e)| (p.as_str(), e.as_slice()))
            .collect();
        prefixes.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
        Self {
            tables,
            ontologies,
            prefixes,
        }
    }

    /// A surface a clitic remainder may resolve to: an ontology surface or a
    /// variant-table form.
    fn is_gate_form(&self, surface: &str) -> bool {
        self.ontologies.is_known_surface(surface)
            || self.tables.variants.contains_key(surface)
            || self.tables.variants.values().any(|v| v == surface)
    }

    /// A token that is already a known form and must not be split.
    fn is_known(&self, surface: &str) -> bool {
        self.ontologies.is_known_surface(surface) || self.tables.is_table_form(surface)
    }

    /// Replaces tokens that start with a clitic prefix by the prefix
    /// expansion followed by the remainder. Only applies when the token is
    /// not itself a known form and the remainder is one.
    pub fn expand_clitics(&self, tokens: Vec<Token>) -> Vec<Token> {
        let mut out = Vec::with_capacity(tokens.len());
        for token in tokens {
            match self.split_clitic(&token.surface) {
                Some((prefix, expansion, remainder)) => {
                    let prefix_len = prefix.chars().count();
                    let start = token.span.start;
                    let k = expansion.len();
                    for (j, piece) in expansion.iter().enumerate() {
                        let end = if j + 1 == k {
                            start + prefix_len
                        } else {
                            start + j + 1
                        };
                        let mut trace = token.trace.clone();
                        trace.push(Step::CliticExpanded {
                            prefix: prefix.to_owned(),
                        });
                        out.push(Token {
                            surface: piece.clone(),
                            span: start + j..end,
                            trace,
                        });
                    }
                    let mut trace = token.trace.clone();
                    trace.push(Step::CliticExpanded {
                        prefix: prefix.to_owned(),
                    });
                    out.push(Token {
                        surface: remainder.to_owned(),
                        span: start + prefix_len..token.span.end,
                        trace,
                    });
                }
                None => out.push(token),
            }
        }
        out
    }

    fn split_clitic<'s>(&self, surface: &'s str) -> Option<(&'a str, &'a [String], &'s str)> {
        if self.is_known(surface) {
            return None;
        }
        self.prefixes.iter().find_map(|&(prefix, expansion)| {
            let remainder = surface.strip_prefix(prefix)?;
            (!remainder.is_empty() && self.is_gate_form(remainder))
                .then_some((prefix, expansion, remainder))
        })
    }

    pub fn normalize(&self, raw: &RawUtterance) -> NormalizedUtterance {
        let tokens = tokenize(raw);
        let tokens = self.expand_clitics(tokens);
        let mut tokens = merge_compounds(tokens, self.tables);
        for token in &mut tokens {
            let base = self.tables.radicalize(&token.surface).to_owned();
            if base != token.surface {
                let from = std::mem::replace(&mut token.surface, base);
                token.trace.push(Step::Radicalized { from });
            }
        }
        NormalizedUtterance {
            id: raw.id.clone(),
            tokens,
        }
    }
}

/// Normalizes one utterance. Build a [`Normalizer`] once when processing
/// many.
pub fn normalize(
    raw: &RawUtterance,
    tables: &NormalizationTables,
    ontologies: &Ontologies,
) -> NormalizedUtterance {
    Normalizer::new(tables, ontologies).normalize(raw)
}
