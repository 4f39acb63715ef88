//! The bundled railway-information ontologies, normalization tables and
//! mini-corpus.

use std::path::Path;

use crate::corpus::{self, GoldCorpus, RawUtterance};
use crate::io::parse_ontology;
use crate::normalizer::NormalizationTables;
use crate::ontology::{Ontologies, Ontology};

pub const DOMAIN_ONTOLOGY: &str = include_str!("../data/railway_domain.toml");
pub const TASK_ONTOLOGY: &str = include_str!("../data/railway_task.toml");
pub const NORMALIZATION_TABLES: &str = include_str!("../data/normalization.toml");
pub const MINI_CORPUS: &str = include_str!("../data/mini_corpus.tsv");
pub const MINI_CORPUS_GOLD: &str = include_str!("../data/mini_corpus.gold.tsv");
/// Frozen evaluation report for the mini-corpus under default policies.
pub const MINI_CORPUS_REPORT: &str = include_str!("../data/mini_corpus.report.json");

/// Absolute path of the bundled data directory in the source tree.
pub fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}

pub fn domain_ontology() -> Ontology {
    parse_ontology(DOMAIN_ONTOLOGY, Path::new("railway_domain.toml"))
        .expect("bundled domain ontology parses")
}

pub fn task_ontology() -> Ontology {
    parse_ontology(TASK_ONTOLOGY, Path::new("railway_task.toml"))
        .expect("bundled task ontology parses")
}

pub fn ontologies() -> Ontologies {
    Ontologies::new(domain_ontology(), task_ontology()).expect("bundled ontologies validate")
}

pub fn tables() -> NormalizationTables {
    NormalizationTables::parse(NORMALIZATION_TABLES, Path::new("normalization.toml"))
        .expect("bundled tables parse")
}

pub fn corpus() -> Vec<RawUtterance> {
    corpus::parse_utterances(MINI_CORPUS, Path::new("mini_corpus.tsv"))
        .expect("bundled corpus parses")
}

pub fn gold() -> GoldCorpus {
    corpus::parse_gold(MINI_CORPUS_GOLD, Path::new("mini_corpus.gold.tsv"), None)
        .expect("bundled gold parses")
}
