//! Ontology-based understanding of transcribed spoken utterances in a
//! restricted domain.
//!
//! Raw utterances are normalized against the same standard the ontologies
//! were written in, each token is annotated with the concepts whose instances
//! it matches, and tokens with several candidate concepts are disambiguated
//! with the semantic relations triggered by nearby tokens. Results are scored
//! token by token against gold labels.
//!
//! ```
//! use onto_slu::{sample, Pipeline, RawUtterance, TieBreak};
//!
//! let pipeline = Pipeline::new(sample::ontologies(), sample::tables(), TieBreak::Left);
//! let out = pipeline.interpret(&RawUtterance::new("u", "ltwns IlmADy sAEh"));
//! assert_eq!(out.tokens[1].final_label.committed(), Some("Arrival_City"));
//! ```

pub mod annotator;
pub mod corpus;
pub mod evaluator;
pub mod format;
pub mod interpreter;
pub mod io;
pub mod normalizer;
pub mod ontology;
pub mod owl;
pub mod pipeline;
pub mod sample;
pub mod scalar;
pub mod translit;

pub use annotator::{annotate, AnnotatedUtterance, AnnotationStatus, TokenAnnotation};
pub use corpus::{stats, CorpusStats, GoldCorpus};
pub use evaluator::{
    compare, metrics, report, EvalError, EvaluationCounts, EvaluationReport, Metrics,
    ScoringPolicy, UnresolvedScoring,
};
pub use interpreter::{
    interpret, resolve_token, FinalLabel, InterpretedUtterance, Outcome, TieBreak,
};
pub use io::{load_ontologies, load_ontology, save_ontology, LoadError};
pub use normalizer::{normalize, NormalizationTables, NormalizedUtterance, RawUtterance};
pub use ontology::{ConceptLabel, Ontologies, Ontology, RelationId, ValidationReport};
pub use owl::export_owl;
pub use pipeline::Pipeline;
pub use scalar::{Exact, Scalar};

/// Metrics in double precision.
pub type Metrics64 = Metrics<f64>;
/// Metrics in single precision.
pub type Metrics32 = Metrics<f32>;
/// Metrics as exact ratios of counts.
pub type ExactMetrics = Metrics<Exact>;
