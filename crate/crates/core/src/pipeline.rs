//! Normalize → annotate → interpret over loaded resources.

use crate::annotator::{annotate, AnnotatedUtterance};
use crate::corpus::GoldCorpus;
use crate::evaluator::{report, EvalError, EvaluationReport, ScoringPolicy};
use crate::interpreter::{interpret, InterpretedUtterance, TieBreak};
use crate::normalizer::{NormalizationTables, NormalizedUtterance, Normalizer, RawUtterance};
use crate::ontology::Ontologies;

#[derive(Debug, Clone)]
pub struct Pipeline {
    ontologies: Ontologies,
    tables: NormalizationTables,
    tie_break: TieBreak,
}

impl Pipeline {
    pub fn new(ontologies: Ontologies, tables: NormalizationTables, tie_break: TieBreak) -> Self {
        Self {
            ontologies,
            tables,
            tie_break,
        }
    }

    pub fn ontologies(&self) -> &Ontologies {
        &self.ontologies
    }

    pub fn tables(&self) -> &NormalizationTables {
        &self.tables
    }

    pub fn normalize(&self, raw: &RawUtterance) -> NormalizedUtterance {
        Normalizer::new(&self.tables, &self.ontologies).normalize(raw)
    }

    pub fn annotate(&self, raw: &RawUtterance) -> AnnotatedUtterance {
        annotate(&self.normalize(raw), &self.ontologies)
    }

    pub fn interpret(&self, raw: &RawUtterance) -> InterpretedUtterance {
        interpret(&self.annotate(raw), &self.ontologies, self.tie_break)
    }

    pub fn annotate_all(&self, raws: &[RawUtterance]) -> Vec<AnnotatedUtterance> {
        let normalizer = Normalizer::new(&self.tables, &self.ontologies);
        raws.iter()
            .map(|r| annotate(&normalizer.normalize(r), &self.ontologies))
            .collect()
    }

    pub fn interpret_all(&self, raws: &[RawUtterance]) -> Vec<InterpretedUtterance> {
        self.annotate_all(raws)
            .iter()
            .map(|a| interpret(a, &self.ontologies, self.tie_break))
            .collect()
    }

    /// Runs the whole pipeline on `raws` and scores it against `gold`.
    pub fn evaluate(
        &self,
        raws: &[RawUtterance],
        gold: &GoldCorpus,
        policy: &ScoringPolicy,
    ) -> Result<EvaluationReport, EvalError> {
        report(&self.interpret_all(raws), gold, policy)
    }
}
