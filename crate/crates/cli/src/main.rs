//! Batch command-line front end for the annotation pipeline.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use onto_slu::corpus::{self, CorpusError};
use onto_slu::evaluator::EvaluationCounts;
use onto_slu::format;
use onto_slu::io::LoadError;
use onto_slu::normalizer::TablesError;
use onto_slu::{
    export_owl, sample, stats, EvaluationReport, NormalizationTables, Ontologies, Pipeline,
    RawUtterance, ScoringPolicy, TieBreak, UnresolvedScoring,
};

#[derive(Parser)]
#[command(
    name = "onto-slu",
    version,
    about = "Ontology-based annotation of transcribed utterances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize and annotate each utterance with its candidate concepts.
    Annotate(RunArgs),
    /// Annotate, then disambiguate through semantic relations.
    Interpret(RunArgs),
    /// Interpret and score against gold labels.
    Eval(EvalArgs),
    /// Check the ontologies and normalization tables.
    Validate(ResourceArgs),
    /// Write the ontologies as OWL RDF/XML.
    ExportOwl(ExportArgs),
    /// Count utterances and words of a raw corpus.
    Stats(StatsArgs),
    /// Build a report from the four counts alone.
    ReportFromCounts(CountsArgs),
}

#[derive(Args)]
struct ResourceArgs {
    /// Domain ontology; the bundled railway ontology when omitted.
    #[arg(long, requires = "task")]
    domain: Option<PathBuf>,
    /// Task ontology; must be given together with --domain.
    #[arg(long, requires = "domain")]
    task: Option<PathBuf>,
    /// Normalization tables; the bundled tables when omitted.
    #[arg(long)]
    tables: Option<PathBuf>,
}

#[derive(Args)]
struct IoArgs {
    /// Raw utterance file (`id<TAB>text` lines); stdin when omitted.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Xml,
    Tsv,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    io: IoArgs,
    #[arg(long, value_enum, default_value = "xml")]
    format: Format,
    /// Which marker wins when two are equally close.
    #[arg(long, default_value = "left")]
    tie_break: TieBreak,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    resources: ResourceArgs,
    #[command(flatten)]
    io: IoArgs,
    /// Gold labels (`id<TAB>index<TAB>surface<TAB>label` lines).
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value = "left")]
    tie_break: TieBreak,
    /// How ambiguous tokens left unresolved are counted.
    #[arg(long, default_value = "not-recognized")]
    unresolved: UnresolvedScoring,
    /// Leave relation-marker tokens out of the counts.
    #[arg(long)]
    exclude_relation_markers: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    resources: ResourceArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct CountsArgs {
    /// Correct annotations (a).
    #[arg(long)]
    correct: u64,
    /// Incorrect annotations (b).
    #[arg(long)]
    incorrect: u64,
    /// Not recognized (c).
    #[arg(long)]
    not_recognized: u64,
    /// Total words (d); must equal a + b + c.
    #[arg(long)]
    total: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Validation(String),
    Alignment(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Alignment(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Validation(m) | Failure::Alignment(m) => f.write_str(m),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Invalid { .. } => Failure::Validation(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<TablesError> for Failure {
    fn from(e: TablesError) -> Self {
        match e {
            TablesError::Invalid { .. } => Failure::Validation(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::Input(e.to_string())
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

impl ResourceArgs {
    fn ontologies(&self) -> Result<Ontologies> {
        match (&self.domain, &self.task) {
            (Some(d), Some(t)) => Ok(onto_slu::load_ontologies(d, t)?),
            _ => Ok(sample::ontologies()),
        }
    }

    fn tables(&self) -> Result<NormalizationTables> {
        match &self.tables {
            Some(path) => Ok(NormalizationTables::load(path)?),
            None => Ok(sample::tables()),
        }
    }
}

impl IoArgs {
    fn utterances(&self) -> Result<Vec<RawUtterance>> {
        match &self.input {
            Some(path) => Ok(corpus::load_utterances(path)?),
            None => {
                let mut text = String::new();
                io::stdin()
                    .read_to_string(&mut text)
                    .map_err(|e| Failure::Input(format!("<stdin>: {e}")))?;
                Ok(corpus::parse_utterances(&text, Path::new("<stdin>"))?)
            }
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("<stdout>: {e}"))),
    }
}

fn pipeline(resources: &ResourceArgs, tie_break: TieBreak) -> Result<Pipeline> {
    Ok(Pipeline::new(
        resources.ontologies()?,
        resources.tables()?,
        tie_break,
    ))
}

fn cmd_annotate(args: &RunArgs) -> Result<()> {
    let pipeline = pipeline(&args.resources, args.tie_break)?;
    let raws = args.io.utterances()?;
    let text = if raws.is_empty() {
        String::new()
    } else {
        let annotated = pipeline.annotate_all(&raws);
        match args.format {
            Format::Xml => format::annotations_to_xml(&annotated),
            Format::Tsv => format::annotations_to_tsv(&annotated),
        }
    };
    write_output(args.io.out.as_deref(), &text)
}

fn cmd_interpret(args: &RunArgs) -> Result<()> {
    let pipeline = pipeline(&args.resources, args.tie_break)?;
    let raws = args.io.utterances()?;
    let text = if raws.is_empty() {
        String::new()
    } else {
        let interpreted = pipeline.interpret_all(&raws);
        match args.format {
            Format::Xml => format::interpretations_to_xml(&interpreted),
            Format::Tsv => format::interpretations_to_tsv(&interpreted),
        }
    };
    write_output(args.io.out.as_deref(), &text)
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let pipeline = pipeline(&args.resources, args.tie_break)?;
    let raws = args.io.utterances()?;
    let gold = corpus::load_gold(&args.gold, Some(pipeline.ontologies()))?;
    let policy = ScoringPolicy {
        unresolved: args.unresolved,
        include_relation_markers: !args.exclude_relation_markers,
    };
    let report = pipeline
        .evaluate(&raws, &gold, &policy)
        .map_err(|e| Failure::Alignment(e.to_string()))?;
    write_output(args.io.out.as_deref(), &report.to_json())?;
    eprint!("{}", report.table());
    Ok(())
}

fn cmd_validate(args: &ResourceArgs) -> Result<()> {
    let ontologies = args.ontologies()?;
    let tables = args.tables()?;
    let mut findings: Vec<String> = ontologies
        .validate()
        .findings
        .iter()
        .map(ToString::to_string)
        .collect();
    findings.extend(tables.check().iter().map(ToString::to_string));
    if findings.is_empty() {
        eprintln!(
            "ok: {} and {} ({} concepts, {} relations)",
            ontologies.domain().name(),
            ontologies.task().name(),
            ontologies.iter().map(|o| o.concepts().len()).sum::<usize>(),
            ontologies
                .iter()
                .map(|o| o.relations().len())
                .sum::<usize>(),
        );
        Ok(())
    } else {
        Err(Failure::Validation(findings.join("\n")))
    }
}

fn cmd_export_owl(args: &ExportArgs) -> Result<()> {
    let ontologies = args.resources.ontologies()?;
    let owl = export_owl(&ontologies.iter().collect::<Vec<_>>());
    write_output(args.out.as_deref(), &owl)
}

fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let s = stats(&args.io.utterances()?);
    let avg = s
        .avg_words_per_utterance()
        .map_or_else(|| "n/a".to_owned(), |v| format!("{v:.2}"));
    let text = format!(
        "utterances\t{}\nwords\t{}\navg_words_per_utterance\t{avg}\n",
        s.utterance_count, s.word_count
    );
    write_output(args.io.out.as_deref(), &text)
}

fn cmd_report_from_counts(args: &CountsArgs) -> Result<()> {
    let counts = EvaluationCounts::from_parts(
        args.correct,
        args.incorrect,
        args.not_recognized,
        args.total,
    )
    .map_err(|e| Failure::Input(e.to_string()))?;
    let report = EvaluationReport::from_counts(counts);
    write_output(args.out.as_deref(), &report.to_json())?;
    eprint!("{}", report.table());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Annotate(a) => cmd_annotate(a),
        Command::Interpret(a) => cmd_interpret(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Validate(a) => cmd_validate(a),
        Command::ExportOwl(a) => cmd_export_owl(a),
        Command::Stats(a) => cmd_stats(a),
        Command::ReportFromCounts(a) => cmd_report_from_counts(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
