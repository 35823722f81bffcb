//! Subcommands of the `nerctx` binary.
//!
//! Exit status: 0 success, 2 usage or unreadable input, 3 empty result,
//! 4 malformed model or data file.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use nerctx_core::evaluation::GoldError;
use nerctx_core::recognizer::{recognize_text, ModelError};
use nerctx_core::{
    build_queries, build_weight_table, evaluate, growth_curve, scan_context_occurrences, AnalyzedDocument,
    ContextConfig, ContextKey, CorpusManifest, Document, ExampleSet, GoldCorpus, GrowthError, LearningExample,
    RecognitionModel, Side, WeightConfig, WeightError,
};

use crate::acquire::{acquire, AcquireError, MockClient};
use crate::store::{load_corpus, save_corpus, StoreError, MANIFEST_FILE};
use crate::tsv::{self, FormatError, ModelEntry};

pub const MODEL_FILE: &str = "model.tsv";

#[derive(Debug, Parser)]
#[command(name = "nerctx", version, about = "Learn entity-announcing contexts from seed examples and recognize entities with them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search and fetch documents for the learning examples into a corpus directory.
    Acquire(AcquireArgs),
    /// Build the weight table of one class from a corpus.
    Weigh(WeighArgs),
    /// Annotate documents with a trained model.
    Recognize(RecognizeArgs),
    /// Score annotations against gold spans.
    Evaluate(EvaluateArgs),
    /// Context statistics over growing corpus prefixes.
    Growth(GrowthArgs),
    /// List every context occurrence found in a corpus.
    Extract(ExtractArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ContextArgs {
    /// Number of words in a context.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u16).range(1..))]
    pub context_len: u16,
    /// Which side of the entity the context is read from.
    #[arg(long, default_value = "left", value_parser = parse_side)]
    pub side: Side,
}

impl ContextArgs {
    fn config(&self) -> ContextConfig {
        ContextConfig { length: usize::from(self.context_len), side: self.side }
    }
}

fn parse_side(s: &str) -> Result<Side, String> {
    s.parse().map_err(|_| format!("expected left or right, got {s:?}"))
}

fn parse_non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
        _ => Err(format!("expected a finite number >= 0, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct AcquireArgs {
    /// Learning examples, `surface<TAB>class`.
    #[arg(long)]
    pub examples: PathBuf,
    /// Fixture directory of the mock search client (contains queries.tsv).
    #[arg(long)]
    pub client: PathBuf,
    /// Corpus directory to create or extend.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Class to acquire when the examples file holds several.
    #[arg(long)]
    pub class: Option<String>,
    /// Links requested per query.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_results: u32,
    /// Fetches in flight at once.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub concurrency: u32,
}

#[derive(Debug, Args)]
pub struct WeighArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub examples: PathBuf,
    /// Class to weigh; defaults to the corpus class or the only class present.
    #[arg(long)]
    pub class: Option<String>,
    #[command(flatten)]
    pub context: ContextArgs,
    /// Drop contexts seen fewer times next to learning examples.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_count: u64,
    /// Also store the table in this model directory and register it in model.tsv.
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
    /// Decision threshold recorded in model.tsv.
    #[arg(long, default_value_t = 0.0, value_parser = parse_non_negative)]
    pub threshold: f64,
    /// Decision margin recorded in model.tsv.
    #[arg(long, default_value_t = 0.0, value_parser = parse_non_negative)]
    pub margin: f64,
    /// Weight table destination; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecognizeArgs {
    /// Model directory containing model.tsv.
    #[arg(long)]
    pub model: PathBuf,
    /// Corpus directories or plain UTF-8 text files.
    pub inputs: Vec<PathBuf>,
    /// Side the model's contexts were read from.
    #[arg(long, default_value = "left", value_parser = parse_side)]
    pub side: Side,
    /// Overrides the threshold in model.tsv.
    #[arg(long, value_parser = parse_non_negative)]
    pub threshold: Option<f64>,
    /// Overrides the margin in model.tsv.
    #[arg(long, value_parser = parse_non_negative)]
    pub margin: Option<f64>,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u16).range(1..))]
    pub max_entity_tokens: u16,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Annotation TSV as written by `recognize`.
    #[arg(long)]
    pub annotations: PathBuf,
    /// Gold TSV `doc, start_token, end_token, class`.
    #[arg(long)]
    pub gold: PathBuf,
    /// Machine-readable report destination.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub examples: PathBuf,
    #[arg(long)]
    pub class: Option<String>,
    /// Prefix sizes, comma separated and increasing; every size when absent.
    #[arg(long, value_delimiter = ',')]
    pub steps: Vec<usize>,
    #[command(flatten)]
    pub context: ContextArgs,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_count: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub examples: PathBuf,
    #[arg(long)]
    pub class: Option<String>,
    #[command(flatten)]
    pub context: ContextArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A failed subcommand: what to print and which status to exit with.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
    fn empty(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
    fn malformed(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into() }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io { .. } => Failure::usage(e.to_string()),
            FormatError::Malformed { .. } => Failure::malformed(e.to_string()),
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Format(f) => f.into(),
            StoreError::Manifest { .. } | StoreError::MissingFile(_) => Failure::malformed(e.to_string()),
            StoreError::MissingManifest(_) | StoreError::Write { .. } | StoreError::UnsafeId(_) => Failure::usage(e.to_string()),
        }
    }
}

fn io_failure(path: Option<&Path>, e: io::Error) -> Failure {
    match path {
        Some(p) => Failure::usage(format!("cannot write {}: {e}", p.display())),
        None => Failure::usage(format!("cannot write output: {e}")),
    }
}

type Outcome = Result<(), Failure>;

/// Runs `fill` against `path`, or standard output when absent.
fn emit(path: Option<&Path>, fill: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Outcome {
    let result = match path {
        Some(p) => {
            let mut buf = Vec::new();
            fill(&mut buf).and_then(|_| fs::write(p, buf))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            fill(&mut lock).and_then(|_| lock.flush())
        }
    };
    result.map_err(|e| io_failure(path, e))
}

/// Examples of one class: `wanted` if given, else `fallback` if the file
/// holds several classes, else the only class present.
fn select_examples(path: &Path, wanted: Option<&str>, fallback: &str) -> Result<Vec<LearningExample>, Failure> {
    let all = tsv::read_examples(path)?;
    let classes: BTreeSet<&str> = all.iter().map(|e| e.class_label()).collect();
    let class = match (wanted, classes.len()) {
        (Some(c), _) => c.to_string(),
        (None, 0) => return Err(Failure::usage(format!("{} contains no learning examples", path.display()))),
        (None, 1) => classes.first().expect("one class").to_string(),
        (None, _) if classes.contains(fallback) => fallback.to_string(),
        (None, _) => {
            let list: Vec<&str> = classes.into_iter().collect();
            return Err(Failure::usage(format!(
                "{} holds several classes ({}); choose one with --class",
                path.display(),
                list.join(", ")
            )));
        }
    };
    let chosen: Vec<LearningExample> = all.into_iter().filter(|e| e.class_label() == class).collect();
    if chosen.is_empty() {
        return Err(Failure::usage(format!("{} has no learning examples of class {class:?}", path.display())));
    }
    Ok(chosen)
}

pub fn cmd_acquire(args: &AcquireArgs) -> Outcome {
    let client = MockClient::from_dir(&args.client)?;
    let mut manifest = if args.corpus.join(MANIFEST_FILE).is_file() {
        load_corpus(&args.corpus)?
    } else {
        CorpusManifest::default()
    };
    let examples = select_examples(&args.examples, args.class.as_deref(), manifest.class_label())?;
    let class = examples[0].class_label().to_string();
    if !manifest.class_label().is_empty() && manifest.class_label() != class {
        return Err(Failure::usage(format!(
            "corpus {} holds class {:?}, not {class:?}",
            args.corpus.display(),
            manifest.class_label()
        )));
    }
    let queries = build_queries(&examples, args.max_results as usize).expect("non-empty examples");
    if manifest.class_label().is_empty() {
        manifest = CorpusManifest::new(&class, manifest.documents().to_vec()).expect("documents already valid");
    }
    let report = acquire(&client, &queries, &mut manifest, args.concurrency as usize).map_err(|e| match e {
        AcquireError::AllSearchesFailed { .. } => Failure::usage(e.to_string()),
    })?;
    fs::create_dir_all(&args.corpus).map_err(|e| io_failure(Some(&args.corpus), e))?;
    save_corpus(&args.corpus, &manifest)?;
    for f in &report.fetch_failures {
        eprintln!("skipped {}: {}", f.uri, f.reason);
    }
    match report.added.len() {
        0 => println!("0 new documents"),
        1 => println!("1 document"),
        n => println!("{n} documents"),
    }
    if !report.fetch_failures.is_empty() {
        println!("{} failed", report.fetch_failures.len());
    }
    Ok(())
}

fn weight_config(context: &ContextArgs, min_count: u64) -> WeightConfig {
    WeightConfig { context: context.config(), min_count }
}

fn weight_failure(e: WeightError) -> Failure {
    match e {
        WeightError::EmptyExtraction | WeightError::EmptyCorpus => Failure::empty(e.to_string()),
        _ => Failure::usage(e.to_string()),
    }
}

/// Table file name for `class` inside a model directory.
fn table_file_name(class: &str) -> Result<String, Failure> {
    if class.is_empty() || class.starts_with('.') || class.contains(['/', '\\', '\t', '\n', '\r']) {
        return Err(Failure::usage(format!("class {class:?} cannot be used as a file name")));
    }
    Ok(format!("{class}.tsv"))
}

pub fn cmd_weigh(args: &WeighArgs) -> Outcome {
    let manifest = load_corpus(&args.corpus)?;
    let examples = select_examples(&args.examples, args.class.as_deref(), manifest.class_label())?;
    let table = build_weight_table(manifest.documents(), &examples, &weight_config(&args.context, args.min_count))
        .map_err(weight_failure)?;
    emit(args.output.as_deref(), |out| tsv::write_weight_table(out, &table))?;

    if let Some(dir) = &args.model_dir {
        let class = &table.global().class_label;
        let file = table_file_name(class)?;
        fs::create_dir_all(dir).map_err(|e| io_failure(Some(dir), e))?;
        let table_path = dir.join(&file);
        emit(Some(&table_path), |out| tsv::write_weight_table(out, &table))?;
        let model_path = dir.join(MODEL_FILE);
        let mut entries = if model_path.is_file() { tsv::read_model_entries(&model_path)?.into_iter().map(|(_, e)| e).collect() } else { Vec::new() };
        entries.retain(|e| &e.class != class);
        entries.push(ModelEntry { class: class.clone(), table_file: file, threshold: 0.0, margin: 0.0 });
        // One operating point per model: every row carries the latest values.
        for e in &mut entries {
            e.threshold = args.threshold;
            e.margin = args.margin;
        }
        entries.sort_by(|a, b| a.class.cmp(&b.class));
        emit(Some(&model_path), |out| tsv::write_model_entries(out, &entries))?;
        info!("registered class {class:?} in {}", model_path.display());
    }
    eprintln!("{} contexts, {} occurrences", table.len(), table.global().total_example_hits);
    Ok(())
}

/// Loads `model.tsv` and its tables. All rows must share one threshold and
/// margin; `threshold`/`margin` override them when given.
pub fn load_model(
    dir: &Path,
    side: Side,
    threshold: Option<f64>,
    margin: Option<f64>,
    max_entity_tokens: usize,
) -> Result<RecognitionModel, Failure> {
    let path = dir.join(MODEL_FILE);
    let entries = tsv::read_model_entries(&path)?;
    if entries.is_empty() {
        return Err(Failure::malformed(format!("{}: no classes listed", path.display())));
    }
    let (first_line, first) = &entries[0];
    if let Some((line, _)) = entries.iter().find(|(_, e)| e.threshold != first.threshold || e.margin != first.margin) {
        return Err(Failure::malformed(format!(
            "{}:{line}: threshold and margin differ from the first class",
            path.display()
        )));
    }
    let model_error = |line: usize, e: ModelError| Failure::malformed(format!("{}:{line}: {e}", path.display()));
    let mut model = RecognitionModel::new(threshold.unwrap_or(first.threshold), margin.unwrap_or(first.margin), max_entity_tokens)
        .map_err(|e| model_error(*first_line, e))?;
    for (line, e) in &entries {
        let weights = tsv::read_weight_table(&dir.join(&e.table_file), side).map_err(|err| match err {
            FormatError::Io { .. } => Failure::malformed(format!("{}:{line}: {err}", path.display())),
            FormatError::Malformed { .. } => err.into(),
        })?;
        model.add_class(&e.class, weights).map_err(|err| model_error(*line, err))?;
    }
    Ok(model)
}

/// Documents to annotate: every corpus directory's documents, and each plain
/// file as one document named by its file stem.
fn recognition_inputs(inputs: &[PathBuf]) -> Result<Vec<(String, String)>, Failure> {
    let mut docs = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let manifest = load_corpus(input)?;
            docs.extend(manifest.documents().iter().map(|d: &Document| (d.id.clone(), d.clean.clone())));
        } else {
            let text = tsv::read_file(input)?;
            let id = input.file_stem().and_then(|s| s.to_str()).unwrap_or("input").to_string();
            docs.push((id, text));
        }
    }
    Ok(docs)
}

pub fn cmd_recognize(args: &RecognizeArgs) -> Outcome {
    let model = load_model(&args.model, args.side, args.threshold, args.margin, usize::from(args.max_entity_tokens))?;
    let docs = recognition_inputs(&args.inputs)?;
    let annotations: Vec<_> = docs.iter().flat_map(|(id, text)| recognize_text(id, text, &model)).collect();
    emit(args.output.as_deref(), |out| tsv::write_annotations(out, &annotations))
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Outcome {
    let system = tsv::read_annotations(&args.annotations)?;
    let gold = GoldCorpus::new(tsv::read_gold(&args.gold)?).map_err(|e: GoldError| {
        Failure::malformed(format!("{}: {e}", args.gold.display()))
    })?;
    let report = evaluate(&system, &gold);
    print!("{}", tsv::report_text(&report));
    if let Some(path) = &args.output {
        emit(Some(path), |out| tsv::write_report_tsv(out, &report))?;
    }
    Ok(())
}

pub fn cmd_growth(args: &GrowthArgs) -> Outcome {
    let manifest = load_corpus(&args.corpus)?;
    let examples = select_examples(&args.examples, args.class.as_deref(), manifest.class_label())?;
    let steps: Vec<usize> = if args.steps.is_empty() { (1..=manifest.len()).collect() } else { args.steps.clone() };
    let points = growth_curve(manifest.documents(), &examples, &steps, &weight_config(&args.context, args.min_count))
        .map_err(|e: GrowthError| Failure::usage(e.to_string()))?;
    emit(args.output.as_deref(), |out| tsv::write_growth(out, &points))
}

pub fn cmd_extract(args: &ExtractArgs) -> Outcome {
    let manifest = load_corpus(&args.corpus)?;
    let examples = select_examples(&args.examples, args.class.as_deref(), manifest.class_label())?;
    let set = ExampleSet::new(&examples);
    let config = args.context.config();
    let analyzed: Vec<AnalyzedDocument> = manifest.documents().iter().map(|d| AnalyzedDocument::new(&d.clean, &set)).collect();
    let contexts: BTreeSet<ContextKey> = analyzed.iter().flat_map(|a| a.contexts(config).map(|(k, _)| k)).collect();
    let occurrences = scan_context_occurrences(&analyzed, &contexts);
    let ids: Vec<&str> = manifest.documents().iter().map(|d| d.id.as_str()).collect();
    emit(args.output.as_deref(), |out| tsv::write_extraction(out, &occurrences, &ids, &set))
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Acquire(a) => cmd_acquire(a),
        Command::Weigh(a) => cmd_weigh(a),
        Command::Recognize(a) => cmd_recognize(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Growth(a) => cmd_growth(a),
        Command::Extract(a) => cmd_extract(a),
    }
}

/// Parses `args`, runs the subcommand and maps the outcome to an exit status.
pub fn run(args: impl IntoIterator<Item = OsString>) -> ExitCode {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
