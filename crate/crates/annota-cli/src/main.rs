//! Command-line entry point: annotate plain text, compile lexicons, train
//! the tagger, evaluate accuracy, and measure throughput.
//!
//! Exit codes: 0 success, 1 usage error, 2 processing error (including an
//! accuracy below `--min`). The chosen output format is the only thing
//! written to stdout; diagnostics go to stderr.

use std::fmt;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use annota::eval::{
    BenchStage, bench_stage, document_from_gold, eval_lemma, eval_pos, gold_layout,
};
use annota::formats::{read_conllu, write_conll, write_json_rebased};
use annota::morph::store::compile_lexicon;
use annota::morph::tags::TagGrammar;
use annota::pipeline::{PipelineConfig, build_pipeline, build_pipeline_over};
use annota::pos::{CoarseTagMap, TrainOptions, train, training_sentences};
use annota::standard_registry;

#[derive(Parser)]
#[command(
    name = "annota",
    version,
    about = "Fast, modular text annotation for Italian",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Annotate plain text (stdin or --input) with the configured pipeline.
    Annotate(AnnotateArgs),
    /// Compile a full-form lexicon TSV into an immutable store file.
    CompileLexicon(CompileLexiconArgs),
    /// Train the part-of-speech tagger on CoNLL-U data.
    TrainPos(TrainPosArgs),
    /// Evaluate POS or lemma accuracy against a gold CoNLL-U file.
    Eval(EvalArgs),
    /// Measure stage throughput over a plain-text corpus.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Conll,
    Json,
}

#[derive(Args)]
struct AnnotateArgs {
    /// Properties file configuring the pipeline (`annotators = ...` plus
    /// dotted keys). Defaults to a tokenize-only pipeline.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output format on stdout.
    #[arg(long, value_enum, default_value_t = OutputFormat::Conll)]
    format: OutputFormat,
    /// Input file; stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Process blank-line-separated chunks concurrently over the shared
    /// pipeline; output order is preserved.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Re-base JSON offsets onto the whole input stream instead of each
    /// chunk.
    #[arg(long)]
    global_offsets: bool,
}

#[derive(Args)]
struct CompileLexiconArgs {
    /// Lexicon TSV: form<TAB>lemma<TAB>tagstring.
    #[arg(long)]
    input: PathBuf,
    /// Store file to write.
    #[arg(long)]
    out: PathBuf,
    /// Tag-string grammar file; bundled Italian grammar when omitted.
    #[arg(long)]
    tag_grammar: Option<PathBuf>,
}

#[derive(Args)]
struct TrainPosArgs {
    /// Training CoNLL-U file.
    #[arg(long)]
    train: PathBuf,
    /// Optional development CoNLL-U file for a held-out accuracy report.
    #[arg(long)]
    dev: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    epochs: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EvalTask {
    Pos,
    Lemma,
}

#[derive(Args)]
struct EvalArgs {
    /// Gold CoNLL-U file.
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, value_enum)]
    task: EvalTask,
    /// Trained tagger model (required for both tasks).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Compiled lexicon store (required for the lemma task).
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Annotate over gold token boundaries instead of re-tokenizing.
    #[arg(long)]
    gold_tokens: bool,
    /// Exit nonzero when accuracy falls below this threshold.
    #[arg(long)]
    min: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StageArg {
    Tokenize,
    Pos,
    Lemma,
    Full,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    stage: StageArg,
    /// Plain-text corpus file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 2)]
    warmup: usize,
    /// Trained tagger model (required for pos, lemma and full).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Compiled lexicon store (required for lemma and full).
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Processing(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Processing(msg) => write!(f, "{msg}"),
        }
    }
}

fn error_chain(err: &dyn std::error::Error) -> String {
    let mut msg = err.to_string();
    let mut source = err.source();
    while let Some(s) = source {
        msg.push_str(": ");
        msg.push_str(&s.to_string());
        source = s.source();
    }
    msg
}

fn processing(err: impl std::error::Error) -> CliError {
    CliError::Processing(error_chain(&err))
}

fn processing_at(path: &std::path::Path, err: impl std::error::Error) -> CliError {
    CliError::Processing(format!("{}: {}", path.display(), error_chain(&err)))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("annota: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Processing(msg)) => {
            eprintln!("annota: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Annotate(args) => annotate(args),
        Command::CompileLexicon(args) => compile(args),
        Command::TrainPos(args) => train_pos(args),
        Command::Eval(args) => eval(args),
        Command::Bench(args) => bench(args),
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| CliError::Processing(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| CliError::Processing(format!("cannot read stdin: {e}")))?;
            Ok(text)
        }
    }
}

/// Streams blank-line-separated chunks off a line-buffered reader,
/// tracking each chunk's character offset into the input stream.
struct Chunker<R: std::io::BufRead> {
    reader: R,
    chars_seen: usize,
    done: bool,
}

impl<R: std::io::BufRead> Chunker<R> {
    fn new(reader: R) -> Self {
        Chunker {
            reader,
            chars_seen: 0,
            done: false,
        }
    }

    fn next_chunk(&mut self) -> Result<Option<(usize, String)>, CliError> {
        let mut chunk = String::new();
        let mut chunk_start = self.chars_seen;
        loop {
            let mut line = String::new();
            let read = self
                .reader
                .read_line(&mut line)
                .map_err(|e| CliError::Processing(format!("cannot read input: {e}")))?;
            if read == 0 {
                self.done = true;
                return Ok(if chunk.trim().is_empty() {
                    None
                } else {
                    Some((chunk_start, chunk))
                });
            }
            let line_chars = line.chars().count();
            if line.trim().is_empty() {
                self.chars_seen += line_chars;
                if chunk.trim().is_empty() {
                    chunk.clear();
                    chunk_start = self.chars_seen;
                    continue;
                }
                return Ok(Some((chunk_start, chunk)));
            }
            if chunk.is_empty() {
                chunk_start = self.chars_seen;
            }
            self.chars_seen += line_chars;
            chunk.push_str(&line);
        }
    }

    /// Up to `limit` chunks; fewer only at end of input.
    fn next_batch(&mut self, limit: usize) -> Result<Vec<(usize, String)>, CliError> {
        let mut batch = Vec::with_capacity(limit);
        while batch.len() < limit && !self.done {
            match self.next_chunk()? {
                Some(chunk) => batch.push(chunk),
                None => break,
            }
        }
        Ok(batch)
    }
}

fn annotate(args: AnnotateArgs) -> Result<(), CliError> {
    let registry = standard_registry();
    let config = match &args.config {
        Some(path) => PipelineConfig::from_properties_file(path).map_err(processing)?,
        None => PipelineConfig::new(["tokenize"]),
    };
    let pipeline = build_pipeline(&registry, &config).map_err(processing)?;

    let reader: Box<dyn std::io::BufRead> = match &args.input {
        Some(p) => Box::new(std::io::BufReader::new(fs::File::open(p).map_err(
            |e| CliError::Processing(format!("cannot read {}: {e}", p.display())),
        )?)),
        None => Box::new(std::io::BufReader::new(std::io::stdin())),
    };
    let mut writer: Box<dyn Write> = match &args.output {
        Some(p) => Box::new(std::io::BufWriter::new(fs::File::create(p).map_err(
            |e| CliError::Processing(format!("cannot write {}: {e}", p.display())),
        )?)),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    };

    let render = |base: usize, chunk: &str| -> Result<String, CliError> {
        let doc = pipeline.annotate(chunk).map_err(processing)?;
        Ok(match args.format {
            OutputFormat::Conll => write_conll(&doc),
            OutputFormat::Json => {
                let offset = if args.global_offsets { base } else { 0 };
                let mut line = write_json_rebased(&doc, offset);
                line.push('\n');
                line
            }
        })
    };

    // Chunks stream through in bounded batches; a batch is annotated
    // (concurrently with --threads), emitted in input order, then the
    // next batch is read.
    let threads = args.threads.max(1);
    let batch_size = threads * 8;
    let mut chunker = Chunker::new(reader);
    loop {
        let batch = chunker.next_batch(batch_size)?;
        if batch.is_empty() {
            break;
        }
        let rendered: Vec<Result<String, CliError>> = if threads == 1 || batch.len() == 1 {
            batch.iter().map(|(base, chunk)| render(*base, chunk)).collect()
        } else {
            let next = AtomicUsize::new(0);
            let results: Vec<Mutex<Option<Result<String, CliError>>>> =
                batch.iter().map(|_| Mutex::new(None)).collect();
            std::thread::scope(|scope| {
                for _ in 0..threads.min(batch.len()) {
                    scope.spawn(|| {
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= batch.len() {
                                break;
                            }
                            let (base, chunk) = &batch[i];
                            let outcome = render(*base, chunk);
                            *results[i].lock().unwrap() = Some(outcome);
                        }
                    });
                }
            });
            results
                .into_iter()
                .map(|cell| cell.into_inner().unwrap().expect("worker finished"))
                .collect()
        };
        for piece in rendered {
            let piece = piece?;
            writer
                .write_all(piece.as_bytes())
                .map_err(|e| CliError::Processing(format!("cannot write output: {e}")))?;
        }
    }
    writer
        .flush()
        .map_err(|e| CliError::Processing(format!("cannot write output: {e}")))?;
    Ok(())
}

fn compile(args: CompileLexiconArgs) -> Result<(), CliError> {
    let grammar = match &args.tag_grammar {
        Some(path) => TagGrammar::from_file(path).map_err(processing)?,
        None => TagGrammar::default_italian().clone(),
    };
    let report = compile_lexicon(&args.input, &args.out, &grammar).map_err(processing)?;
    eprintln!(
        "compiled {} entries from {} lines ({} malformed) into {}",
        report.header.entry_count,
        report.total_lines,
        report.malformed_lines.len(),
        args.out.display()
    );
    for line in report.malformed_lines.iter().take(20) {
        eprintln!("  malformed line {line}");
    }
    Ok(())
}

fn train_pos(args: TrainPosArgs) -> Result<(), CliError> {
    let sentences = read_conllu(&args.train).map_err(|e| processing_at(&args.train, e))?;
    let corpus = training_sentences(&sentences).map_err(processing)?;
    let outcome = train(
        &corpus,
        TrainOptions {
            epochs: args.epochs,
            seed: args.seed,
        },
    )
    .map_err(processing)?;
    for (epoch, accuracy) in outcome.epoch_accuracy.iter().enumerate() {
        eprintln!("epoch\t{}\ttrain_accuracy\t{accuracy:.4}", epoch + 1);
    }
    if let Some(dev_path) = &args.dev {
        let dev = read_conllu(dev_path).map_err(|e| processing_at(dev_path, e))?;
        let dev_corpus = training_sentences(&dev).map_err(processing)?;
        let mut correct = 0usize;
        let mut total = 0usize;
        for sent in &dev_corpus {
            let words: Vec<&str> = sent.words.iter().map(|w| w.as_str()).collect();
            let tags = outcome.model.tag_sentence(&words);
            correct += tags.iter().zip(&sent.tags).filter(|(a, b)| a == b).count();
            total += sent.tags.len();
        }
        let accuracy = if total == 0 { 0.0 } else { correct as f64 / total as f64 };
        eprintln!("dev\tupos_accuracy\t{accuracy:.4}\ttokens\t{total}");
    }
    outcome.model.save(&args.out).map_err(processing)?;
    eprintln!(
        "saved model with {} features over {} tags to {}",
        outcome.model.feature_count(),
        outcome.model.tagset().len(),
        args.out.display()
    );
    Ok(())
}

fn eval(args: EvalArgs) -> Result<(), CliError> {
    let gold = read_conllu(&args.gold).map_err(|e| processing_at(&args.gold, e))?;
    let model_path = args
        .model
        .as_ref()
        .ok_or_else(|| CliError::Usage("eval requires --model".to_string()))?;

    let registry = standard_registry();
    let mut config = PipelineConfig::new(match (args.task, args.gold_tokens) {
        (EvalTask::Pos, false) => vec!["tokenize", "pos"],
        (EvalTask::Pos, true) => vec!["pos"],
        (EvalTask::Lemma, false) => vec!["tokenize", "morph", "pos", "lemma"],
        (EvalTask::Lemma, true) => vec!["morph", "pos", "lemma"],
    });
    config.set_property("pos", "model", model_path.display().to_string());
    if args.task == EvalTask::Lemma {
        let lexicon = args
            .lexicon
            .as_ref()
            .ok_or_else(|| CliError::Usage("eval --task lemma requires --lexicon".to_string()))?;
        config.set_property("morph", "lexicon", lexicon.display().to_string());
    }

    let doc = if args.gold_tokens {
        let pipeline = build_pipeline_over(&registry, &config, &["tokens", "sentences"])
            .map_err(processing)?;
        let mut doc = document_from_gold(&gold);
        pipeline.annotate_document(&mut doc).map_err(processing)?;
        doc
    } else {
        let pipeline = build_pipeline(&registry, &config).map_err(processing)?;
        pipeline
            .annotate(&gold_layout(&gold).text)
            .map_err(processing)?
    };

    let (task_name, outcome) = match args.task {
        EvalTask::Pos => (
            "pos",
            eval_pos(&doc, &gold, CoarseTagMap::default_upos()).map_err(processing)?,
        ),
        EvalTask::Lemma => ("lemma", eval_lemma(&doc, &gold).map_err(processing)?),
    };
    let accuracy = outcome.accuracy();
    println!("{task_name}\t{}\t{accuracy:.4}", outcome.total_gold);
    if let Some(min) = args.min
        && accuracy < min {
            return Err(CliError::Processing(format!(
                "accuracy {accuracy:.4} below required minimum {min:.4}"
            )));
        }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    if args.runs == 0 {
        return Err(CliError::Usage("bench requires --runs >= 1".to_string()));
    }
    let stage = match args.stage {
        StageArg::Tokenize => BenchStage::Tokenize,
        StageArg::Pos => BenchStage::Pos,
        StageArg::Lemma => BenchStage::Lemma,
        StageArg::Full => BenchStage::Full,
    };
    let annotators: Vec<&str> = match stage {
        BenchStage::Tokenize => vec!["tokenize"],
        BenchStage::Pos => vec!["tokenize", "pos"],
        BenchStage::Lemma | BenchStage::Full => vec!["tokenize", "morph", "pos", "lemma"],
    };
    let mut config = PipelineConfig::new(annotators.iter().copied());
    if annotators.contains(&"pos") {
        let model = args
            .model
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("bench --stage {:?} requires --model", args.stage).to_lowercase()))?;
        config.set_property("pos", "model", model.display().to_string());
    }
    if annotators.contains(&"morph") {
        let lexicon = args
            .lexicon
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("bench --stage {:?} requires --lexicon", args.stage).to_lowercase()))?;
        config.set_property("morph", "lexicon", lexicon.display().to_string());
    }
    let registry = standard_registry();
    let pipeline = build_pipeline(&registry, &config).map_err(processing)?;
    let text = read_input(Some(&args.input))?;
    let report = bench_stage(&pipeline, stage, &text, args.runs, args.warmup).map_err(processing)?;
    print!("{}", report.to_tsv());
    Ok(())
}
