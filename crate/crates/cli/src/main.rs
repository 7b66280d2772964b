//! Command-line front end: translate text through the bundled resources,
//! score a corpus, check a bundle, or measure corpus size.
//!
//! Every failure class has its own exit code so scripts can branch on
//! them; the translation or report is the only thing written to stdout.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tarjama::bundle::ResourceBundle;
use tarjama::context::ContextError;
use tarjama::corpus::{
    evaluate_corpus, load_corpus, measure_corpus, render_table, render_tsv, LengthUnit,
};
use tarjama::pipeline::{PipelineError, TranslationFailure, TranslationTrace};
use tarjama::{translate, LanguageTag, TranslateOptions};

/// Exit codes, one per failure class. Usage errors exit 2 (clap's own).
mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const BUNDLE: u8 = 3;
    pub const LANGUAGE: u8 = 4;
    pub const CONTEXT: u8 = 5;
    pub const PARSE: u8 = 6;
    pub const PIPELINE: u8 = 7;
    pub const CORPUS: u8 = 8;
    pub const EVALUATION: u8 = 9;
    pub const INPUT: u8 = 10;
}

#[derive(Parser)]
#[command(
    name = "tarjama",
    about = "Arabic/English transfer translation with context ontologies",
    version
)]
struct Cli {
    /// Resource bundle directory (lexicons, ontologies, parses, stop words).
    #[arg(long, global = true, value_name = "DIR")]
    bundle: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate text between Arabic and English.
    Translate(TranslateArgs),
    /// Score corpus translations against their references.
    Evaluate(EvaluateArgs),
    /// Load every bundle resource and cross-check it.
    Validate,
    /// Print the corpus size figure (Euclidean norm of record lengths).
    CorpusSize(CorpusSizeArgs),
}

#[derive(Args)]
struct TranslateArgs {
    /// Source language; detected from the script when omitted.
    #[arg(long, value_enum)]
    lang: Option<Lang>,
    /// Context ontology; scored against the input when omitted.
    #[arg(long, value_name = "NAME")]
    context: Option<String>,
    /// Append the stage-by-stage report to the output (--trace=kv for
    /// key=value lines).
    #[arg(
        long,
        value_enum,
        num_args = 0..=1,
        require_equals = true,
        default_missing_value = "text"
    )]
    trace: Option<TraceFormat>,
    /// Read the source text from a file instead of the command line.
    #[arg(long, value_name = "FILE", conflicts_with = "text")]
    input: Option<PathBuf>,
    /// Source text; read from stdin when neither this nor --input is given.
    #[arg(value_name = "TEXT")]
    text: Option<String>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Lang {
    Ar,
    En,
}

impl From<Lang> for LanguageTag {
    fn from(lang: Lang) -> LanguageTag {
        match lang {
            Lang::Ar => LanguageTag::Arabic,
            Lang::En => LanguageTag::English,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum TraceFormat {
    /// Labeled section per pipeline stage.
    Text,
    /// key=value lines for test harnesses.
    Kv,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Corpus file; defaults to the bundle's corpus.txt.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: ReportFormat,
}

#[derive(Copy, Clone, ValueEnum)]
enum ReportFormat {
    Table,
    Tsv,
}

#[derive(Args)]
struct CorpusSizeArgs {
    /// Corpus file; defaults to the bundle's corpus.txt.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let Some(bundle_dir) = &cli.bundle else {
        eprintln!("error: --bundle <DIR> is required\n\nUsage: tarjama --bundle <DIR> <COMMAND>");
        return ExitCode::from(exit::USAGE);
    };
    let bundle = match ResourceBundle::load(bundle_dir) {
        Ok(bundle) => bundle,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::BUNDLE);
        }
    };

    let code = match cli.command {
        Command::Translate(args) => cmd_translate(&bundle, args),
        Command::Evaluate(args) => cmd_evaluate(&bundle, args),
        Command::Validate => cmd_validate(&bundle),
        Command::CorpusSize(args) => cmd_corpus_size(&bundle, args),
    };
    ExitCode::from(code)
}

fn read_source(args: &TranslateArgs) -> Result<String, String> {
    if let Some(path) = &args.input {
        return std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()));
    }
    if let Some(text) = &args.text {
        return Ok(text.clone());
    }
    let mut buffer = String::new();
    std::io::stdin()
        .read_to_string(&mut buffer)
        .map_err(|e| format!("cannot read stdin: {e}"))?;
    Ok(buffer)
}

fn cmd_translate(bundle: &ResourceBundle, args: TranslateArgs) -> u8 {
    let text = match read_source(&args) {
        Ok(text) => text,
        Err(message) => {
            eprintln!("error: {message}");
            return exit::INPUT;
        }
    };
    let options = TranslateOptions {
        language: args.lang.map(LanguageTag::from),
        context: args.context.clone(),
    };
    match translate(&text, bundle, &options) {
        Ok(result) => {
            println!("{}", result.output);
            for trace in &result.traces {
                for error in &trace.errors {
                    eprintln!("warning: {error}");
                }
            }
            if let Some(format) = args.trace {
                print_traces(format, &result.traces);
            }
            exit::OK
        }
        Err(TranslationFailure { error, traces }) => {
            eprintln!("error: {error}");
            if let Some(format) = args.trace {
                print_traces(format, &traces);
            }
            pipeline_exit_code(&error)
        }
    }
}

fn print_traces(format: TraceFormat, traces: &[TranslationTrace]) {
    for (i, trace) in traces.iter().enumerate() {
        if traces.len() > 1 {
            println!("--- sentence {} ---", i + 1);
        }
        match format {
            TraceFormat::Text => print!("{}", trace.report()),
            TraceFormat::Kv => print!("{}", trace.key_values()),
        }
    }
}

fn pipeline_exit_code(error: &PipelineError) -> u8 {
    match error {
        PipelineError::Context(inner) => match inner {
            ContextError::EmptyInput | ContextError::NoLetters => exit::LANGUAGE,
            _ => exit::CONTEXT,
        },
        PipelineError::Ontology(_) => exit::CONTEXT,
        PipelineError::Parse(_) => exit::PARSE,
        PipelineError::Lexicon(_)
        | PipelineError::InternalSplitError { .. }
        | PipelineError::CoverageGap { .. }
        | PipelineError::RuleLoopDetected { .. } => exit::PIPELINE,
    }
}

fn cmd_evaluate(bundle: &ResourceBundle, args: EvaluateArgs) -> u8 {
    let records = match &args.corpus {
        Some(path) => match load_corpus(path) {
            Ok(records) => records,
            Err(e) => {
                eprintln!("error: {e}");
                return exit::CORPUS;
            }
        },
        None => match bundle.corpus() {
            Some(records) => records.to_vec(),
            None => {
                eprintln!("error: the bundle ships no corpus.txt; pass --corpus");
                return exit::CORPUS;
            }
        },
    };
    if records.is_empty() {
        eprintln!("warning: corpus is empty");
    }
    let evaluation = evaluate_corpus(&records, bundle);
    let rendered = match args.format {
        ReportFormat::Table => render_table(&evaluation),
        ReportFormat::Tsv => render_tsv(&evaluation),
    };
    print!("{rendered}");
    if evaluation.skipped > 0 {
        eprintln!(
            "error: {} of {} records could not be scored",
            evaluation.skipped,
            evaluation.records.len()
        );
        return exit::EVALUATION;
    }
    exit::OK
}

fn cmd_validate(bundle: &ResourceBundle) -> u8 {
    let summary = bundle.validate();
    print!("{}", summary.render());
    if summary.is_clean() {
        exit::OK
    } else {
        exit::BUNDLE
    }
}

fn cmd_corpus_size(bundle: &ResourceBundle, args: CorpusSizeArgs) -> u8 {
    let records = match &args.corpus {
        Some(path) => match load_corpus(path) {
            Ok(records) => records,
            Err(e) => {
                eprintln!("error: {e}");
                return exit::CORPUS;
            }
        },
        None => match bundle.corpus() {
            Some(records) => records.to_vec(),
            None => {
                eprintln!("error: the bundle ships no corpus.txt; pass --corpus");
                return exit::CORPUS;
            }
        },
    };
    println!("{:.7}", measure_corpus(&records, LengthUnit::Tokens));
    exit::OK
}
