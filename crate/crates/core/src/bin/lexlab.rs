use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lexlab::daughter::DaughterLexicon;
use lexlab::evaluation::{evaluate, lexical_statistics, EvaluationBundle};
use lexlab::mother::corpus::{parse_corpus, write_corpus, CorpusHeader};
use lexlab::mother::{generate_corpus, GoldLexicon, PhraseKind, FRAGMENT_LEXICON};
use lexlab::runner::{load_config_file, run_experiment, run_pair, ExperimentLog, RunError};

const EXIT_CONFIG: u8 = 2;
const EXIT_PIPELINE: u8 = 3;

#[derive(Parser)]
#[command(name = "lexlab", version, about = "Mother/daughter function-word acquisition experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus from the mother grammar.
    Generate {
        #[arg(long, value_parser = parse_kind)]
        kind: PhraseKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Grammar file; defaults to the shipped fragment lexicon.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Output file; defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one experiment from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a train and a test experiment and compare them.
    RunPair {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Also write the comparison JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a saved daughter lexicon against a gold lexicon.
    Evaluate {
        #[arg(long)]
        lexicon_dump: PathBuf,
        /// Corpus to take lexical statistics from; defaults to the dump's counts.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Directory for the report bundle; without it only a summary is printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write plot data (non-outlier frequencies per class) for a finished run.
    ExportPlots {
        #[arg(long)]
        run_dir: PathBuf,
    },
}

fn parse_kind(s: &str) -> Result<PhraseKind, String> {
    s.parse().map_err(|_| format!("expected np or sentence, got {s:?}"))
}

enum Failure {
    Config(String),
    Pipeline(String),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Pipeline(e.to_string())
        }
    }
}

fn pipeline<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Pipeline(format!("{context}: {e}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Pipeline(format!("{}: {e}", path.display())))
}

fn gold_lexicon(path: Option<&Path>) -> Result<GoldLexicon, Failure> {
    let text = match path {
        Some(p) => read(p)?,
        None => FRAGMENT_LEXICON.to_string(),
    };
    GoldLexicon::load(&text).map_err(pipeline("lexicon"))
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(pipeline("json"))?;
    println!("{text}");
    Ok(())
}

fn summary(log: &ExperimentLog) -> serde_json::Value {
    serde_json::json!({
        "output_dir": log.config.output_dir,
        "exemplars": log.exemplars,
        "tokens": log.tokens,
        "corpus_sha256": log.corpus_sha256,
        "acquisition": log.acquisition,
        "fisher": log.fisher,
    })
}

fn evaluate_dump(dump: &Path, corpus: Option<&Path>, gold: Option<&Path>) -> Result<EvaluationBundle, Failure> {
    let daughter = DaughterLexicon::from_jsonl(&read(dump)?).map_err(pipeline("lexicon dump"))?;
    let gold = gold_lexicon(gold)?;
    let mut bundle = evaluate(&gold, &daughter).map_err(pipeline("evaluation"))?;
    if let Some(c) = corpus {
        let corpus = parse_corpus(&read(c)?).map_err(pipeline("corpus"))?;
        bundle.lexstats = lexical_statistics(corpus.tokens()).map_err(pipeline("evaluation"))?;
    }
    Ok(bundle)
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { kind, n, seed, lexicon, out } => {
            if n == 0 {
                return Err(Failure::Config("--n must be at least 1".into()));
            }
            let gold = gold_lexicon(lexicon.as_deref())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let utterances = generate_corpus(&gold, kind, n, &mut rng).map_err(pipeline("generation"))?;
            let header = CorpusHeader { seed, kind, n };
            let tokens: Vec<&[String]> = utterances.iter().map(|u| u.tokens.as_slice()).collect();
            match out {
                Some(path) => {
                    let mut buf = Vec::new();
                    write_corpus(&mut buf, &header, tokens).map_err(pipeline("write"))?;
                    fs::write(&path, buf).map_err(pipeline("write"))?;
                }
                None => {
                    let stdout = io::stdout();
                    let mut lock = stdout.lock();
                    write_corpus(&mut lock, &header, tokens).map_err(pipeline("write"))?;
                    lock.flush().map_err(pipeline("write"))?;
                }
            }
            Ok(())
        }
        Command::Run { config } => {
            let cfg = load_config_file(&config).map_err(|e| Failure::Config(e.to_string()))?;
            let outcome = run_experiment(&cfg)?;
            print_json(&summary(&outcome.log))
        }
        Command::RunPair { train, test, out } => {
            let train = load_config_file(&train).map_err(|e| Failure::Config(e.to_string()))?;
            let test = load_config_file(&test).map_err(|e| Failure::Config(e.to_string()))?;
            let report = run_pair(&train, &test)?;
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report).map_err(pipeline("json"))? + "\n";
                fs::write(&path, text).map_err(pipeline("write"))?;
            }
            print_json(&report)
        }
        Command::Evaluate { lexicon_dump, corpus, gold, out } => {
            let bundle = evaluate_dump(&lexicon_dump, corpus.as_deref(), gold.as_deref())?;
            if let Some(dir) = out {
                bundle.write(&dir).map_err(pipeline("write"))?;
            }
            print_json(&serde_json::json!({
                "lexstats": bundle.lexstats,
                "boxplots": bundle.boxplots,
                "fisher": bundle.fisher,
            }))
        }
        Command::ExportPlots { run_dir } => {
            let log: ExperimentLog =
                serde_json::from_str(&read(&run_dir.join("log.json"))?).map_err(pipeline("log.json"))?;
            let bundle = evaluate_dump(&run_dir.join("daughter.jsonl"), None, log.config.lexicon_path.as_deref())?;
            let path = run_dir.join("plot_points.csv");
            bundle.write_plot_points(&path).map_err(pipeline("write"))?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("lexlab: config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Pipeline(msg)) => {
            eprintln!("lexlab: {msg}");
            ExitCode::from(EXIT_PIPELINE)
        }
    }
}
