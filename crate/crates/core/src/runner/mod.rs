//! Experiment orchestration: generate or load a corpus, feed it to the
//! daughter one exemplar at a time, fire acquisition, evaluate, and write
//! every artifact to the output directory.
//!
//! Output directory layout:
//!
//! | file              | contents                                        |
//! |-------------------|-------------------------------------------------|
//! | `corpus.txt`      | the exemplars, one per line                     |
//! | `frequency.csv`   | daughter frequency table                        |
//! | `daughter.jsonl`  | daughter lexicon dump                           |
//! | `acquisition.json`| acquisition report                              |
//! | `events.jsonl`    | one event per ingested exemplar and per firing  |
//! | `lexstats.csv`, `topk.csv`, `boxplot.csv`, `fisher.json` | evaluation |
//! | `log.json`        | config echo, digests, summary; wall-clock data only under `timestamps` |

mod config;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::acquisition::{
    acquire_function_content, build_frequency_table, write_frequency_csv, AcquisitionError, AcquisitionReport,
    LabelMint,
};
use crate::daughter::{DaughterError, DaughterLexicon, DumpError};
use crate::evaluation::{evaluate, EvaluationBundle, EvaluationError, FisherReport};
use crate::mother::corpus::{parse_corpus, render_corpus, CorpusError, CorpusHeader};
use crate::mother::{
    feedback, generate_corpus, Feedback, GenerationError, GoldLexicon, LexiconError, PhraseKind, FRAGMENT_LEXICON,
    SAMPLING_POLICY,
};

pub use config::{
    load_config, load_config_file, validate, ConfigError, ExperimentConfig, DEFAULT_DAUGHTER_UTTERANCES,
    DEFAULT_OUTPUT_DIR,
};

/// RNG stream used for daughter utterances; stream 0 generates the corpus.
const DAUGHTER_STREAM: u64 = 1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("lexicon: {0}")]
    Lexicon(#[from] LexiconError),
    #[error("corpus: {0}")]
    Corpus(#[from] CorpusError),
    #[error("generation: {0}")]
    Generation(#[from] GenerationError),
    #[error("daughter: {0}")]
    Daughter(#[from] DaughterError),
    #[error("lexicon dump: {0}")]
    Dump(#[from] DumpError),
    #[error("acquisition: {0}")]
    Acquisition(#[from] AcquisitionError),
    #[error("evaluation: {0}")]
    Evaluation(#[from] EvaluationError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("train and test runs share seed {0}")]
    SeedCollision(u64),
    #[error("train and test runs would both write to {0}")]
    OutputCollision(PathBuf),
}

impl RunError {
    /// Whether the failure lies in the configuration rather than the pipeline.
    pub fn is_config_error(&self) -> bool {
        matches!(self, RunError::Config(_) | RunError::SeedCollision(_) | RunError::OutputCollision(_))
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix_ms: u128,
    pub phase_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaughterTurn {
    pub tokens: Vec<String>,
    pub feedback: Feedback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionSummary {
    pub fired: bool,
    /// 1-based index of the exemplar after which acquisition fired.
    pub fired_at_exemplar: Option<u64>,
    pub cutoff_frequency: u64,
    pub functional_count: usize,
    pub content_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentLog {
    pub config: ExperimentConfig,
    pub session_id: u64,
    pub lexicon_sha256: String,
    pub sampling_policy: String,
    pub corpus_sha256: Option<String>,
    pub exemplars: u64,
    pub tokens: u64,
    pub phases_completed: Vec<String>,
    pub acquisition: Option<AcquisitionSummary>,
    pub fisher: Option<FisherReport>,
    pub daughter_turns: Vec<DaughterTurn>,
    /// Why the daughter produced no utterances, when it could not.
    pub daughter_silent: Option<String>,
    pub outputs: Vec<String>,
    pub aborted_at: Option<String>,
    pub error: Option<String>,
    /// The only wall-clock-dependent field.
    pub timestamps: Timestamps,
}

/// Everything a finished run produced, in memory.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub log: ExperimentLog,
    pub daughter: DaughterLexicon,
    pub report: Option<AcquisitionReport>,
    pub bundle: EvaluationBundle,
}

fn epoch_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

pub fn session_id_for(cfg: &ExperimentConfig) -> u64 {
    match cfg.session_id {
        Some(id) => id,
        None if cfg.test_mode => cfg.seed,
        None => epoch_ms() as u64,
    }
}

pub fn load_lexicon(cfg: &ExperimentConfig) -> Result<(GoldLexicon, String), RunError> {
    let text = match &cfg.lexicon_path {
        Some(p) => fs::read_to_string(p).map_err(io_err(p))?,
        None => FRAGMENT_LEXICON.to_string(),
    };
    Ok((GoldLexicon::load(&text)?, text))
}

struct Run<'c> {
    cfg: &'c ExperimentConfig,
    log: ExperimentLog,
    clock: Instant,
}

impl Run<'_> {
    fn phase_done(&mut self, name: &str) {
        let ms = self.clock.elapsed().as_secs_f64() * 1000.0;
        self.log.timestamps.phase_ms.insert(name.to_string(), ms);
        self.log.phases_completed.push(name.to_string());
        self.clock = Instant::now();
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let path = self.cfg.output_dir.join(name);
        fs::write(&path, bytes).map_err(io_err(&path))?;
        self.log.outputs.push(name.to_string());
        Ok(())
    }

    fn write_log(&self) -> Result<(), RunError> {
        let path = self.cfg.output_dir.join("log.json");
        let text = serde_json::to_string_pretty(&self.log)? + "\n";
        fs::write(&path, text).map_err(io_err(&path))
    }
}

/// Runs one experiment end to end. On failure `log.json` is still written
/// (when the output directory is usable), with `aborted_at` naming the phase.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    validate(cfg)?;
    let session_id = session_id_for(cfg);
    let mut run = Run {
        cfg,
        log: ExperimentLog {
            config: cfg.clone(),
            session_id,
            lexicon_sha256: String::new(),
            sampling_policy: SAMPLING_POLICY.to_string(),
            corpus_sha256: None,
            exemplars: 0,
            tokens: 0,
            phases_completed: Vec::new(),
            acquisition: None,
            fisher: None,
            daughter_turns: Vec::new(),
            daughter_silent: None,
            outputs: Vec::new(),
            aborted_at: None,
            error: None,
            timestamps: Timestamps { started_unix_ms: epoch_ms(), phase_ms: BTreeMap::new() },
        },
        clock: Instant::now(),
    };
    fs::create_dir_all(&cfg.output_dir).map_err(io_err(&cfg.output_dir))?;
    let mut phase = "setup";
    match pipeline(&mut run, &mut phase) {
        Ok(outcome) => Ok(outcome),
        Err(e) => {
            run.log.aborted_at = Some(phase.to_string());
            run.log.error = Some(e.to_string());
            let _ = run.write_log();
            Err(e)
        }
    }
}

fn pipeline(run: &mut Run, phase: &mut &'static str) -> Result<ExperimentOutcome, RunError> {
    let cfg = run.cfg;
    let kind = cfg.phrase_kind();

    *phase = "lexicon";
    let (gold, lexicon_text) = load_lexicon(cfg)?;
    run.log.lexicon_sha256 = sha256_hex(lexicon_text.as_bytes());
    run.phase_done("lexicon");

    *phase = "corpus";
    let utterances: Vec<Vec<String>> = match &cfg.corpus_path {
        Some(p) => parse_corpus(&fs::read_to_string(p).map_err(io_err(p))?)?.utterances,
        None => {
            let n = usize::try_from(cfg.exemplar_count).expect("exemplar count fits in memory");
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            generate_corpus(&gold, kind, n, &mut rng)?.into_iter().map(|u| u.tokens).collect()
        }
    };
    let header = CorpusHeader { seed: cfg.seed, kind, n: utterances.len() };
    let corpus_text = render_corpus(&header, utterances.iter().map(Vec::as_slice));
    run.log.corpus_sha256 = Some(sha256_hex(corpus_text.as_bytes()));
    run.write("corpus.txt", corpus_text.as_bytes())?;
    run.phase_done("corpus");

    *phase = "ingest";
    let mut daughter = DaughterLexicon::new(run.log.session_id);
    let mut mint = LabelMint::new();
    let mut report = None;
    let mut fired_at = None;
    let events_path = cfg.output_dir.join("events.jsonl");
    let mut events = BufWriter::new(File::create(&events_path).map_err(io_err(&events_path))?);
    for (i, tokens) in utterances.iter().enumerate() {
        let index = i as u64 + 1;
        daughter.ingest_utterance(tokens)?;
        writeln!(events, r#"{{"event":"ingest","exemplar":{index},"tokens":{}}}"#, tokens.len())
            .map_err(io_err(&events_path))?;
        if cfg.acquisition.enabled && fired_at.is_none() {
            let r = acquire_function_content(&mut daughter, &cfg.acquisition, &mut mint)?;
            if r.fired {
                fired_at = Some(index);
                writeln!(
                    events,
                    r#"{{"event":"acquisition","exemplar":{index},"cutoff_frequency":{},"functional":{},"content":{}}}"#,
                    r.cutoff_frequency, r.functional_count, r.content_count
                )
                .map_err(io_err(&events_path))?;
            }
            report = Some(r);
        }
    }
    events.flush().map_err(io_err(&events_path))?;
    run.log.outputs.push("events.jsonl".into());
    run.log.exemplars = daughter.exemplars_processed();
    run.log.tokens = daughter.total_tokens();
    if let Some(r) = &report {
        run.log.acquisition = Some(AcquisitionSummary {
            fired: r.fired,
            fired_at_exemplar: fired_at,
            cutoff_frequency: r.cutoff_frequency,
            functional_count: r.functional_count,
            content_count: r.content_count,
        });
        run.write("acquisition.json", (serde_json::to_string_pretty(r)? + "\n").as_bytes())?;
    }
    let mut freq = Vec::new();
    write_frequency_csv(&mut freq, &build_frequency_table(&daughter)?)?;
    run.write("frequency.csv", &freq)?;
    run.write("daughter.jsonl", daughter.to_jsonl().as_bytes())?;
    run.phase_done("ingest");

    *phase = "daughter_turns";
    if fired_at.is_some() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(DAUGHTER_STREAM);
        for _ in 0..cfg.daughter_utterances {
            match daughter.generate_utterance(&mut rng) {
                Ok(tokens) => run.log.daughter_turns.push(DaughterTurn { feedback: feedback(&tokens), tokens }),
                Err(e @ DaughterError::InsufficientGrammar) => {
                    run.log.daughter_silent = Some(e.to_string());
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    run.phase_done("daughter_turns");

    *phase = "evaluation";
    let bundle = evaluate(&gold, &daughter)?;
    for path in bundle.write(&cfg.output_dir)? {
        let name = path.file_name().expect("bundle files have names").to_string_lossy().into_owned();
        run.log.outputs.push(name);
    }
    run.log.fisher = bundle.fisher.clone();
    run.phase_done("evaluation");

    run.log.outputs.push("log.json".into());
    run.write_log()?;
    Ok(ExperimentOutcome { log: run.log.clone(), daughter, report, bundle })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub phrase_kind: PhraseKind,
    pub output_dir: PathBuf,
    pub exemplars: u64,
    pub tokens: u64,
    pub fired: bool,
    pub cutoff_frequency: Option<u64>,
    pub fisher: Option<FisherReport>,
}

impl RunSummary {
    fn of(log: &ExperimentLog) -> Self {
        RunSummary {
            seed: log.config.seed,
            phrase_kind: log.config.phrase_kind(),
            output_dir: log.config.output_dir.clone(),
            exemplars: log.exemplars,
            tokens: log.tokens,
            fired: log.acquisition.as_ref().is_some_and(|a| a.fired),
            cutoff_frequency: log.acquisition.as_ref().map(|a| a.cutoff_frequency),
            fisher: log.fisher.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub train: RunSummary,
    pub test: RunSummary,
    pub kind_mismatch: bool,
}

/// Runs a train and a test experiment side by side on separate threads.
pub fn run_pair(train: &ExperimentConfig, test: &ExperimentConfig) -> Result<PairReport, RunError> {
    validate(train)?;
    validate(test)?;
    if train.seed == test.seed {
        return Err(RunError::SeedCollision(train.seed));
    }
    if train.output_dir == test.output_dir {
        return Err(RunError::OutputCollision(train.output_dir.clone()));
    }
    let (a, b) = std::thread::scope(|s| {
        let a = s.spawn(|| run_experiment(train));
        let b = s.spawn(|| run_experiment(test));
        (a.join().expect("train run panicked"), b.join().expect("test run panicked"))
    });
    let (a, b) = (a?, b?);
    Ok(PairReport {
        train: RunSummary::of(&a.log),
        test: RunSummary::of(&b.log),
        kind_mismatch: train.phrase_kind() != test.phrase_kind(),
    })
}
