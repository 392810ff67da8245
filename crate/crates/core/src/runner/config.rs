use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acquisition::AcquisitionParams;
use crate::mother::PhraseKind;

/// Default output directory when a config names none.
pub const DEFAULT_OUTPUT_DIR: &str = "lexlab-run";
pub const DEFAULT_DAUGHTER_UTTERANCES: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("{key}: {message}")]
    Range { key: String, message: String },
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub acquisition: AcquisitionParams,
    pub exemplar_count: u64,
    pub seed: u64,
    /// `None` selects the shipped fragment lexicon.
    pub lexicon_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    /// `None` means: the seed in test mode, epoch milliseconds otherwise.
    pub session_id: Option<u64>,
    /// Read exemplars from this corpus file instead of generating them.
    pub corpus_path: Option<PathBuf>,
    pub test_mode: bool,
    pub daughter_utterances: usize,
}

impl ExperimentConfig {
    pub fn new(seed: u64) -> Self {
        ExperimentConfig {
            acquisition: AcquisitionParams::default(),
            exemplar_count: 10_000,
            seed,
            lexicon_path: None,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            session_id: None,
            corpus_path: None,
            test_mode: false,
            daughter_utterances: DEFAULT_DAUGHTER_UTTERANCES,
        }
    }

    pub fn phrase_kind(&self) -> PhraseKind {
        self.acquisition.phrase_kind
    }

    /// Canonical `key = value` text; [`load_config`] reads it back unchanged.
    pub fn to_text(&self) -> String {
        let a = &self.acquisition;
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn std::fmt::Display| writeln!(s, "{k} = {v}").expect("writing to a String");
        kv("acquisition_of_functional_categories", &if a.enabled { "on" } else { "off" });
        kv("type_of_phrase", &a.phrase_kind);
        kv("minimum_amount_of_data", &a.min_exemplars);
        kv("threshold_for_functional_category_acquisition", &a.threshold);
        kv("acquisition_runs", &a.runs);
        kv("exemplar_count", &self.exemplar_count);
        kv("seed", &self.seed);
        if let Some(p) = &self.lexicon_path {
            kv("lexicon_path", &p.display());
        }
        kv("output_dir", &self.output_dir.display());
        if let Some(id) = self.session_id {
            kv("session_id", &id);
        }
        if let Some(p) = &self.corpus_path {
            kv("corpus_path", &p.display());
        }
        kv("test_mode", &self.test_mode);
        kv("daughter_utterances", &self.daughter_utterances);
        s
    }

    /// Makes relative paths relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.lexicon_path.as_mut().map(fix);
        self.corpus_path.as_mut().map(fix);
        fix(&mut self.output_dir);
    }
}

fn range(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Range { key: key.to_string(), message: message.into() }
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(range(key, format!("expected on/off, got {v:?}"))),
    }
}

fn parse_u64(key: &str, v: &str) -> Result<u64, ConfigError> {
    v.replace('_', "").parse().map_err(|_| range(key, format!("expected a non-negative integer, got {v:?}")))
}

/// Parses the flat `key = value` format. `#` starts a comment line. Only
/// `seed` is required.
pub fn load_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::new(0);
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Parse { line: line_no, message: format!("expected `key = value`, got {line:?}") });
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(ConfigError::Parse { line: line_no, message: format!("{key} has no value") });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Parse { line: line_no, message: format!("{key} given twice") });
        }
        let a = &mut cfg.acquisition;
        match key {
            "acquisition_of_functional_categories" => a.enabled = parse_bool(key, value)?,
            "type_of_phrase" => a.phrase_kind = value.parse().map_err(|_| range(key, "expected np or sentence"))?,
            "minimum_amount_of_data" => a.min_exemplars = parse_u64(key, value)?,
            "threshold_for_functional_category_acquisition" => {
                a.threshold = value.parse().map_err(|_| range(key, "expected a positive per-mil value"))?
            }
            "acquisition_runs" => {
                a.runs = u32::try_from(parse_u64(key, value)?).map_err(|_| range(key, "out of range"))?
            }
            "exemplar_count" => cfg.exemplar_count = parse_u64(key, value)?,
            "seed" => cfg.seed = parse_u64(key, value)?,
            "lexicon_path" => cfg.lexicon_path = Some(PathBuf::from(value)),
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            "session_id" => cfg.session_id = Some(parse_u64(key, value)?),
            "corpus_path" => cfg.corpus_path = Some(PathBuf::from(value)),
            "test_mode" => cfg.test_mode = parse_bool(key, value)?,
            "daughter_utterances" => {
                cfg.daughter_utterances =
                    usize::try_from(parse_u64(key, value)?).map_err(|_| range(key, "out of range"))?
            }
            _ => return Err(ConfigError::UnknownKey { line: line_no, key: key.to_string() }),
        }
    }
    if !seen.contains("seed") {
        return Err(range("seed", "a seed is required"));
    }
    validate(&cfg)?;
    Ok(cfg)
}

pub fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    if cfg.exemplar_count == 0 {
        return Err(range("exemplar_count", "must be at least 1"));
    }
    if cfg.acquisition.min_exemplars == 0 {
        return Err(range("minimum_amount_of_data", "must be at least 1"));
    }
    if cfg.acquisition.runs != 1 {
        return Err(range("acquisition_runs", "only 1 is supported"));
    }
    Ok(())
}

/// Reads a config file; relative paths inside it are taken relative to the
/// file's directory.
pub fn load_config_file(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Read { path: path.to_path_buf(), message: e.to_string() })?;
    let mut cfg = load_config(&text)?;
    cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    Ok(cfg)
}
