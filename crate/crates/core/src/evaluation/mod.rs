//! Measurements over a finished run: lexical statistics, top-k tables,
//! boxplot summaries and the gold-vs-acquired association test.
//!
//! This is the only module that reads the mother's gold classes.

mod fisher;

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acquisition::{build_frequency_table, FrequencyEntry};
use crate::daughter::{DaughterLexicon, WordClass};
use crate::mother::{GoldClass, GoldLexicon};

pub use fisher::{
    fisher_exact_two_tailed, ContingencyTable2x2, FisherError, FisherResult, FISHER_METHOD, TIE_TOLERANCE,
};

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("class {0:?} has no members")]
    EmptyClass(String),
    #[error("acquisition has not fired; there is nothing to compare")]
    AcquisitionNotFired,
    #[error(transparent)]
    Fisher(#[from] FisherError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexStats {
    pub types: u64,
    pub tokens: u64,
    pub hapax: u64,
    pub dis_legomena: u64,
}

impl LexStats {
    /// Statistics from per-type frequencies.
    pub fn from_frequencies(freqs: impl IntoIterator<Item = u64>) -> Result<Self, EvaluationError> {
        let mut s = LexStats { types: 0, tokens: 0, hapax: 0, dis_legomena: 0 };
        for f in freqs.into_iter().filter(|&f| f > 0) {
            s.types += 1;
            s.tokens += f;
            s.hapax += (f == 1) as u64;
            s.dis_legomena += (f == 2) as u64;
        }
        if s.tokens == 0 {
            return Err(EvaluationError::EmptyCorpus);
        }
        Ok(s)
    }

    pub fn from_table(table: &[FrequencyEntry]) -> Result<Self, EvaluationError> {
        Self::from_frequencies(table.iter().map(|r| r.f))
    }
}

/// Exact counts over tokens, case preserved.
pub fn lexical_statistics<S: AsRef<str>>(tokens: impl IntoIterator<Item = S>) -> Result<LexStats, EvaluationError> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    for t in tokens {
        *counts.entry(t.as_ref().to_string()).or_default() += 1;
    }
    LexStats::from_frequencies(counts.into_values())
}

/// The first `k` rows. With `complete_ties`, rows tied with the k-th are
/// kept as well.
pub fn top_k(table: &[FrequencyEntry], k: usize, complete_ties: bool) -> Vec<FrequencyEntry> {
    let mut end = k.min(table.len());
    if complete_ties && end > 0 {
        let last = table[end - 1].rank;
        while end < table.len() && table[end].rank == last {
            end += 1;
        }
    }
    table[..end].to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub class: String,
    pub n: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers_omitted: usize,
}

fn median_sorted(v: &[u64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] as f64 + v[n / 2] as f64) / 2.0
    }
}

/// Tukey five-number summary. Hinges are medians of the lower and upper
/// halves, each including the median when `n` is odd. Values beyond 1.5
/// IQR from the hinges are outliers.
pub fn boxplot_summary(class: &str, values: &[u64]) -> Result<BoxplotSummary, EvaluationError> {
    if values.is_empty() {
        return Err(EvaluationError::EmptyClass(class.to_string()));
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let n = v.len();
    let half = n.div_ceil(2);
    let q1 = median_sorted(&v[..half]);
    let q3 = median_sorted(&v[n - half..]);
    let (lo, hi) = fences(q1, q3);
    let inside: Vec<u64> = v.iter().copied().filter(|&x| (lo..=hi).contains(&(x as f64))).collect();
    Ok(BoxplotSummary {
        class: class.to_string(),
        n,
        q1,
        median: median_sorted(&v),
        q3,
        whisker_low: *inside.first().expect("hinges lie inside the fences") as f64,
        whisker_high: *inside.last().expect("hinges lie inside the fences") as f64,
        outliers_omitted: n - inside.len(),
    })
}

fn fences(q1: f64, q3: f64) -> (f64, f64) {
    let iqr = q3 - q1;
    (q1 - 1.5 * iqr, q3 + 1.5 * iqr)
}

impl BoxplotSummary {
    /// Values kept for plotting: everything that is not an outlier.
    pub fn plot_values(&self, values: &[u64]) -> Vec<u64> {
        let (lo, hi) = fences(self.q1, self.q3);
        let mut kept: Vec<u64> = values.iter().copied().filter(|&x| (lo..=hi).contains(&(x as f64))).collect();
        kept.sort_unstable();
        kept
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contingency {
    pub table: ContingencyTable2x2,
    /// Daughter types the gold lexicon does not know.
    pub unmatched: u64,
}

fn acquired(daughter: &DaughterLexicon, phonform: &str) -> Option<bool> {
    match daughter.classify_word(phonform) {
        WordClass::Functional => Some(true),
        WordClass::Content => Some(false),
        WordClass::Unknown => None,
    }
}

/// Cross-tabulates gold class (rows) against acquired class (columns) over
/// the types both lexicons contain.
pub fn build_contingency(gold: &GoldLexicon, daughter: &DaughterLexicon) -> Result<Contingency, EvaluationError> {
    if daughter.function_content_key().is_none() {
        return Err(EvaluationError::AcquisitionNotFired);
    }
    let mut out = Contingency { table: ContingencyTable2x2::default(), unmatched: 0 };
    for e in daughter.entries() {
        let (Some(g), Some(functional)) = (gold.gold_class(&e.phonform), acquired(daughter, &e.phonform)) else {
            out.unmatched += 1;
            continue;
        };
        let t = &mut out.table;
        match (g, functional) {
            (GoldClass::Function, true) => t.a += 1,
            (GoldClass::Function, false) => t.b += 1,
            (GoldClass::Content, true) => t.c += 1,
            (GoldClass::Content, false) => t.d += 1,
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopKRow {
    pub rank: usize,
    pub phonform: String,
    pub f: u64,
    pub per_mil: f64,
    pub gold_class: Option<GoldClass>,
    pub acquired_class: WordClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub unmatched: u64,
    pub p: f64,
    pub degenerate_margins: bool,
    pub method: String,
}

/// Everything the report bundle files contain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationBundle {
    pub lexstats: LexStats,
    pub topk: Vec<TopKRow>,
    pub boxplots: Vec<BoxplotSummary>,
    /// Non-outlier frequencies per boxplot class, for plotting.
    pub plot_points: Vec<(String, Vec<u64>)>,
    pub fisher: Option<FisherReport>,
}

pub const TOP_K: usize = 35;

/// Frequencies of the daughter's types grouped under a labelling.
fn grouped<'a>(
    table: &'a [FrequencyEntry],
    label: impl Fn(&str) -> Option<&'static str> + 'a,
) -> Vec<(&'static str, Vec<u64>)> {
    let mut groups: Vec<(&'static str, Vec<u64>)> = Vec::new();
    for row in table {
        if let Some(l) = label(&row.phonform) {
            match groups.iter_mut().find(|(g, _)| *g == l) {
                Some((_, v)) => v.push(row.f),
                None => groups.push((l, vec![row.f])),
            }
        }
    }
    groups.sort_by_key(|(l, _)| *l);
    groups
}

/// Evaluates a daughter lexicon against the gold lexicon. Before acquisition
/// fires, only statistics and the top-k table are produced.
pub fn evaluate(gold: &GoldLexicon, daughter: &DaughterLexicon) -> Result<EvaluationBundle, EvaluationError> {
    let table = build_frequency_table(daughter).map_err(|_| EvaluationError::EmptyCorpus)?;
    let lexstats = LexStats::from_table(&table)?;
    let topk = top_k(&table, TOP_K, false)
        .into_iter()
        .map(|r| TopKRow {
            gold_class: gold.gold_class(&r.phonform),
            acquired_class: daughter.classify_word(&r.phonform),
            rank: r.rank,
            phonform: r.phonform,
            f: r.f,
            per_mil: r.per_mil,
        })
        .collect();

    let mut boxplots = Vec::new();
    let mut plot_points = Vec::new();
    let mut groups = grouped(&table, |p| match gold.gold_class(p) {
        Some(GoldClass::Function) => Some("gold_function"),
        Some(GoldClass::Content) => Some("gold_content"),
        None => None,
    });
    let fired = daughter.function_content_key().is_some();
    if fired {
        groups.extend(grouped(&table, |p| match daughter.classify_word(p) {
            WordClass::Functional => Some("acquired_functional"),
            WordClass::Content => Some("acquired_content"),
            WordClass::Unknown => None,
        }));
    }
    for (label, freqs) in groups {
        let s = boxplot_summary(label, &freqs)?;
        plot_points.push((label.to_string(), s.plot_values(&freqs)));
        boxplots.push(s);
    }

    let fisher = if fired {
        let c = build_contingency(gold, daughter)?;
        let r = fisher_exact_two_tailed(&c.table)?;
        Some(FisherReport {
            a: c.table.a,
            b: c.table.b,
            c: c.table.c,
            d: c.table.d,
            unmatched: c.unmatched,
            p: r.p,
            degenerate_margins: r.degenerate_margins,
            method: FISHER_METHOD.to_string(),
        })
    } else {
        None
    };

    Ok(EvaluationBundle { lexstats, topk, boxplots, plot_points, fisher })
}

impl EvaluationBundle {
    pub fn boxplot(&self, class: &str) -> Option<&BoxplotSummary> {
        self.boxplots.iter().find(|b| b.class == class)
    }

    /// Writes `lexstats.csv`, `topk.csv`, `boxplot.csv` and, when acquisition
    /// fired, `fisher.json`. Returns the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, EvaluationError> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();

        let path = dir.join("lexstats.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.serialize(self.lexstats)?;
        w.flush()?;
        written.push(path);

        let path = dir.join("topk.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["rank", "phonform", "f", "per_mil", "gold_class", "acquired_class"])?;
        for r in &self.topk {
            let gold = r.gold_class.map_or("", |g| match g {
                GoldClass::Function => "function",
                GoldClass::Content => "content",
            });
            let acq = match r.acquired_class {
                WordClass::Functional => "functional",
                WordClass::Content => "content",
                WordClass::Unknown => "unknown",
            };
            w.write_record([&r.rank.to_string(), &r.phonform, &r.f.to_string(), &r.per_mil.to_string(), gold, acq])?;
        }
        w.flush()?;
        written.push(path);

        let path = dir.join("boxplot.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["class", "q1", "median", "q3", "whisker_low", "whisker_high", "outliers_omitted"])?;
        for b in &self.boxplots {
            w.write_record([
                b.class.clone(),
                b.q1.to_string(),
                b.median.to_string(),
                b.q3.to_string(),
                b.whisker_low.to_string(),
                b.whisker_high.to_string(),
                b.outliers_omitted.to_string(),
            ])?;
        }
        w.flush()?;
        written.push(path);

        if let Some(f) = &self.fisher {
            let path = dir.join("fisher.json");
            fs::write(&path, serde_json::to_string_pretty(f)? + "\n")?;
            written.push(path);
        }
        Ok(written)
    }

    /// Long-format plot data: one `class,f` row per kept frequency.
    pub fn write_plot_points(&self, path: &Path) -> Result<(), EvaluationError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["class", "f"])?;
        for (class, values) in &self.plot_points {
            for v in values {
                w.write_record([class.as_str(), &v.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
