//! The acquisition device: frequency tables over the daughter's counts and
//! the once-only per-mil threshold that splits word types into two classes.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::daughter::{DaughterLexicon, FunctionContentKey, WordClass};
use crate::mother::PhraseKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyEntry {
    pub rank: usize,
    pub phonform: String,
    pub f: u64,
    pub per_mil: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AcquisitionError {
    #[error("the daughter lexicon is empty")]
    EmptyLexicon,
    #[error("acquisition is disabled")]
    Disabled,
    #[error("invalid acquisition parameters: {0}")]
    InvalidParams(String),
}

/// Sorts counts by descending frequency, ties by phonform, and assigns dense
/// ranks.
pub fn frequency_table<'a>(counts: impl IntoIterator<Item = (&'a str, u64)>) -> Vec<FrequencyEntry> {
    let mut rows: Vec<(&str, u64)> = counts.into_iter().collect();
    rows.sort_by_key(|&(p, f)| (Reverse(f), p));
    let total: u64 = rows.iter().map(|r| r.1).sum();
    let mut rank = 0;
    let mut prev = None;
    rows.into_iter()
        .map(|(p, f)| {
            if prev != Some(f) {
                rank += 1;
                prev = Some(f);
            }
            FrequencyEntry { rank, phonform: p.to_string(), f, per_mil: f as f64 * 1000.0 / total as f64 }
        })
        .collect()
}

pub fn build_frequency_table(lexicon: &DaughterLexicon) -> Result<Vec<FrequencyEntry>, AcquisitionError> {
    if lexicon.total_tokens() == 0 {
        return Err(AcquisitionError::EmptyLexicon);
    }
    Ok(frequency_table(lexicon.token_counts()))
}

/// Writes `rank,phonform,f,per_mil`.
pub fn write_frequency_csv(out: impl io::Write, table: &[FrequencyEntry]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in table {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// A per-mil threshold held as an exact fraction `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PerMil {
    num: u64,
    den: u64,
}

impl PerMil {
    pub fn new(num: u64, den: u64) -> Result<Self, AcquisitionError> {
        if num == 0 || den == 0 {
            return Err(AcquisitionError::InvalidParams("threshold must be a positive per-mil value".into()));
        }
        let g = gcd(num, den);
        Ok(PerMil { num: num / g, den: den / g })
    }

    pub fn whole(per_mil: u64) -> Result<Self, AcquisitionError> {
        Self::new(per_mil, 1)
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    /// Smallest frequency that counts as functional given `total` tokens.
    pub fn cutoff(self, total: u64) -> u64 {
        let lhs = self.num as u128 * total as u128;
        (lhs / (1000 * self.den as u128)) as u64 + 1
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Default for PerMil {
    fn default() -> Self {
        PerMil { num: 2, den: 1 }
    }
}

impl fmt::Display for PerMil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Accepts `2`, `2.5` or `5/2`.
impl FromStr for PerMil {
    type Err = AcquisitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AcquisitionError::InvalidParams(format!("not a per-mil value: {s:?}"));
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            return PerMil::new(n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(scale).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
        PerMil::new(num, scale)
    }
}

impl Serialize for PerMil {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PerMil {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcquiredClass {
    Functional,
    Content,
}

impl From<AcquiredClass> for WordClass {
    fn from(c: AcquiredClass) -> Self {
        match c {
            AcquiredClass::Functional => WordClass::Functional,
            AcquiredClass::Content => WordClass::Content,
        }
    }
}

/// Functional iff `f * 1000 > threshold * total`, compared exactly.
pub fn threshold_classify(f: u64, total: u64, threshold: PerMil) -> AcquiredClass {
    let lhs = f as u128 * 1000 * threshold.den as u128;
    let rhs = threshold.num as u128 * total as u128;
    if lhs > rhs {
        AcquiredClass::Functional
    } else {
        AcquiredClass::Content
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcquisitionParams {
    pub enabled: bool,
    pub phrase_kind: PhraseKind,
    pub min_exemplars: u64,
    pub threshold: PerMil,
    /// How many times the procedure may fire per session. Only 1 is supported.
    pub runs: u32,
}

impl Default for AcquisitionParams {
    fn default() -> Self {
        AcquisitionParams {
            enabled: true,
            phrase_kind: PhraseKind::Sentence,
            min_exemplars: 10_000,
            threshold: PerMil::default(),
            runs: 1,
        }
    }
}

impl AcquisitionParams {
    pub fn validate(&self) -> Result<(), AcquisitionError> {
        if self.min_exemplars == 0 {
            return Err(AcquisitionError::InvalidParams("min_exemplars must be at least 1".into()));
        }
        if self.runs != 1 {
            return Err(AcquisitionError::InvalidParams("only a single acquisition run is supported".into()));
        }
        Ok(())
    }
}

/// Issues property-type labels A..Z, AA, AB, ... and per-type value labels
/// a..z, aa, ... Nothing is ever issued twice.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMint {
    next_type: u64,
    next_value: BTreeMap<String, u64>,
}

fn bijective(mut n: u64, base: u8) -> String {
    let mut s = Vec::new();
    loop {
        s.push(base + (n % 26) as u8);
        if n < 26 {
            break;
        }
        n = n / 26 - 1;
    }
    s.reverse();
    String::from_utf8(s).expect("ASCII")
}

fn unbijective(label: &str, base: u8) -> Option<u64> {
    if label.is_empty() {
        return None;
    }
    let mut n: u64 = 0;
    for b in label.bytes() {
        if !(base..base + 26).contains(&b) {
            return None;
        }
        n = n.checked_mul(26)?.checked_add((b - base) as u64 + 1)?;
    }
    Some(n - 1)
}

impl LabelMint {
    pub fn new() -> Self {
        Self::default()
    }

    /// A mint that will not reissue any label already present in `lexicon`.
    pub fn resume(lexicon: &DaughterLexicon) -> Self {
        let mut mint = LabelMint::new();
        for p in lexicon.entries().iter().flat_map(|e| &e.properties) {
            if let Some(t) = unbijective(&p.property_type, b'A') {
                mint.next_type = mint.next_type.max(t + 1);
            }
            if let Some(v) = unbijective(&p.property_value, b'a') {
                let next = mint.next_value.entry(p.property_type.clone()).or_default();
                *next = (*next).max(v + 1);
            }
        }
        mint
    }

    pub fn mint_type(&mut self) -> String {
        let label = bijective(self.next_type, b'A');
        self.next_type += 1;
        label
    }

    pub fn mint_value(&mut self, property_type: &str) -> String {
        let next = self.next_value.entry(property_type.to_string()).or_default();
        let label = bijective(*next, b'a');
        *next += 1;
        label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotFired {
    BelowMinExemplars,
    AlreadyFired,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub phonform: String,
    pub f: u64,
    pub class: AcquiredClass,
    pub property_value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionReport {
    pub fired: bool,
    pub not_fired: Option<NotFired>,
    pub exemplars_processed: u64,
    pub total_tokens: u64,
    pub threshold_per_mil: PerMil,
    /// Smallest frequency classified as functional.
    pub cutoff_frequency: u64,
    pub property_type: Option<String>,
    pub functional_value: Option<String>,
    pub content_value: Option<String>,
    pub functional_count: usize,
    pub content_count: usize,
    pub assignments: Vec<Assignment>,
}

impl AcquisitionReport {
    fn skipped(lexicon: &DaughterLexicon, params: &AcquisitionParams, why: NotFired) -> Self {
        AcquisitionReport {
            fired: false,
            not_fired: Some(why),
            exemplars_processed: lexicon.exemplars_processed(),
            total_tokens: lexicon.total_tokens(),
            threshold_per_mil: params.threshold,
            cutoff_frequency: params.threshold.cutoff(lexicon.total_tokens()),
            property_type: None,
            functional_value: None,
            content_value: None,
            functional_count: 0,
            content_count: 0,
            assignments: Vec::new(),
        }
    }
}

/// Fires the function/content procedure once enough exemplars have been
/// seen. Returns `fired: false` without touching the lexicon when it is too
/// early or the procedure already ran.
pub fn acquire_function_content(
    lexicon: &mut DaughterLexicon,
    params: &AcquisitionParams,
    mint: &mut LabelMint,
) -> Result<AcquisitionReport, AcquisitionError> {
    if !params.enabled {
        return Err(AcquisitionError::Disabled);
    }
    params.validate()?;
    if lexicon.function_content_key().is_some() {
        return Ok(AcquisitionReport::skipped(lexicon, params, NotFired::AlreadyFired));
    }
    if lexicon.exemplars_processed() < params.min_exemplars {
        return Ok(AcquisitionReport::skipped(lexicon, params, NotFired::BelowMinExemplars));
    }
    let total = lexicon.total_tokens();
    if total == 0 {
        return Err(AcquisitionError::EmptyLexicon);
    }

    let property_type = mint.mint_type();
    let key = FunctionContentKey {
        functional_value: mint.mint_value(&property_type),
        content_value: mint.mint_value(&property_type),
        property_type,
    };
    let classify = |f| threshold_classify(f, total, params.threshold);
    let value_for = |class| match class {
        AcquiredClass::Functional => key.functional_value.clone(),
        AcquiredClass::Content => key.content_value.clone(),
    };

    let values = lexicon.token_counts().map(|(_, f)| value_for(classify(f))).collect();
    let assignments: Vec<Assignment> = build_frequency_table(lexicon)?
        .into_iter()
        .map(|row| {
            let class = classify(row.f);
            Assignment { property_value: value_for(class), phonform: row.phonform, f: row.f, class }
        })
        .collect();
    let functional_count = assignments.iter().filter(|a| a.class == AcquiredClass::Functional).count();

    let mut report = AcquisitionReport::skipped(lexicon, params, NotFired::AlreadyFired);
    report.fired = true;
    report.not_fired = None;
    report.property_type = Some(key.property_type.clone());
    report.functional_value = Some(key.functional_value.clone());
    report.content_value = Some(key.content_value.clone());
    report.functional_count = functional_count;
    report.content_count = assignments.len() - functional_count;
    report.assignments = assignments;

    lexicon.install_function_content(key, values);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon(counts: &[(&str, usize)], exemplars: usize) -> DaughterLexicon {
        let mut lex = DaughterLexicon::new(1);
        let mut tokens: Vec<&str> = Vec::new();
        for &(w, n) in counts {
            tokens.extend(std::iter::repeat_n(w, n));
        }
        lex.ingest_utterance(&tokens).unwrap();
        for _ in 1..exemplars {
            lex.ingest_utterance(&["x"]).unwrap();
        }
        lex
    }

    #[test]
    fn boundary_is_strict() {
        let two = PerMil::default();
        assert_eq!(threshold_classify(130, 57_118, two), AcquiredClass::Functional);
        assert_eq!(threshold_classify(114, 57_118, two), AcquiredClass::Content);
        assert_eq!(threshold_classify(115, 57_118, two), AcquiredClass::Functional);
        assert_eq!(two.cutoff(57_118), 115);
        assert_eq!(two.cutoff(30_129), 61);
        assert_eq!(threshold_classify(1, 500, two), AcquiredClass::Content);
        assert_eq!(threshold_classify(1, 499, two), AcquiredClass::Functional);
    }

    #[test]
    fn per_mil_parsing() {
        assert_eq!("2".parse::<PerMil>().unwrap(), PerMil::default());
        assert_eq!("2.0".parse::<PerMil>().unwrap(), PerMil::default());
        assert_eq!("2.5".parse::<PerMil>().unwrap(), PerMil::new(5, 2).unwrap());
        assert_eq!("5/2".parse::<PerMil>().unwrap().to_string(), "5/2");
        for bad in ["0", "0.0", "-1", "", ".", "x", "1/0", "1e3"] {
            assert!(bad.parse::<PerMil>().is_err(), "{bad}");
        }
    }

    #[test]
    fn table_ranks() {
        let t = frequency_table([("niet", 60), ("te", 92), ("dat", 62)]);
        let got: Vec<_> = t.iter().map(|r| (r.rank, r.phonform.as_str(), r.f)).collect();
        assert_eq!(got, [(1, "te", 92), (2, "dat", 62), (3, "niet", 60)]);

        let t = frequency_table([("b", 5), ("a", 5), ("c", 1)]);
        let got: Vec<_> = t.iter().map(|r| (r.rank, r.phonform.as_str())).collect();
        assert_eq!(got, [(1, "a"), (1, "b"), (2, "c")]);
        assert!(matches!(build_frequency_table(&DaughterLexicon::new(0)), Err(AcquisitionError::EmptyLexicon)));
    }

    #[test]
    fn csv_columns() {
        let mut buf = Vec::new();
        write_frequency_csv(&mut buf, &frequency_table([("de", 3), ("auto", 1)])).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "rank,phonform,f,per_mil\n1,de,3,750.0\n2,auto,1,250.0\n");
    }

    #[test]
    fn labels() {
        let mut mint = LabelMint::new();
        let types: Vec<_> = (0..28).map(|_| mint.mint_type()).collect();
        assert_eq!(&types[..2], ["A", "B"]);
        assert_eq!(&types[25..], ["Z", "AA", "AB"]);
        assert_eq!(mint.mint_value("A"), "a");
        assert_eq!(mint.mint_value("A"), "b");
        assert_eq!(mint.mint_value("B"), "a");
        assert_eq!(bijective(26 + 26 * 26, b'A'), "AAA");
        for n in [0, 25, 26, 701, 702, 10_000] {
            assert_eq!(unbijective(&bijective(n, b'A'), b'A'), Some(n));
        }
    }

    #[test]
    fn gate_and_once_only() {
        let params = AcquisitionParams { min_exemplars: 3, ..AcquisitionParams::default() };
        let mut mint = LabelMint::new();
        let mut lex = lexicon(&[("de", 10), ("auto", 1)], 2);
        let before = lex.clone();
        let r = acquire_function_content(&mut lex, &params, &mut mint).unwrap();
        assert!(!r.fired);
        assert_eq!(r.not_fired, Some(NotFired::BelowMinExemplars));
        assert_eq!(lex, before);

        lex.ingest_utterance(&["x"]).unwrap();
        let r = acquire_function_content(&mut lex, &params, &mut mint).unwrap();
        assert!(r.fired);
        assert_eq!(r.property_type.as_deref(), Some("A"));
        assert_eq!((r.functional_value.as_deref(), r.content_value.as_deref()), (Some("a"), Some("b")));
        assert_eq!(r.functional_count + r.content_count, lex.type_count());
        for e in lex.entries() {
            assert_eq!(e.properties.len(), 1);
            assert_eq!(e.properties[0].confidence, 60);
        }

        let dump = lex.to_jsonl();
        let r = acquire_function_content(&mut lex, &params, &mut mint).unwrap();
        assert_eq!(r.not_fired, Some(NotFired::AlreadyFired));
        assert_eq!(lex.to_jsonl(), dump);
        assert_eq!(LabelMint::resume(&lex).mint_type(), "B");

        let off = AcquisitionParams { enabled: false, ..params.clone() };
        assert_eq!(acquire_function_content(&mut lex, &off, &mut mint), Err(AcquisitionError::Disabled));
        let twice = AcquisitionParams { runs: 2, ..params };
        assert!(matches!(
            acquire_function_content(&mut lex, &twice, &mut mint),
            Err(AcquisitionError::InvalidParams(_))
        ));
    }
}
