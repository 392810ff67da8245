//! The daughter agent's lexicon: one record per word type seen in the input,
//! built from token strings alone.
//!
//! Nothing here knows about the mother's categories or gold classes. The only
//! grammatical knowledge the daughter ever holds is what acquisition writes
//! into [`DaughterEntry::properties`].

use std::collections::{HashMap, HashSet};
use std::io::{self, BufRead, Write};

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Confidence given to new entries and to newly acquired properties.
pub const INITIAL_CONFIDENCE: u8 = 60;

/// Shape of a daughter utterance: one functional word, then one content word.
pub const DAUGHTER_UTTERANCE_SHAPE: [WordClass; 2] = [WordClass::Functional, WordClass::Content];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

/// Head directionality with its confidence. `direction: None` is Unset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HeadDirectionality {
    pub direction: Option<Direction>,
    pub confidence: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcquiredProperty {
    pub property_type: String,
    pub property_value: String,
    pub confidence: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaughterEntry {
    pub memory_stack_position: u64,
    pub lexical_entry_number: u64,
    pub session_id: u64,
    pub confidence: u8,
    pub head_directionality: HeadDirectionality,
    pub terminal: bool,
    pub phonform: String,
    pub semform: String,
    pub semform_index: Option<u64>,
    pub properties: Vec<AcquiredProperty>,
    pub head: String,
    pub argument: Option<Box<DaughterEntry>>,
}

impl DaughterEntry {
    pub fn property(&self, property_type: &str) -> Option<&AcquiredProperty> {
        self.properties.iter().find(|p| p.property_type == property_type)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordClass {
    Functional,
    Content,
    Unknown,
}

/// Which acquired property encodes the function/content split, and which of
/// its values means which.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionContentKey {
    pub property_type: String,
    pub functional_value: String,
    pub content_value: String,
}

#[derive(Debug, Error)]
pub enum DaughterError {
    #[error("cannot ingest an empty utterance")]
    EmptyUtterance,
    #[error("the daughter needs at least one functional and one content word to speak")]
    InsufficientGrammar,
}

#[derive(Debug, Error)]
pub enum DumpError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("missing lexicon header record")]
    MissingHeader,
    #[error("inconsistent dump: {0}")]
    Inconsistent(String),
}

/// First line of a lexicon dump; entry records follow, one per line.
#[derive(Debug, Serialize, Deserialize)]
struct DumpHeader {
    session_id: u64,
    total_tokens: u64,
    exemplars_processed: u64,
    function_content: Option<FunctionContentKey>,
    token_counts: Vec<(String, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DaughterLexicon {
    session_id: u64,
    entries: Vec<DaughterEntry>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    semforms: HashSet<String>,
    total_tokens: u64,
    exemplars_processed: u64,
    function_content: Option<FunctionContentKey>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uppercase label derived from (session, entry number, attempt). Three
/// letters until the attempts suggest the space is crowded.
fn semform_candidate(session_id: u64, number: u64, attempt: u64) -> String {
    let len = 3 + (attempt / 64) as usize;
    let mut h = splitmix64(session_id ^ splitmix64(number ^ splitmix64(attempt)));
    let mut s = String::with_capacity(len);
    for _ in 0..len {
        s.push((b'A' + (h % 26) as u8) as char);
        h = if h < 26 { splitmix64(h) } else { h / 26 };
    }
    s
}

impl DaughterLexicon {
    pub fn new(session_id: u64) -> Self {
        DaughterLexicon {
            session_id,
            entries: Vec::new(),
            counts: Vec::new(),
            index: HashMap::new(),
            semforms: HashSet::new(),
            total_tokens: 0,
            exemplars_processed: 0,
            function_content: None,
        }
    }

    pub fn session_id(&self) -> u64 {
        self.session_id
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn exemplars_processed(&self) -> u64 {
        self.exemplars_processed
    }

    pub fn type_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in first-seen order.
    pub fn entries(&self) -> &[DaughterEntry] {
        &self.entries
    }

    pub fn entry(&self, phonform: &str) -> Option<&DaughterEntry> {
        self.index.get(phonform).map(|&i| &self.entries[i])
    }

    pub fn count(&self, phonform: &str) -> u64 {
        self.index.get(phonform).map_or(0, |&i| self.counts[i])
    }

    /// (phonform, token count) in first-seen order.
    pub fn token_counts(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().zip(&self.counts).map(|(e, &c)| (e.phonform.as_str(), c))
    }

    pub fn function_content_key(&self) -> Option<&FunctionContentKey> {
        self.function_content.as_ref()
    }

    fn mint_semform(&mut self, number: u64) -> String {
        let mut attempt = 0;
        loop {
            let s = semform_candidate(self.session_id, number, attempt);
            if self.semforms.insert(s.clone()) {
                return s;
            }
            attempt += 1;
        }
    }

    fn add_entry(&mut self, phonform: &str) -> usize {
        let number = self.entries.len() as u64 + 1;
        let semform = self.mint_semform(number);
        self.entries.push(DaughterEntry {
            memory_stack_position: number - 1,
            lexical_entry_number: number,
            session_id: self.session_id,
            confidence: INITIAL_CONFIDENCE,
            head_directionality: HeadDirectionality::default(),
            terminal: true,
            phonform: phonform.to_string(),
            semform,
            semform_index: None,
            properties: Vec::new(),
            head: format!("{phonform}.{number}"),
            argument: None,
        });
        self.counts.push(0);
        self.index.insert(phonform.to_string(), self.entries.len() - 1);
        self.entries.len() - 1
    }

    /// Counts one exemplar. Only the surface tokens are visible here.
    pub fn ingest_utterance<S: AsRef<str>>(&mut self, tokens: &[S]) -> Result<(), DaughterError> {
        if tokens.is_empty() {
            return Err(DaughterError::EmptyUtterance);
        }
        for token in tokens {
            let token = token.as_ref();
            let i = match self.index.get(token) {
                Some(&i) => i,
                None => self.add_entry(token),
            };
            self.counts[i] += 1;
        }
        self.total_tokens += tokens.len() as u64;
        self.exemplars_processed += 1;
        Ok(())
    }

    /// Records the function/content property on every entry at once.
    /// `values` is aligned with [`Self::entries`].
    pub(crate) fn install_function_content(&mut self, key: FunctionContentKey, values: Vec<String>) {
        assert_eq!(values.len(), self.entries.len(), "one value per entry");
        for (entry, value) in self.entries.iter_mut().zip(values) {
            entry.properties.retain(|p| p.property_type != key.property_type);
            entry.properties.push(AcquiredProperty {
                property_type: key.property_type.clone(),
                property_value: value,
                confidence: INITIAL_CONFIDENCE,
            });
        }
        self.function_content = Some(key);
    }

    pub fn classify_word(&self, phonform: &str) -> WordClass {
        let (Some(key), Some(entry)) = (&self.function_content, self.entry(phonform)) else {
            return WordClass::Unknown;
        };
        match entry.property(&key.property_type) {
            Some(p) if p.property_value == key.functional_value => WordClass::Functional,
            Some(p) if p.property_value == key.content_value => WordClass::Content,
            _ => WordClass::Unknown,
        }
    }

    pub fn parse_utterance<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<WordClass> {
        tokens.iter().map(|t| self.classify_word(t.as_ref())).collect()
    }

    /// A functional word followed by a content word, each drawn in
    /// proportion to its token count.
    pub fn generate_utterance(&self, rng: &mut impl Rng) -> Result<Vec<String>, DaughterError> {
        let mut out = Vec::with_capacity(DAUGHTER_UTTERANCE_SHAPE.len());
        for class in DAUGHTER_UTTERANCE_SHAPE {
            let pool: Vec<usize> =
                (0..self.entries.len()).filter(|&i| self.classify_word(&self.entries[i].phonform) == class).collect();
            let dist = WeightedIndex::new(pool.iter().map(|&i| self.counts[i]))
                .map_err(|_| DaughterError::InsufficientGrammar)?;
            out.push(self.entries[pool[dist.sample(rng)]].phonform.clone());
        }
        Ok(out)
    }

    /// Reuse of acquired knowledge as input to later acquisition. No
    /// procedure uses it yet, so this leaves the lexicon unchanged.
    pub fn internal_annotation(&mut self) {}

    pub fn write_jsonl(&self, out: &mut impl Write) -> io::Result<()> {
        let header = DumpHeader {
            session_id: self.session_id,
            total_tokens: self.total_tokens,
            exemplars_processed: self.exemplars_processed,
            function_content: self.function_content.clone(),
            token_counts: self.token_counts().map(|(p, c)| (p.to_string(), c)).collect(),
        };
        serde_json::to_writer(&mut *out, &header)?;
        writeln!(out)?;
        for entry in &self.entries {
            serde_json::to_writer(&mut *out, entry)?;
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn read_jsonl(input: impl BufRead) -> Result<Self, DumpError> {
        let mut lines = input.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));
        let (_, first) = lines.next().ok_or(DumpError::MissingHeader)?;
        let header: DumpHeader = serde_json::from_str(&first?).map_err(|source| DumpError::Json { line: 1, source })?;
        let mut lex = DaughterLexicon::new(header.session_id);
        for (i, line) in lines {
            let entry: DaughterEntry =
                serde_json::from_str(&line?).map_err(|source| DumpError::Json { line: i + 1, source })?;
            let pos = lex.entries.len();
            if entry.lexical_entry_number != pos as u64 + 1 {
                return Err(DumpError::Inconsistent(format!("entry {} out of order", entry.phonform)));
            }
            if lex.index.insert(entry.phonform.clone(), pos).is_some() {
                return Err(DumpError::Inconsistent(format!("duplicate phonform {}", entry.phonform)));
            }
            if !lex.semforms.insert(entry.semform.clone()) {
                return Err(DumpError::Inconsistent(format!("duplicate semform {}", entry.semform)));
            }
            lex.entries.push(entry);
        }
        if header.token_counts.len() != lex.entries.len() {
            return Err(DumpError::Inconsistent("token counts do not match entries".into()));
        }
        for ((phon, count), entry) in header.token_counts.into_iter().zip(&lex.entries) {
            if phon != entry.phonform {
                return Err(DumpError::Inconsistent(format!("count for {phon} is misaligned")));
            }
            lex.counts.push(count);
        }
        if lex.counts.iter().sum::<u64>() != header.total_tokens {
            return Err(DumpError::Inconsistent("total_tokens is not the sum of counts".into()));
        }
        lex.total_tokens = header.total_tokens;
        lex.exemplars_processed = header.exemplars_processed;
        lex.function_content = header.function_content;
        Ok(lex)
    }

    pub fn from_jsonl(text: &str) -> Result<Self, DumpError> {
        Self::read_jsonl(text.as_bytes())
    }
}
