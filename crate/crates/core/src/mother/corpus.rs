//! Corpus files: a `#` header line recording how the corpus was made, then one
//! utterance per line with tokens separated by single spaces. UTF-8, LF.

use std::io::{self, Write};

use thiserror::Error;

use super::PhraseKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusHeader {
    pub seed: u64,
    pub kind: PhraseKind,
    pub n: usize,
}

impl CorpusHeader {
    pub fn to_line(&self) -> String {
        format!("# seed={} kind={} n={}", self.seed, self.kind, self.n)
    }

    fn parse(line: &str) -> Option<Self> {
        let body = line.strip_prefix('#')?;
        let (mut seed, mut kind, mut n) = (None, None, None);
        for field in body.split_whitespace() {
            match field.split_once('=')? {
                ("seed", v) => seed = v.parse().ok(),
                ("kind", v) => kind = v.parse().ok(),
                ("n", v) => n = v.parse().ok(),
                _ => {}
            }
        }
        Some(CorpusHeader { seed: seed?, kind: kind?, n: n? })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub header: Option<CorpusHeader>,
    pub utterances: Vec<Vec<String>>,
}

impl Corpus {
    pub fn token_count(&self) -> usize {
        self.utterances.iter().map(Vec::len).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.utterances.iter().flatten().map(String::as_str)
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: empty utterance")]
    EmptyLine { line: usize },
    #[error("line {line}: tokens must be separated by single spaces")]
    Spacing { line: usize },
    #[error("header says n={expected} but the file has {found} utterances")]
    CountMismatch { expected: usize, found: usize },
}

pub fn write_corpus<'a>(
    out: &mut impl Write,
    header: &CorpusHeader,
    utterances: impl IntoIterator<Item = &'a [String]>,
) -> io::Result<()> {
    writeln!(out, "{}", header.to_line())?;
    for tokens in utterances {
        writeln!(out, "{}", tokens.join(" "))?;
    }
    Ok(())
}

pub fn render_corpus<'a>(header: &CorpusHeader, utterances: impl IntoIterator<Item = &'a [String]>) -> String {
    let mut buf = Vec::new();
    write_corpus(&mut buf, header, utterances).expect("writing to memory");
    String::from_utf8(buf).expect("tokens are UTF-8")
}

/// Parses a corpus file. Comment lines other than a leading header are
/// skipped; blank lines are errors.
pub fn parse_corpus(text: &str) -> Result<Corpus, CorpusError> {
    let mut corpus = Corpus::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.starts_with('#') {
            if corpus.header.is_none() && corpus.utterances.is_empty() {
                corpus.header = CorpusHeader::parse(line);
            }
            continue;
        }
        if line.trim().is_empty() {
            return Err(CorpusError::EmptyLine { line: line_no });
        }
        let tokens: Vec<String> = line.split(' ').map(str::to_string).collect();
        if tokens.iter().any(|t| t.is_empty() || t.chars().any(char::is_whitespace)) {
            return Err(CorpusError::Spacing { line: line_no });
        }
        corpus.utterances.push(tokens);
    }
    if let Some(h) = &corpus.header {
        if h.n != corpus.utterances.len() {
            return Err(CorpusError::CountMismatch { expected: h.n, found: corpus.utterances.len() });
        }
    }
    Ok(corpus)
}
