//! The mother agent: a fixed unification grammar that produces exemplars and
//! holds the gold function/content labels used only by evaluation.

pub mod corpus;
mod generate;
mod lexicon;
pub mod synth;

pub use generate::{
    generate_corpus, generate_exemplar, GenerationError, Generator, PhraseKind, Utterance, MAX_ATTEMPTS,
    MAX_CLAUSE_DEPTH, MAX_PP_DEPTH, SAMPLING_POLICY,
};
pub use lexicon::{Category, Freshener, GoldClass, GoldLexicon, GoldTemplate, LexiconError, MIN_OPEN_TO_CLOSED_RATIO};

/// The shipped fragment lexicon (closed class followed by the generated open
/// class).
pub const FRAGMENT_LEXICON: &str = include_str!("../../lexicon/fragment.lex");

/// Line separating the hand-written closed class from the generated open
/// class in the shipped lexicon.
pub const OPEN_CLASS_MARKER: &str = "# ---- open class: generated, do not edit below this line ----";

/// Validates and loads a lexicon from grammar-file text.
pub fn load_gold_lexicon(source: &str) -> Result<GoldLexicon, LexiconError> {
    GoldLexicon::load(source)
}

/// The shipped fragment lexicon, loaded.
pub fn fragment_lexicon() -> GoldLexicon {
    GoldLexicon::load(FRAGMENT_LEXICON).expect("shipped lexicon is valid")
}

/// Mother's judgement of a daughter utterance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feedback {
    Accepted,
}

/// Grammaticality feedback on daughter output. Not modelled: every
/// utterance is accepted.
pub fn feedback(_tokens: &[String]) -> Feedback {
    Feedback::Accepted
}
