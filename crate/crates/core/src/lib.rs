//! Simulated first-language acquisition of function and content words.
//!
//! A mother agent generates utterances from a unification grammar; a daughter
//! agent counts what it hears and, once it has heard enough, splits its word
//! types into two classes by frequency. Evaluation compares that split with
//! the mother's own lexicon.

pub mod acquisition;
pub mod avm;
pub mod daughter;
pub mod evaluation;
pub mod mother;
pub mod runner;
