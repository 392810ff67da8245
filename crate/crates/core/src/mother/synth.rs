//! Programmatic open-class inventory: pronounceable synthetic lemmas plus a
//! handful of real Dutch words, rendered as grammar-file entries.
//!
//! The shipped lexicon embeds the output of [`render_open_class`] with the
//! default [`SynthSpec`]; a test keeps the two in sync.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lexicon::{Category, GoldClass, GoldTemplate};
use crate::avm::FeatureStructure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthSpec {
    pub seed: u64,
    pub nouns: usize,
    pub verbs: usize,
    pub adjectives: usize,
    pub adverbs: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec { seed: 20_250_701, nouns: 1_400, verbs: 300, adjectives: 500, adverbs: 100 }
    }
}

const ONSETS: &[&str] = &[
    "b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z", "bl", "br", "dr", "fl", "gr", "kl",
    "kr", "pl", "pr", "sl", "sp", "st", "tr", "zw",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "aa", "ee", "oo", "ie", "oe", "ui", "ij", "eu"];
const CODAS: &[&str] = &["k", "l", "m", "n", "p", "r", "s", "rk", "lm", "mp", "ng", "ns", "rp"];

/// Real words seeded into the open class: (singular, plural, gender).
const SEED_NOUNS: &[(&str, &str, &str)] = &[
    ("auto", "auto's", "com"),
    ("vrouw", "vrouwen", "com"),
    ("man", "mannen", "com"),
    ("huis", "huizen", "neut"),
    ("vraag", "vragen", "com"),
    ("boek", "boeken", "neut"),
];
/// (stem, t-form, en-form, participle, valence)
const SEED_VERBS: &[(&str, &str, &str, &str, &str)] = &[
    ("werk", "werkt", "werken", "gewerkt", "intr"),
    ("blijk", "blijkt", "blijken", "gebleken", "clause"),
    ("zie", "ziet", "zien", "gezien", "tr"),
];
const SEED_PARTICIPLES: &[(&str, &str)] = &[("vergeten", "tr")];
const SEED_ADJECTIVES: &[&str] = &["groot", "klein", "oud"];
const SEED_ADVERBS: &[&str] = &["weer", "snel"];

struct Minter {
    rng: ChaCha8Rng,
    taken: HashSet<String>,
}

impl Minter {
    fn pick<'a>(&mut self, items: &[&'a str]) -> &'a str {
        items.choose(&mut self.rng).expect("non-empty inventory")
    }

    fn syllable(&mut self) -> String {
        format!("{}{}", self.pick(ONSETS), self.pick(VOWELS))
    }

    /// A stem ending in a consonant, optionally two syllables.
    fn stem(&mut self) -> String {
        let mut s = self.syllable();
        if self.rng.gen_bool(0.5) {
            s.push_str(&self.syllable());
        }
        s.push_str(self.pick(CODAS));
        s
    }

    /// Mints a stem whose derived forms are all unused, then reserves them.
    fn fresh(&mut self, forms: impl Fn(&str) -> Vec<String>) -> Vec<String> {
        loop {
            let stem = self.stem();
            let candidate = forms(&stem);
            let distinct: HashSet<_> = candidate.iter().collect();
            if distinct.len() == candidate.len() && candidate.iter().all(|f| !self.taken.contains(f)) {
                self.taken.extend(candidate.iter().cloned());
                return candidate;
            }
        }
    }
}

fn template(
    phon: &str,
    category: Category,
    features: FeatureStructure,
    arg_slots: Vec<FeatureStructure>,
) -> GoldTemplate {
    GoldTemplate {
        phonform: phon.to_string(),
        category,
        gold_class: GoldClass::Content,
        features: features.with_atom("CAT", category.as_str()),
        arg_slots,
    }
}

fn noun(phon: &str, number: &str, gender: &str) -> GoldTemplate {
    let plural = number == "pl";
    let artclass = if plural || gender == "com" { "de" } else { "het" };
    let agr = if plural { "pl" } else { "sg23" };
    template(
        phon,
        Category::N,
        FeatureStructure::new()
            .with_atom("AGR", agr)
            .with_atom("ARTCLASS", artclass)
            .with_atom("GENDER", gender)
            .with_atom("NUMBER", number)
            .with_atom("PERSON", "3"),
        vec![],
    )
}

fn verb_slots(valence: &str, subject_agr: Option<&str>) -> Vec<FeatureStructure> {
    let mut slots = Vec::new();
    let subject = FeatureStructure::new().with_atom("CAT", "np");
    slots.push(match subject_agr {
        Some(agr) => subject.with_atom("AGR", agr),
        None => subject,
    });
    match valence {
        "tr" => slots.push(FeatureStructure::new().with_atom("CAT", "np")),
        "clause" => slots.push(FeatureStructure::new().with_atom("CAT", "comp").with_atom("CTYPE", "dat")),
        _ => {}
    }
    slots
}

fn verb_form(phon: &str, form: &str, valence: &str, subject_agr: Option<&str>) -> GoldTemplate {
    template(
        phon,
        Category::V,
        FeatureStructure::new().with_atom("FORM", form).with_atom("VAL", valence),
        verb_slots(valence, subject_agr),
    )
}

fn verb(stem: &str, t: &str, en: &str, part: &str, valence: &str) -> Vec<GoldTemplate> {
    vec![
        verb_form(stem, "stem", valence, Some("sg1")),
        verb_form(t, "t", valence, Some("sg23")),
        verb_form(en, "en", valence, Some("pl")),
        verb_form(part, "part", valence, None),
    ]
}

fn adjective(phon: &str) -> GoldTemplate {
    template(phon, Category::Adj, FeatureStructure::new(), vec![])
}

fn adverb(phon: &str) -> GoldTemplate {
    template(phon, Category::Adv, FeatureStructure::new().with_atom("ADVTYPE", "manner"), vec![])
}

/// Builds the open class. `reserved` holds forms that must not be minted
/// (the closed class).
pub fn open_class(spec: &SynthSpec, reserved: &HashSet<String>) -> Vec<GoldTemplate> {
    let mut m = Minter { rng: ChaCha8Rng::seed_from_u64(spec.seed), taken: reserved.clone() };
    let mut out = Vec::new();

    for &(sg, pl, gender) in SEED_NOUNS {
        m.taken.extend([sg.to_string(), pl.to_string()]);
        out.push(noun(sg, "sg", gender));
        out.push(noun(pl, "pl", gender));
    }
    for &(stem, t, en, part, valence) in SEED_VERBS {
        m.taken.extend([stem, t, en, part].map(String::from));
        out.extend(verb(stem, t, en, part, valence));
    }
    for &(part, valence) in SEED_PARTICIPLES {
        m.taken.insert(part.to_string());
        out.push(verb_form(part, "part", valence, None));
    }
    for &a in SEED_ADJECTIVES {
        m.taken.insert(a.to_string());
        out.push(adjective(a));
    }
    for &a in SEED_ADVERBS {
        m.taken.insert(a.to_string());
        out.push(adverb(a));
    }

    for _ in SEED_NOUNS.len()..spec.nouns {
        let gender = if m.rng.gen_bool(2.0 / 3.0) { "com" } else { "neut" };
        let forms = m.fresh(|s| vec![s.to_string(), format!("{s}en")]);
        out.push(noun(&forms[0], "sg", gender));
        out.push(noun(&forms[1], "pl", gender));
    }
    for _ in SEED_VERBS.len()..spec.verbs {
        let roll: f64 = m.rng.gen();
        let valence = if roll < 0.45 {
            "intr"
        } else if roll < 0.9 {
            "tr"
        } else {
            "clause"
        };
        let forms = m.fresh(|s| vec![s.to_string(), format!("{s}t"), format!("{s}en"), format!("ge{s}d")]);
        out.extend(verb(&forms[0], &forms[1], &forms[2], &forms[3], valence));
    }
    for _ in SEED_ADJECTIVES.len()..spec.adjectives {
        let forms = m.fresh(|s| vec![format!("{s}ig")]);
        out.push(adjective(&forms[0]));
    }
    for _ in SEED_ADVERBS.len()..spec.adverbs {
        let forms = m.fresh(|s| vec![format!("{s}s")]);
        out.push(adverb(&forms[0]));
    }
    out
}

/// Grammar-file text for [`open_class`], one entry per line.
pub fn render_open_class(spec: &SynthSpec, reserved: &HashSet<String>) -> String {
    let mut text = String::new();
    for t in open_class(spec, reserved) {
        writeln!(text, "{}", t.to_entry()).expect("writing to a String");
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_unique() {
        let spec = SynthSpec { nouns: 50, verbs: 20, adjectives: 10, adverbs: 5, ..SynthSpec::default() };
        let reserved: HashSet<String> = ["de".to_string()].into();
        let a = open_class(&spec, &reserved);
        let b = open_class(&spec, &reserved);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50 * 2 + 17 * 4 + 3 * 4 + 1 + 10 + 5);
        let mut seen = HashSet::new();
        for t in &a {
            assert!(seen.insert((t.phonform.clone(), t.category)), "{}", t.id());
            assert_ne!(t.phonform, "de");
        }
    }
}
