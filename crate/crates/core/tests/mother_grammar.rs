use std::collections::{HashMap, HashSet};
use std::path::Path;

use lexlab::avm::FeatureStructure;
use lexlab::mother::{
    fragment_lexicon, generate_corpus, synth, GenerationError, GoldClass, GoldLexicon, GoldTemplate, LexiconError,
    PhraseKind, FRAGMENT_LEXICON, MIN_OPEN_TO_CLOSED_RATIO, OPEN_CLASS_MARKER,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus(kind: PhraseKind, n: usize, seed: u64) -> Vec<lexlab::mother::Utterance> {
    generate_corpus(&fragment_lexicon(), kind, n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn by_id(lex: &GoldLexicon) -> HashMap<String, &GoldTemplate> {
    lex.templates().map(|t| (t.id(), t)).collect()
}

#[test]
fn shipped_lexicon_is_in_sync_with_its_sources() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("lexicon");
    let closed = std::fs::read_to_string(dir.join("closed_class.lex")).unwrap();
    let closed_lex = GoldLexicon::load_with_ratio(&closed, None).unwrap();
    let reserved: HashSet<String> = closed_lex.templates().map(|t| t.phonform.clone()).collect();
    let open = synth::render_open_class(&synth::SynthSpec::default(), &reserved);
    let expected = format!("{}\n{OPEN_CLASS_MARKER}\n{open}", closed.trim_end());
    assert!(expected == FRAGMENT_LEXICON, "fragment.lex is stale; rerun the build_lexicon example");
}

#[test]
fn shipped_lexicon_shape() {
    let lex = fragment_lexicon();
    assert!(lex.closed_class().len() >= 40);
    assert!(lex.open_class().len() >= MIN_OPEN_TO_CLOSED_RATIO * lex.closed_class().len());
    assert!(lex.closed_class().iter().all(|t| t.gold_class == GoldClass::Function));
    assert!(lex.open_class().iter().all(|t| t.gold_class == GoldClass::Content));
    for w in ["de", "het", "een", "te", "dat", "niet", "op", "en"] {
        assert_eq!(lex.gold_class(w), Some(GoldClass::Function), "{w}");
    }
    for w in ["auto", "auto's", "huis", "weer", "groot", "vergeten"] {
        assert_eq!(lex.gold_class(w), Some(GoldClass::Content), "{w}");
    }
}

#[test]
fn ratio_is_enforced() {
    let closed = "[PHON:de, CLASS:function, CAT:det]\n[PHON:op, CLASS:function, CAT:prep]\n";
    assert!(matches!(GoldLexicon::load(closed), Err(LexiconError::SizeRatio { .. })));
}

#[test]
fn counts_and_zero() {
    assert_eq!(corpus(PhraseKind::Np, 1_000, 9).len(), 1_000);
    let lex = fragment_lexicon();
    assert_eq!(
        generate_corpus(&lex, PhraseKind::Np, 0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap_err(),
        GenerationError::ZeroCount
    );
}

#[test]
fn seeded_generation_is_deterministic() {
    assert_eq!(corpus(PhraseKind::Sentence, 300, 5), corpus(PhraseKind::Sentence, 300, 5));
    assert_ne!(corpus(PhraseKind::Sentence, 300, 5), corpus(PhraseKind::Sentence, 300, 6));
}

#[test]
fn every_token_is_a_lexicon_word() {
    let lex = fragment_lexicon();
    let ids = by_id(&lex);
    for kind in [PhraseKind::Np, PhraseKind::Sentence] {
        for u in corpus(kind, 2_000, 11) {
            assert_eq!(u.tokens.len(), u.derivation.len());
            assert_eq!(u.kind, kind);
            for (tok, id) in u.tokens.iter().zip(&u.derivation) {
                let t = ids.get(id).unwrap_or_else(|| panic!("unknown template {id}"));
                assert_eq!(&t.phonform, tok);
            }
        }
    }
}

#[test]
fn sentences_contain_a_verb() {
    for u in corpus(PhraseKind::Sentence, 2_000, 12) {
        assert!(u.derivation.iter().any(|id| id.ends_with("/v") || id.ends_with("/aux")), "{}", u.tokens.join(" "));
    }
}

fn atom<'a>(fs: &'a FeatureStructure, attr: &str) -> Option<&'a str> {
    fs.atom_at(attr)
}

#[test]
fn articles_agree_with_their_nouns() {
    let lex = fragment_lexicon();
    let ids = by_id(&lex);
    let mut seen = 0;
    for kind in [PhraseKind::Np, PhraseKind::Sentence] {
        for u in corpus(kind, 3_000, 13) {
            for (i, id) in u.derivation.iter().enumerate() {
                let want = match id.as_str() {
                    "de/det" | "deze/det" | "die/det" => "de",
                    "het/det" | "dit/det" | "dat/det" => "het",
                    _ => continue,
                };
                // Relative `die`/`dat` heads a clause, not a noun.
                let Some(noun) = u.derivation[i + 1..].iter().find(|d| d.ends_with("/n") || d.ends_with("/v")) else {
                    panic!("article without noun: {}", u.tokens.join(" "));
                };
                if noun.ends_with("/v") {
                    continue;
                }
                let features = &ids[noun].features;
                assert_eq!(atom(features, "ARTCLASS"), Some(want), "{}", u.tokens.join(" "));
                if want == "het" {
                    assert_eq!(atom(features, "NUMBER"), Some("sg"));
                }
                seen += 1;
            }
        }
    }
    assert!(seen > 500);
}

#[test]
fn hapaxes_are_open_class_and_closed_class_is_frequent() {
    let lex = fragment_lexicon();
    let mut counts: HashMap<String, u64> = HashMap::new();
    for u in corpus(PhraseKind::Sentence, 10_000, 14) {
        for t in u.tokens {
            *counts.entry(t).or_default() += 1;
        }
    }
    let hapaxes: Vec<&String> = counts.iter().filter(|(_, &f)| f == 1).map(|(w, _)| w).collect();
    assert!(!hapaxes.is_empty());
    for w in hapaxes {
        assert_eq!(lex.gold_class(w), Some(GoldClass::Content), "{w}");
    }
    for t in lex.closed_class() {
        let f = counts.get(&t.phonform).copied().unwrap_or(0);
        assert!(f >= 50, "{} occurs only {f} times", t.phonform);
    }
}
