//! Exemplar generation from the gold lexicon.
//!
//! Derivations are built top-down. At each step one of the applicable rules
//! is chosen uniformly, open slots draw uniformly from their template pool,
//! and a candidate is accepted only if unification with the head's argument
//! slot succeeds. Rejected candidates are redrawn, which keeps the choice
//! uniform over compatible templates.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lexicon::{Category, Freshener, GoldLexicon, GoldTemplate};
use crate::avm::{self, FeatureStructure, FeatureValue};

/// Rule and slot sampling policy, echoed into experiment logs.
pub const SAMPLING_POLICY: &str = "uniform over applicable rules; uniform over unifiable templates";
/// Redraws allowed per slot before giving up.
pub const MAX_ATTEMPTS: usize = 256;
/// Maximum PP embedding below a noun phrase.
pub const MAX_PP_DEPTH: usize = 2;
/// Maximum clause embedding (relative, infinitival, complement, coordinated).
pub const MAX_CLAUSE_DEPTH: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhraseKind {
    Np,
    Sentence,
}

impl std::fmt::Display for PhraseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PhraseKind::Np => "np",
            PhraseKind::Sentence => "sentence",
        })
    }
}

impl std::str::FromStr for PhraseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "np" | "nps" | "noun phrase" | "noun phrases" => Ok(PhraseKind::Np),
            "sentence" | "sentences" | "s" => Ok(PhraseKind::Sentence),
            other => Err(format!("unknown phrase kind {other:?} (expected np or sentence)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub tokens: Vec<String>,
    pub kind: PhraseKind,
    /// Template ids (`phon/cat`) in surface order.
    pub derivation: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerationError {
    #[error("no unifiable {slot} found after {attempts} attempts")]
    Exhausted { slot: &'static str, attempts: usize },
    #[error("the lexicon has no templates for {slot}")]
    EmptyPool { slot: &'static str },
    #[error("exemplar count must be at least 1")]
    ZeroCount,
}

impl GenerationError {
    pub fn is_exhausted(&self) -> bool {
        !matches!(self, GenerationError::ZeroCount)
    }
}

type PoolFn<'a> = for<'p> fn(&'p Pools<'a>) -> &'p Vec<&'a GoldTemplate>;

struct Pools<'a> {
    nouns: Vec<&'a GoldTemplate>,
    determiners: Vec<&'a GoldTemplate>,
    relativizers: Vec<&'a GoldTemplate>,
    adjectives: Vec<&'a GoldTemplate>,
    prepositions: Vec<&'a GoldTemplate>,
    agentive: Vec<&'a GoldTemplate>,
    pronouns: Vec<&'a GoldTemplate>,
    intransitive: Vec<&'a GoldTemplate>,
    transitive: Vec<&'a GoldTemplate>,
    clausal: Vec<&'a GoldTemplate>,
    infinitives: Vec<&'a GoldTemplate>,
    participles: Vec<&'a GoldTemplate>,
    perfect: Vec<&'a GoldTemplate>,
    passive: Vec<&'a GoldTemplate>,
    copulas: Vec<&'a GoldTemplate>,
    te: Vec<&'a GoldTemplate>,
    om: Vec<&'a GoldTemplate>,
    dat: Vec<&'a GoldTemplate>,
    conjunctions: Vec<&'a GoldTemplate>,
    negation: Vec<&'a GoldTemplate>,
    expletive: Vec<&'a GoldTemplate>,
    locative: Vec<&'a GoldTemplate>,
    wh: Vec<&'a GoldTemplate>,
    manner: Vec<&'a GoldTemplate>,
}

fn pattern(text: &str) -> FeatureStructure {
    text.parse().expect("built-in pattern parses")
}

impl<'a> Pools<'a> {
    fn new(lexicon: &'a GoldLexicon) -> Self {
        let select = |p: &str| -> Vec<&'a GoldTemplate> {
            let p = pattern(p);
            lexicon.templates().filter(|t| avm::subsumes(&p, &t.features)).collect()
        };
        let finite = |val: &str| -> Vec<&'a GoldTemplate> {
            let p = pattern(&format!("[CAT:v, VAL:{val}]"));
            lexicon
                .templates()
                .filter(|t| avm::subsumes(&p, &t.features) && t.features.atom_at("FORM") != Some("part"))
                .filter(|t| !t.arg_slots.is_empty())
                .collect()
        };
        Pools {
            nouns: select("[CAT:n]"),
            determiners: lexicon
                .templates()
                .filter(|t| matches!(t.category, Category::Det | Category::Quant | Category::Num))
                .collect(),
            relativizers: select("[CAT:det, REL:yes]"),
            adjectives: select("[CAT:adj]"),
            prepositions: select("[CAT:prep]"),
            agentive: select("[CAT:prep, AGENTIVE:yes]"),
            pronouns: select("[CAT:pron]"),
            intransitive: finite("intr"),
            transitive: finite("tr"),
            clausal: finite("clause"),
            infinitives: select("[CAT:v, FORM:en, VAL:intr]"),
            participles: select("[CAT:v, FORM:part]"),
            perfect: select("[CAT:aux, AUX:perf]"),
            passive: select("[CAT:aux, AUX:pass]"),
            copulas: select("[CAT:aux, AUX:cop]"),
            te: select("[CAT:comp, CTYPE:te]"),
            om: select("[CAT:comp, CTYPE:om]"),
            dat: select("[CAT:comp, CTYPE:dat]"),
            conjunctions: select("[CAT:conj]"),
            negation: select("[CAT:adv, ADVTYPE:neg]"),
            expletive: select("[CAT:adv, ADVTYPE:expl]"),
            locative: select("[CAT:adv, ADVTYPE:loc]"),
            wh: select("[CAT:adv, ADVTYPE:wh]"),
            manner: select("[CAT:adv, ADVTYPE:manner]"),
        }
    }
}

/// A built constituent: surface tokens, the templates used, and the
/// agreement features it exposes to a governing head.
#[derive(Debug, Clone, Default)]
struct Phrase {
    tokens: Vec<String>,
    derivation: Vec<String>,
    features: FeatureStructure,
}

impl Phrase {
    fn word(t: &GoldTemplate) -> Self {
        Phrase { tokens: vec![t.phonform.clone()], derivation: vec![t.id()], features: FeatureStructure::new() }
    }

    fn then(mut self, other: Phrase) -> Self {
        self.tokens.extend(other.tokens);
        self.derivation.extend(other.derivation);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NpRule {
    Bare,
    Adjective,
    Prepositional,
    Relative,
    Infinitival,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SRule {
    Intransitive,
    Transitive,
    Negated,
    Existential,
    Complement,
    Perfect,
    Passive,
    Question,
    Locative,
    Copular,
    Infinitival,
    Manner,
    Coordinated,
}

/// Mother-side generator over one lexicon.
pub struct Generator<'a> {
    pools: Pools<'a>,
    fresh: Freshener,
}

fn np_features(source: &FeatureStructure) -> FeatureStructure {
    let mut np = FeatureStructure::new().with_atom("CAT", "np");
    for attr in ["AGR", "NUMBER", "PERSON"] {
        if let Some(v @ FeatureValue::Atom(_)) = source.get(attr) {
            np.insert(attr, v.clone());
        }
    }
    np
}

impl<'a> Generator<'a> {
    pub fn new(lexicon: &'a GoldLexicon) -> Self {
        Generator { pools: Pools::new(lexicon), fresh: Freshener::default() }
    }

    pub fn generate_exemplar(&mut self, kind: PhraseKind, rng: &mut impl Rng) -> Result<Utterance, GenerationError> {
        let phrase = match kind {
            PhraseKind::Np => self.noun_phrase(0, 0, rng)?,
            PhraseKind::Sentence => self.sentence(0, rng)?,
        };
        Ok(Utterance { tokens: phrase.tokens, kind, derivation: phrase.derivation })
    }

    /// Draws uniformly from `pool` until `accept` unifies, returning the
    /// template and the unification result.
    fn draw(
        &mut self,
        slot: &'static str,
        pool: PoolFn<'a>,
        rng: &mut impl Rng,
        mut accept: impl FnMut(&FeatureStructure) -> Option<FeatureStructure>,
    ) -> Result<(&'a GoldTemplate, FeatureStructure), GenerationError> {
        let candidates = pool(&self.pools);
        if candidates.is_empty() {
            return Err(GenerationError::EmptyPool { slot });
        }
        for _ in 0..MAX_ATTEMPTS {
            let t = *candidates.choose(rng).expect("non-empty pool");
            let inst = t.instantiate(&mut self.fresh);
            if let Some(result) = accept(&inst) {
                return Ok((t, result));
            }
        }
        Err(GenerationError::Exhausted { slot, attempts: MAX_ATTEMPTS })
    }

    /// Draws a head whose argument slots unify with `args`.
    fn head(
        &mut self,
        slot: &'static str,
        pool: PoolFn<'a>,
        args: FeatureStructure,
        rng: &mut impl Rng,
    ) -> Result<(&'a GoldTemplate, FeatureStructure), GenerationError> {
        self.draw(slot, pool, rng, |inst| avm::unify(inst, &args).ok().map(|u| u.structure))
    }

    fn any(
        &mut self,
        slot: &'static str,
        pool: PoolFn<'a>,
        rng: &mut impl Rng,
    ) -> Result<(&'a GoldTemplate, FeatureStructure), GenerationError> {
        self.draw(slot, pool, rng, |inst| Some(inst.clone()))
    }

    fn noun_phrase(
        &mut self,
        pp_depth: usize,
        clause_depth: usize,
        rng: &mut impl Rng,
    ) -> Result<Phrase, GenerationError> {
        let mut rules = vec![NpRule::Bare, NpRule::Adjective];
        if pp_depth < MAX_PP_DEPTH {
            rules.push(NpRule::Prepositional);
        }
        if clause_depth < MAX_CLAUSE_DEPTH {
            rules.extend([NpRule::Relative, NpRule::Infinitival]);
        }
        let rule = *rules.choose(rng).expect("rules non-empty");

        let (noun, noun_fs) = self.any("noun", |p| &p.nouns, rng)?;
        let args = FeatureStructure::new().with("ARG1", noun_fs.clone());
        let (det, det_fs) = self.head("determiner", |p| &p.determiners, args, rng)?;
        let features = np_features(&det_fs);

        let mut phrase = Phrase::word(det);
        if rule == NpRule::Adjective {
            let (adj, _) = self.any("adjective", |p| &p.adjectives, rng)?;
            phrase = phrase.then(Phrase::word(adj));
        }
        phrase = phrase.then(Phrase::word(noun));

        match rule {
            NpRule::Prepositional => {
                let inner = self.noun_phrase(pp_depth + 1, clause_depth, rng)?;
                let args = FeatureStructure::new().with("ARG1", inner.features.clone());
                let (prep, _) = self.head("preposition", |p| &p.prepositions, args, rng)?;
                phrase = phrase.then(Phrase::word(prep)).then(inner);
            }
            NpRule::Relative => {
                let args = FeatureStructure::new().with("ARG1", noun_fs);
                let (rel, _) = self.head("relativizer", |p| &p.relativizers, args, rng)?;
                let subject = FeatureStructure::new().with("ARG1", features.clone());
                let (verb, _) = self.head("relative verb", |p| &p.intransitive, subject, rng)?;
                phrase = phrase.then(Phrase::word(rel)).then(Phrase::word(verb));
            }
            NpRule::Infinitival => {
                phrase = phrase.then(self.infinitival(rng)?);
            }
            NpRule::Bare | NpRule::Adjective => {}
        }
        phrase.features = features;
        Ok(phrase)
    }

    /// `om te V-en`
    fn infinitival(&mut self, rng: &mut impl Rng) -> Result<Phrase, GenerationError> {
        let (verb, verb_fs) = self.any("infinitive", |p| &p.infinitives, rng)?;
        let (te, te_fs) = self.head("te", |p| &p.te, FeatureStructure::new().with("ARG1", verb_fs), rng)?;
        let (om, _) = self.head("om", |p| &p.om, FeatureStructure::new().with("ARG1", te_fs), rng)?;
        Ok(Phrase::word(om).then(Phrase::word(te)).then(Phrase::word(verb)))
    }

    fn subject(&mut self, allow_pronoun: bool, rng: &mut impl Rng) -> Result<Phrase, GenerationError> {
        if allow_pronoun && rng.gen_bool(0.5) {
            let (pron, fs) = self.any("pronoun", |p| &p.pronouns, rng)?;
            let mut phrase = Phrase::word(pron);
            phrase.features = np_features(&fs);
            Ok(phrase)
        } else {
            self.noun_phrase(0, MAX_CLAUSE_DEPTH, rng)
        }
    }

    fn sentence(&mut self, clause_depth: usize, rng: &mut impl Rng) -> Result<Phrase, GenerationError> {
        let mut rules = vec![
            SRule::Intransitive,
            SRule::Transitive,
            SRule::Negated,
            SRule::Existential,
            SRule::Perfect,
            SRule::Passive,
            SRule::Question,
            SRule::Locative,
            SRule::Copular,
            SRule::Infinitival,
            SRule::Manner,
        ];
        if clause_depth < MAX_CLAUSE_DEPTH {
            rules.extend([SRule::Complement, SRule::Coordinated]);
        }
        let rule = *rules.choose(rng).expect("rules non-empty");

        if rule == SRule::Coordinated {
            let left = self.sentence(clause_depth + 1, rng)?;
            let right = self.sentence(clause_depth + 1, rng)?;
            let s = FeatureStructure::new().with_atom("CAT", "s");
            let args = FeatureStructure::new().with("ARG1", s.clone()).with("ARG2", s);
            let (conj, _) = self.head("conjunction", |p| &p.conjunctions, args, rng)?;
            return Ok(left.then(Phrase::word(conj)).then(right));
        }

        let subject = self.subject(rule != SRule::Existential, rng)?;
        let subj_args = FeatureStructure::new().with("ARG1", subject.features.clone());
        let mut phrase = match rule {
            SRule::Intransitive | SRule::Negated | SRule::Locative | SRule::Infinitival | SRule::Manner => {
                let (verb, verb_fs) = self.head("intransitive verb", |p| &p.intransitive, subj_args, rng)?;
                let mut p = subject.then(Phrase::word(verb));
                match rule {
                    SRule::Negated => {
                        let args = FeatureStructure::new().with("ARG1", verb_fs);
                        let (neg, _) = self.head("negation", |p| &p.negation, args, rng)?;
                        p = p.then(Phrase::word(neg));
                    }
                    SRule::Locative => p = p.then(Phrase::word(self.any("locative", |p| &p.locative, rng)?.0)),
                    SRule::Manner => p = p.then(Phrase::word(self.any("adverb", |p| &p.manner, rng)?.0)),
                    SRule::Infinitival => p = p.then(self.infinitival(rng)?),
                    _ => {}
                }
                p
            }
            SRule::Transitive => {
                let object = self.noun_phrase(0, MAX_CLAUSE_DEPTH, rng)?;
                let args = subj_args.with("ARG2", object.features.clone());
                let (verb, _) = self.head("transitive verb", |p| &p.transitive, args, rng)?;
                subject.then(Phrase::word(verb)).then(object)
            }
            SRule::Existential => {
                let (verb, _) = self.head("intransitive verb", |p| &p.intransitive, subj_args, rng)?;
                let (er, _) = self.any("expletive", |p| &p.expletive, rng)?;
                Phrase::word(er).then(Phrase::word(verb)).then(subject)
            }
            SRule::Question => {
                let (verb, _) = self.head("intransitive verb", |p| &p.intransitive, subj_args, rng)?;
                let (wh, _) = self.any("wh-adverb", |p| &p.wh, rng)?;
                Phrase::word(wh).then(Phrase::word(verb)).then(subject)
            }
            SRule::Perfect | SRule::Passive => {
                let (part, part_fs) = if rule == SRule::Passive {
                    self.draw(
                        "participle",
                        |p| &p.participles,
                        rng,
                        |fs| (fs.atom_at("VAL") == Some("tr")).then(|| fs.clone()),
                    )?
                } else {
                    self.any("participle", |p| &p.participles, rng)?
                };
                let args = subj_args.with("ARG2", part_fs);
                let (aux, _) = if rule == SRule::Passive {
                    self.head("passive auxiliary", |p| &p.passive, args, rng)?
                } else {
                    self.head("perfect auxiliary", |p| &p.perfect, args, rng)?
                };
                let mut p = subject.then(Phrase::word(aux));
                if rule == SRule::Passive {
                    let agent = self.noun_phrase(MAX_PP_DEPTH, MAX_CLAUSE_DEPTH, rng)?;
                    let args = FeatureStructure::new().with("ARG1", agent.features.clone());
                    let (door, _) = self.head("agentive preposition", |p| &p.agentive, args, rng)?;
                    p = p.then(Phrase::word(door)).then(agent);
                }
                p.then(Phrase::word(part))
            }
            SRule::Copular => {
                let (adj, adj_fs) = self.any("adjective", |p| &p.adjectives, rng)?;
                let args = subj_args.with("ARG2", adj_fs);
                let (cop, _) = self.head("copula", |p| &p.copulas, args, rng)?;
                subject.then(Phrase::word(cop)).then(Phrase::word(adj))
            }
            SRule::Complement => {
                let embedded = self.sentence(clause_depth + 1, rng)?;
                let s = FeatureStructure::new().with_atom("CAT", "s");
                let (dat, dat_fs) =
                    self.head("complementizer", |p| &p.dat, FeatureStructure::new().with("ARG1", s), rng)?;
                let args = subj_args.with("ARG2", dat_fs);
                let (verb, _) = self.head("clausal verb", |p| &p.clausal, args, rng)?;
                subject.then(Phrase::word(verb)).then(Phrase::word(dat)).then(embedded)
            }
            SRule::Coordinated => unreachable!("handled above"),
        };
        phrase.features = FeatureStructure::new().with_atom("CAT", "s");
        Ok(phrase)
    }
}

/// Convenience wrapper over [`Generator::generate_exemplar`].
pub fn generate_exemplar(
    lexicon: &GoldLexicon,
    kind: PhraseKind,
    rng: &mut impl Rng,
) -> Result<Utterance, GenerationError> {
    Generator::new(lexicon).generate_exemplar(kind, rng)
}

/// `n` independent exemplars drawn sequentially from one stream.
pub fn generate_corpus(
    lexicon: &GoldLexicon,
    kind: PhraseKind,
    n: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Utterance>, GenerationError> {
    if n == 0 {
        return Err(GenerationError::ZeroCount);
    }
    let mut generator = Generator::new(lexicon);
    (0..n).map(|_| generator.generate_exemplar(kind, rng)).collect()
}
