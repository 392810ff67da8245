use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::avm::{self, FeatureStructure, FeatureValue, Var};

/// Open-class templates required per closed-class template.
pub const MIN_OPEN_TO_CLOSED_RATIO: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Det,
    N,
    V,
    Adj,
    Adv,
    Prep,
    Comp,
    Pron,
    Quant,
    Num,
    Conj,
    Aux,
}

impl Category {
    pub const ALL: [Category; 12] = [
        Category::Det,
        Category::N,
        Category::V,
        Category::Adj,
        Category::Adv,
        Category::Prep,
        Category::Comp,
        Category::Pron,
        Category::Quant,
        Category::Num,
        Category::Conj,
        Category::Aux,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Det => "det",
            Category::N => "n",
            Category::V => "v",
            Category::Adj => "adj",
            Category::Adv => "adv",
            Category::Prep => "prep",
            Category::Comp => "comp",
            Category::Pron => "pron",
            Category::Quant => "quant",
            Category::Num => "num",
            Category::Conj => "conj",
            Category::Aux => "aux",
        }
    }

    /// The class a category forces, or `None` for adverbs, which come in
    /// closed (function) and open (content) varieties.
    pub fn implied_class(self) -> Option<GoldClass> {
        match self {
            Category::N | Category::V | Category::Adj => Some(GoldClass::Content),
            Category::Adv => None,
            _ => Some(GoldClass::Function),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown category {s:?}"))
    }
}

/// Mother-side label. Never visible to the daughter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GoldClass {
    Function,
    Content,
}

impl fmt::Display for GoldClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GoldClass::Function => "function",
            GoldClass::Content => "content",
        })
    }
}

impl FromStr for GoldClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "function" => Ok(GoldClass::Function),
            "content" => Ok(GoldClass::Content),
            other => Err(format!("unknown class {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldTemplate {
    pub phonform: String,
    pub category: Category,
    pub gold_class: GoldClass,
    /// Everything except phonform, class and argument slots; includes `CAT`.
    pub features: FeatureStructure,
    /// Complement constraints `ARG1`, `ARG2`, … in order. They share
    /// variables with `features`.
    pub arg_slots: Vec<FeatureStructure>,
}

impl GoldTemplate {
    pub fn id(&self) -> String {
        format!("{}/{}", self.phonform, self.category)
    }

    /// The template as one structure with fresh variable names: `features`
    /// plus `ARG1..ARGn`.
    pub fn instantiate(&self, fresh: &mut Freshener) -> FeatureStructure {
        let suffix = fresh.next_suffix();
        let mut rename = |v: &Var| Var::new(&format!("{}_{suffix}", v.as_str()));
        let mut fs = self.features.rename_vars(&mut rename);
        for (i, slot) in self.arg_slots.iter().enumerate() {
            fs.insert(&format!("ARG{}", i + 1), slot.rename_vars(&mut rename));
        }
        fs
    }

    /// Grammar-file form of the template.
    pub fn to_entry(&self) -> FeatureStructure {
        let mut fs = self.features.clone();
        fs.insert("PHON", FeatureValue::atom(&self.phonform));
        fs.insert("CLASS", FeatureValue::atom(&self.gold_class.to_string()));
        for (i, slot) in self.arg_slots.iter().enumerate() {
            fs.insert(&format!("ARG{}", i + 1), slot.clone());
        }
        fs
    }

    fn from_entry(line: usize, mut fs: FeatureStructure) -> Result<Self, LexiconError> {
        let invalid = |message: String| LexiconError::Invalid { line, message };
        let phonform = match fs.remove("PHON") {
            Some(FeatureValue::Atom(a)) if !a.as_str().is_empty() => a.as_str().to_string(),
            _ => return Err(invalid("entry needs an atomic PHON".into())),
        };
        let category: Category = fs
            .atom_at("CAT")
            .ok_or_else(|| invalid(format!("{phonform}: entry needs an atomic CAT")))?
            .parse()
            .map_err(|e: String| invalid(format!("{phonform}: {e}")))?;
        let gold_class: GoldClass = match fs.remove("CLASS") {
            Some(FeatureValue::Atom(a)) => {
                a.as_str().parse().map_err(|e: String| invalid(format!("{phonform}: {e}")))?
            }
            _ => return Err(invalid(format!("{phonform}: entry needs an atomic CLASS"))),
        };
        if let Some(implied) = category.implied_class() {
            if implied != gold_class {
                return Err(invalid(format!("{phonform}: category {category} is always {implied}")));
            }
        }
        let mut arg_slots = Vec::new();
        for i in 1.. {
            match fs.remove(&format!("ARG{i}")) {
                Some(FeatureValue::Nested(slot)) => arg_slots.push(slot),
                Some(_) => return Err(invalid(format!("{phonform}: ARG{i} must be a structure"))),
                None => break,
            }
        }
        if fs.iter().any(|(attr, _)| attr.as_str().starts_with("ARG") && attr.as_str()[3..].parse::<usize>().is_ok()) {
            return Err(invalid(format!("{phonform}: argument slots must be numbered contiguously from ARG1")));
        }
        Ok(GoldTemplate { phonform, category, gold_class, features: fs, arg_slots })
    }
}

/// Mints per-instantiation variable suffixes.
#[derive(Debug, Default, Clone)]
pub struct Freshener {
    next: u64,
}

impl Freshener {
    pub fn next_suffix(&mut self) -> u64 {
        self.next += 1;
        self.next
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("parse error: {0}")]
    Parse(#[from] avm::ParseError),
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("duplicate entry {phonform}/{category} (lines {first} and {second})")]
    Duplicate { phonform: String, category: Category, first: usize, second: usize },
    #[error("{phonform:?} is listed both as a function and as a content word")]
    NotDisjoint { phonform: String },
    #[error("open class has {open} templates, need at least {required} ({ratio} x {closed} closed)")]
    SizeRatio { open: usize, closed: usize, ratio: usize, required: usize },
}

impl LexiconError {
    /// Line of a parse error, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            LexiconError::Parse(e) => Some(e.line),
            LexiconError::Invalid { line, .. } => Some(*line),
            LexiconError::Duplicate { second, .. } => Some(*second),
            _ => None,
        }
    }
}

/// Mother lexicon, split by gold class.
#[derive(Debug, Clone)]
pub struct GoldLexicon {
    closed_class: Vec<GoldTemplate>,
    open_class: Vec<GoldTemplate>,
    class_of: HashMap<String, GoldClass>,
}

impl GoldLexicon {
    /// Loads with every check, including the open/closed size ratio.
    pub fn load(source: &str) -> Result<Self, LexiconError> {
        Self::load_with_ratio(source, Some(MIN_OPEN_TO_CLOSED_RATIO))
    }

    /// Loads with an optional size-ratio requirement; toy grammars in tests
    /// pass `None`.
    pub fn load_with_ratio(source: &str, ratio: Option<usize>) -> Result<Self, LexiconError> {
        let mut templates = Vec::new();
        for (line, fs) in avm::parse_structures(source)? {
            templates.push((line, GoldTemplate::from_entry(line, fs)?));
        }
        Self::from_templates(templates, ratio)
    }

    pub fn from_templates(templates: Vec<(usize, GoldTemplate)>, ratio: Option<usize>) -> Result<Self, LexiconError> {
        let mut seen: HashMap<(String, Category), usize> = HashMap::new();
        let mut class_of: HashMap<String, GoldClass> = HashMap::new();
        let mut closed_class = Vec::new();
        let mut open_class = Vec::new();
        for (line, t) in templates {
            if let Some(&first) = seen.get(&(t.phonform.clone(), t.category)) {
                return Err(LexiconError::Duplicate {
                    phonform: t.phonform,
                    category: t.category,
                    first,
                    second: line,
                });
            }
            seen.insert((t.phonform.clone(), t.category), line);
            match class_of.get(&t.phonform) {
                Some(&c) if c != t.gold_class => {
                    return Err(LexiconError::NotDisjoint { phonform: t.phonform });
                }
                _ => {
                    class_of.insert(t.phonform.clone(), t.gold_class);
                }
            }
            match t.gold_class {
                GoldClass::Function => closed_class.push(t),
                GoldClass::Content => open_class.push(t),
            }
        }
        if let Some(ratio) = ratio {
            let required = ratio * closed_class.len();
            if open_class.len() < required {
                return Err(LexiconError::SizeRatio {
                    open: open_class.len(),
                    closed: closed_class.len(),
                    ratio,
                    required,
                });
            }
        }
        Ok(GoldLexicon { closed_class, open_class, class_of })
    }

    pub fn closed_class(&self) -> &[GoldTemplate] {
        &self.closed_class
    }

    pub fn open_class(&self) -> &[GoldTemplate] {
        &self.open_class
    }

    pub fn templates(&self) -> impl Iterator<Item = &GoldTemplate> {
        self.closed_class.iter().chain(self.open_class.iter())
    }

    pub fn len(&self) -> usize {
        self.closed_class.len() + self.open_class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Gold class of a surface form; every template sharing a phonform has
    /// the same class.
    pub fn gold_class(&self, phonform: &str) -> Option<GoldClass> {
        self.class_of.get(phonform).copied()
    }

    pub fn contains(&self, phonform: &str) -> bool {
        self.class_of.contains_key(phonform)
    }

    /// Closed-class phonforms (distinct surface forms).
    pub fn function_words(&self) -> HashSet<&str> {
        self.closed_class.iter().map(|t| t.phonform.as_str()).collect()
    }
}
