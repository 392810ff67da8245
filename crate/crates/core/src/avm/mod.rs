//! Attribute-value matrices: the grammatical formalism shared by both agents.
//!
//! A [`FeatureStructure`] is a map from upper-case attribute names to
//! [`FeatureValue`]s. Values are atoms, variables, or nested structures.
//! Re-entrancy (two paths sharing one node) is written with a shared
//! variable; a nested structure may carry a variable tag so that its content
//! and its other occurrences name the same node:
//!
//! ```text
//! [CAT:det, NUMBER:?N, ARG1:?K[CAT:n, NUMBER:?N], SHARED:?K]
//! ```
//!
//! Grammar-file syntax:
//!
//! ```text
//! structure := tag? '[' (pair (','? pair)*)? ']'
//! tag       := '?' ident
//! pair      := attr ':' value
//! value     := structure | '?' ident | atom
//! attr      := letter (letter | digit | '_' | '-')*        stored upper-case
//! atom      := (letter | digit | '\'' | '_' | '-' | '+' | '.')+   stored lower-case
//! ident     := (letter | digit | '_')+
//! ```
//!
//! Whitespace (including newlines) separates tokens, and `#` starts a comment
//! running to the end of the line.

mod graph;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

pub use graph::{canonicalize, subsumes, unify, unify_all, Bindings, Unified, UnifyFailure};
pub use parse::{parse_structure, parse_structures, ParseError};

/// Upper-case attribute name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attr(String);

impl Attr {
    pub fn new(name: &str) -> Self {
        Attr(name.to_uppercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Attr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Atomic constant. Compared case-insensitively, stored lower-case.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(String);

impl Atom {
    pub fn new(value: &str) -> Self {
        Atom(value.to_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Variable identifier, written `?name` in grammar files.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(name.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeatureValue {
    Atom(Atom),
    Var(Var),
    Nested(FeatureStructure),
}

impl FeatureValue {
    pub fn atom(value: &str) -> Self {
        FeatureValue::Atom(Atom::new(value))
    }

    pub fn var(name: &str) -> Self {
        FeatureValue::Var(Var::new(name))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            FeatureValue::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_structure(&self) -> Option<&FeatureStructure> {
        match self {
            FeatureValue::Nested(fs) => Some(fs),
            _ => None,
        }
    }
}

impl From<FeatureStructure> for FeatureValue {
    fn from(fs: FeatureStructure) -> Self {
        FeatureValue::Nested(fs)
    }
}

/// A (possibly tagged) attribute-value matrix. Attributes iterate in sorted
/// order, which fixes every traversal the crate performs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeatureStructure {
    tag: Option<Var>,
    attrs: BTreeMap<Attr, FeatureValue>,
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tagged(tag: Var) -> Self {
        FeatureStructure { tag: Some(tag), attrs: BTreeMap::new() }
    }

    /// Builder-style insert. Replaces any existing value for `attr`.
    pub fn with(mut self, attr: &str, value: impl Into<FeatureValue>) -> Self {
        self.insert(attr, value);
        self
    }

    pub fn with_atom(self, attr: &str, value: &str) -> Self {
        self.with(attr, FeatureValue::atom(value))
    }

    pub fn with_var(self, attr: &str, name: &str) -> Self {
        self.with(attr, FeatureValue::var(name))
    }

    pub fn insert(&mut self, attr: &str, value: impl Into<FeatureValue>) -> Option<FeatureValue> {
        self.attrs.insert(Attr::new(attr), value.into())
    }

    pub fn remove(&mut self, attr: &str) -> Option<FeatureValue> {
        self.attrs.remove(&Attr::new(attr))
    }

    pub fn get(&self, attr: &str) -> Option<&FeatureValue> {
        self.attrs.get(&Attr::new(attr))
    }

    /// Follows a `|`-separated path such as `ARG1|NUMBER`.
    pub fn get_path(&self, path: &str) -> Option<&FeatureValue> {
        let mut parts = path.split('|');
        let mut current = self.get(parts.next()?)?;
        for part in parts {
            current = current.as_structure()?.get(part)?;
        }
        Some(current)
    }

    pub fn atom_at(&self, path: &str) -> Option<&str> {
        self.get_path(path).and_then(FeatureValue::as_atom).map(Atom::as_str)
    }

    pub fn tag(&self) -> Option<&Var> {
        self.tag.as_ref()
    }

    pub fn set_tag(&mut self, tag: Option<Var>) {
        self.tag = tag;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Attr, &FeatureValue)> {
        self.attrs.iter()
    }

    pub fn len(&self) -> usize {
        self.attrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attrs.is_empty()
    }

    /// All variables occurring anywhere, tags included, in first-visit order.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        if let Some(tag) = &self.tag {
            if !out.contains(tag) {
                out.push(tag.clone());
            }
        }
        for value in self.attrs.values() {
            match value {
                FeatureValue::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                FeatureValue::Nested(fs) => fs.collect_vars(out),
                FeatureValue::Atom(_) => {}
            }
        }
    }

    /// Renames every variable through `rename`. Used to freshen template
    /// instantiations.
    pub fn rename_vars(&self, rename: &mut impl FnMut(&Var) -> Var) -> FeatureStructure {
        FeatureStructure {
            tag: self.tag.as_ref().map(&mut *rename),
            attrs: self
                .attrs
                .iter()
                .map(|(k, v)| {
                    let v = match v {
                        FeatureValue::Var(var) => FeatureValue::Var(rename(var)),
                        FeatureValue::Nested(fs) => FeatureValue::Nested(fs.rename_vars(rename)),
                        FeatureValue::Atom(a) => FeatureValue::Atom(a.clone()),
                    };
                    (k.clone(), v)
                })
                .collect(),
        }
    }

    /// Maximum nesting depth; an empty or flat structure has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.attrs.values().filter_map(FeatureValue::as_structure).map(FeatureStructure::depth).max().unwrap_or(0)
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(tag) = &self.tag {
            write!(f, "{tag}")?;
        }
        f.write_str("[")?;
        for (i, (attr, value)) in self.attrs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{attr}:{value}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Atom(a) => write!(f, "{a}"),
            FeatureValue::Var(v) => write!(f, "{v}"),
            FeatureValue::Nested(fs) => write!(f, "{fs}"),
        }
    }
}

impl std::str::FromStr for FeatureStructure {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_structure(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attribute_names_are_case_insensitive() {
        let fs = FeatureStructure::new().with_atom("number", "Plur");
        assert_eq!(fs.atom_at("NUMBER"), Some("plur"));
        assert_eq!(fs.atom_at("Number"), Some("plur"));
    }

    #[test]
    fn display_is_sorted() {
        let fs = FeatureStructure::new()
            .with_atom("PERSON", "3")
            .with_var("NUMBER", "N")
            .with("ARG", FeatureStructure::new().with_atom("CAT", "n"));
        assert_eq!(fs.to_string(), "[ARG:[CAT:n], NUMBER:?N, PERSON:3]");
    }

    #[test]
    fn path_lookup() {
        let fs: FeatureStructure = "[ARG:[SYNSEM:[CAT:n]]]".parse().unwrap();
        assert_eq!(fs.atom_at("ARG|SYNSEM|CAT"), Some("n"));
        assert_eq!(fs.atom_at("ARG|CAT"), None);
        assert_eq!(fs.depth(), 3);
    }
}
