use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use super::{Atom, Attr, FeatureStructure, FeatureValue, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Parses exactly one structure; trailing content other than whitespace and
/// comments is an error.
pub fn parse_structure(text: &str) -> Result<FeatureStructure, ParseError> {
    let mut parser = Parser::new(text);
    let fs = parser.structure()?;
    parser.skip_trivia();
    if let Some(c) = parser.peek() {
        return Err(parser.error(format!("unexpected trailing character {c:?}")));
    }
    Ok(fs)
}

/// Parses a sequence of top-level structures, returning each with the line on
/// which it starts.
pub fn parse_structures(text: &str) -> Result<Vec<(usize, FeatureStructure)>, ParseError> {
    let mut parser = Parser::new(text);
    let mut out = Vec::new();
    loop {
        parser.skip_trivia();
        if parser.peek().is_none() {
            return Ok(out);
        }
        let line = parser.line;
        out.push((line, parser.structure()?));
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

fn is_atom_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '\'' | '_' | '-' | '+' | '.')
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column, message: message.into() }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected {want:?}, found {c:?}"))),
            None => Err(self.error(format!("expected {want:?}, found end of input"))),
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn variable(&mut self) -> Result<Var, ParseError> {
        self.expect('?')?;
        let name = self.take_while(is_ident_char);
        if name.is_empty() {
            return Err(self.error("empty variable name"));
        }
        Ok(Var::new(&name))
    }

    fn structure(&mut self) -> Result<FeatureStructure, ParseError> {
        self.skip_trivia();
        let tag = if self.peek() == Some('?') { Some(self.variable()?) } else { None };
        let fs = self.body(tag)?;
        validate(&fs).map_err(|m| self.error(m))?;
        Ok(fs)
    }

    fn body(&mut self, tag: Option<Var>) -> Result<FeatureStructure, ParseError> {
        self.expect('[')?;
        let mut attrs = BTreeMap::new();
        loop {
            self.skip_trivia();
            match self.peek() {
                Some(']') => {
                    self.bump();
                    break;
                }
                Some(',') if !attrs.is_empty() => {
                    self.bump();
                    continue;
                }
                Some(c) if c.is_alphabetic() => {}
                Some(c) => return Err(self.error(format!("expected attribute name, found {c:?}"))),
                None => return Err(self.error("unterminated structure")),
            }
            let name = self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '-');
            let attr = Attr::new(&name);
            self.expect(':')?;
            let value = self.value()?;
            if attrs.insert(attr.clone(), value).is_some() {
                return Err(self.error(format!("duplicate attribute {attr}")));
            }
        }
        Ok(FeatureStructure { tag, attrs })
    }

    fn value(&mut self) -> Result<FeatureValue, ParseError> {
        self.skip_trivia();
        match self.peek() {
            Some('[') => Ok(FeatureValue::Nested(self.body(None)?)),
            Some('?') => {
                let var = self.variable()?;
                if self.peek() == Some('[') {
                    Ok(FeatureValue::Nested(self.body(Some(var))?))
                } else {
                    Ok(FeatureValue::Var(var))
                }
            }
            Some(c) if is_atom_char(c) => Ok(FeatureValue::Atom(Atom::new(&self.take_while(is_atom_char)))),
            Some(c) => Err(self.error(format!("expected value, found {c:?}"))),
            None => Err(self.error("expected value, found end of input")),
        }
    }
}

/// Each tag carries content at most once, and no tagged structure contains
/// its own tag.
fn validate(fs: &FeatureStructure) -> Result<(), String> {
    fn walk(fs: &FeatureStructure, open: &mut Vec<Var>, defined: &mut HashSet<Var>) -> Result<(), String> {
        if let Some(tag) = &fs.tag {
            if !defined.insert(tag.clone()) {
                return Err(format!("tag {tag} is given content twice"));
            }
            open.push(tag.clone());
        }
        for value in fs.attrs.values() {
            match value {
                FeatureValue::Var(v) if open.contains(v) => {
                    return Err(format!("variable {v} occurs inside its own structure"));
                }
                FeatureValue::Nested(inner) => walk(inner, open, defined)?,
                _ => {}
            }
        }
        if fs.tag.is_some() {
            open.pop();
        }
        Ok(())
    }
    walk(fs, &mut Vec::new(), &mut HashSet::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_with_comments() {
        let text = "# determiner\n[CAT:det, # the category\n ARG:[CAT:n NUMBER:?N], NUMBER:?N]";
        let fs = parse_structure(text).unwrap();
        assert_eq!(fs.to_string(), "[ARG:[CAT:n, NUMBER:?N], CAT:det, NUMBER:?N]");
    }

    #[test]
    fn atoms_keep_apostrophes_and_lowercase() {
        let fs = parse_structure("[PHON:Massa's]").unwrap();
        assert_eq!(fs.atom_at("PHON"), Some("massa's"));
    }

    #[test]
    fn rejects_duplicate_attribute() {
        let err = parse_structure("[CAT:det, cat:n]").unwrap_err();
        assert!(err.message.contains("duplicate"), "{err}");
    }

    #[test]
    fn rejects_cyclic_tag() {
        let err = parse_structure("[A:?K[B:?K]]").unwrap_err();
        assert!(err.message.contains("own structure"), "{err}");
    }

    #[test]
    fn rejects_double_content() {
        assert!(parse_structure("[A:?K[B:x], C:?K[D:y]]").is_err());
        assert!(parse_structure("[A:?K[B:x], C:?K]").is_ok());
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_structure("[A:x,\n B:]").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn multiple_top_level() {
        let items = parse_structures("[A:x]\n\n# c\n[B:y]\n").unwrap();
        assert_eq!(items.len(), 2);
        assert_eq!(items[1].0, 4);
    }

    #[test]
    fn trailing_garbage() {
        assert!(parse_structure("[A:x] ]").is_err());
        assert!(parse_structure("[]").unwrap().is_empty());
    }
}
