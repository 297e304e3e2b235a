//! L-system definitions:
//!
//! ```text
//! system    = statement { ( ";" | newline ) statement } ;
//! statement = "axiom" word | "alphabet" word | letter "->" word | letter ":=" expr ;
//! word      = letter { letter } ;      (whitespace between letters is ignored)
//! letter    = "A" … "Z" | "a" … "z" ;
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::parser::parse_expr_at;
use super::{MapError, MapSpec};

pub type Letter = char;

#[derive(Clone, Debug, PartialEq)]
pub struct LSystemSpec {
    pub name: String,
    pub alphabet: Vec<Letter>,
    pub rules: BTreeMap<Letter, Vec<Letter>>,
    pub axiom: Vec<Letter>,
    pub bindings: BTreeMap<Letter, MapSpec>,
}

impl LSystemSpec {
    /// Checks that every letter has a function, as L-iteration requires.
    pub fn require_bindings(&self) -> Result<(), MapError> {
        match self.alphabet.iter().find(|c| !self.bindings.contains_key(c)) {
            Some(c) => Err(MapError::MissingBinding(*c)),
            None => Ok(()),
        }
    }

    /// Parameters referenced by any binding.
    pub fn params(&self) -> Vec<String> {
        let mut all = BTreeSet::new();
        for m in self.bindings.values() {
            all.extend(m.params.iter().cloned());
        }
        all.into_iter().collect()
    }

    pub fn rule(&self, c: Letter) -> &[Letter] {
        &self.rules[&c]
    }

    /// Canonical source text.
    pub fn text(&self) -> String {
        self.to_string()
    }
}

fn word_text(w: &[Letter]) -> String {
    w.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for LSystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alphabet {}; axiom {}", word_text(&self.alphabet), word_text(&self.axiom))?;
        for (c, body) in &self.rules {
            write!(f, "; {c} -> {}", word_text(body))?;
        }
        for (c, m) in &self.bindings {
            write!(f, "; {c} := {}", m.expr)?;
        }
        Ok(())
    }
}

struct Stmt<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn split_statements(text: &str) -> Vec<Stmt<'_>> {
    let mut out = Vec::new();
    for (li, raw_line) in text.split('\n').enumerate() {
        let line = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        };
        let mut start = 0;
        for (i, ch) in line.char_indices() {
            if ch == ';' {
                out.push(Stmt { text: &line[start..i], line: li + 1, column: line[..start].chars().count() + 1 });
                start = i + 1;
            }
        }
        out.push(Stmt { text: &line[start..], line: li + 1, column: line[..start].chars().count() + 1 });
    }
    out
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> MapError {
    MapError::Syntax { line, column, message: message.into() }
}

/// Letters of `text`, which begins at (line, column).
fn parse_word(text: &str, line: usize, column: usize) -> Result<Vec<Letter>, MapError> {
    let mut out = Vec::new();
    for (i, ch) in text.chars().enumerate() {
        if ch.is_whitespace() {
            continue;
        }
        if !ch.is_ascii_alphabetic() {
            return Err(syntax(line, column + i, format!("{ch:?} is not a letter")));
        }
        out.push(ch);
    }
    Ok(out)
}

fn single_letter(text: &str, line: usize, column: usize) -> Result<Letter, MapError> {
    let w = parse_word(text, line, column)?;
    if w.len() != 1 {
        return Err(syntax(line, column, "expected a single letter before the arrow"));
    }
    Ok(w[0])
}

pub fn parse_lsystem(text: &str) -> Result<LSystemSpec, MapError> {
    let mut axiom: Option<Vec<Letter>> = None;
    let mut alphabet: Option<Vec<Letter>> = None;
    let mut rules: BTreeMap<Letter, Vec<Letter>> = BTreeMap::new();
    let mut bindings: BTreeMap<Letter, MapSpec> = BTreeMap::new();
    let mut last_pos = (1, 1);

    for st in split_statements(text) {
        let lead = st.text.len() - st.text.trim_start().len();
        let body = st.text.trim();
        if body.is_empty() {
            continue;
        }
        let col = st.column + st.text[..lead].chars().count();
        last_pos = (st.line, col);
        let keyword = |kw: &str| {
            body.strip_prefix(kw).filter(|rest| rest.is_empty() || rest.starts_with(char::is_whitespace))
        };
        if let Some(rest) = keyword("axiom") {
            if axiom.is_some() {
                return Err(syntax(st.line, col, "axiom given twice"));
            }
            let w = parse_word(rest, st.line, col + 5)?;
            if w.is_empty() {
                return Err(syntax(st.line, col, "axiom must not be empty"));
            }
            axiom = Some(w);
        } else if let Some(rest) = keyword("alphabet") {
            if alphabet.is_some() {
                return Err(syntax(st.line, col, "alphabet given twice"));
            }
            alphabet = Some(parse_word(rest, st.line, col + 8)?);
        } else if let Some(i) = body.find(":=") {
            let c = single_letter(&body[..i], st.line, col)?;
            let rhs_col = col + body[..i + 2].chars().count();
            let expr = parse_expr_at(&body[i + 2..], st.line, rhs_col)?;
            if bindings.insert(c, MapSpec::from_expr(&c.to_string(), expr)).is_some() {
                return Err(syntax(st.line, col, format!("letter {c} bound twice")));
            }
        } else if let Some(i) = body.find("->") {
            let c = single_letter(&body[..i], st.line, col)?;
            let rhs_col = col + body[..i + 2].chars().count();
            let w = parse_word(&body[i + 2..], st.line, rhs_col)?;
            if w.is_empty() {
                return Err(syntax(st.line, col, "rule body must not be empty"));
            }
            if rules.insert(c, w).is_some() {
                return Err(MapError::DuplicateRule(c));
            }
        } else {
            return Err(syntax(st.line, col, "expected 'axiom', 'alphabet', a rule 'X -> W' or a binding 'X := expr'"));
        }
    }

    let axiom = axiom.ok_or_else(|| syntax(last_pos.0, last_pos.1, "missing axiom"))?;
    let mentioned: BTreeSet<Letter> =
        axiom.iter().chain(rules.keys()).chain(rules.values().flatten()).copied().collect();
    let alphabet: Vec<Letter> = match alphabet {
        Some(a) => {
            let set: BTreeSet<Letter> = a.iter().copied().collect();
            if let Some(c) = mentioned.iter().chain(bindings.keys()).find(|c| !set.contains(c)) {
                return Err(MapError::UnknownLetter(*c));
            }
            set.into_iter().collect()
        }
        None => {
            if let Some(c) = bindings.keys().find(|c| !mentioned.contains(c)) {
                return Err(MapError::UnknownLetter(*c));
            }
            mentioned.into_iter().collect()
        }
    };
    if let Some(c) = alphabet.iter().find(|c| !rules.contains_key(c)) {
        return Err(MapError::MissingRule(*c));
    }
    Ok(LSystemSpec { name: "lsystem".to_string(), alphabet, rules, axiom, bindings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_l1() {
        let l = parse_lsystem("axiom A; A -> A B; B -> B A").unwrap();
        assert_eq!(l.alphabet, vec!['A', 'B']);
        assert_eq!(l.axiom, vec!['A']);
        assert_eq!(l.rule('A'), &['A', 'B']);
        assert_eq!(l.rule('B'), &['B', 'A']);
        assert!(l.bindings.is_empty());
        assert_eq!(parse_lsystem(&l.text()).unwrap(), l);
    }

    #[test]
    fn constant_system() {
        let l = parse_lsystem("axiom A; A -> A").unwrap();
        assert_eq!(l.alphabet, vec!['A']);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(parse_lsystem("axiom A; A -> B").unwrap_err(), MapError::MissingRule('B'));
        assert_eq!(parse_lsystem("alphabet A; axiom A; A -> A C").unwrap_err(), MapError::UnknownLetter('C'));
        assert_eq!(parse_lsystem("axiom A; A -> A; A -> A A").unwrap_err(), MapError::DuplicateRule('A'));
        assert_eq!(parse_lsystem("axiom A; A -> A; Z := x").unwrap_err(), MapError::UnknownLetter('Z'));
        assert!(matches!(parse_lsystem("A -> A"), Err(MapError::Syntax { .. })));
        assert!(matches!(parse_lsystem("axiom A; A -> 1"), Err(MapError::Syntax { line: 1, column: 15, .. })));
        assert!(matches!(parse_lsystem("axiom A\nA -> A\nA := x +"), Err(MapError::Syntax { line: 3, .. })));
        assert!(matches!(parse_lsystem("axiom A; hello"), Err(MapError::Syntax { line: 1, column: 10, .. })));
    }

    #[test]
    fn bindings_and_comments() {
        let text = "# the gamma/cos family\naxiom A\nA -> A B  # doubling\nB -> B A\nA := gamma(x + 1)\nB := cos(x)\n";
        let l = parse_lsystem(text).unwrap();
        assert_eq!(l.bindings[&'A'].text(), "gamma(x + 1)");
        assert_eq!(l.bindings[&'B'].text(), "cos(x)");
        l.require_bindings().unwrap();
        let missing = parse_lsystem("axiom A; A -> A B; B -> B A; A := x").unwrap();
        assert_eq!(missing.require_bindings().unwrap_err(), MapError::MissingBinding('B'));
        let fam = parse_lsystem("axiom A; A -> A B; B -> B A; A := a*cos(x) + b; B := c*x^2").unwrap();
        assert_eq!(fam.params(), vec!["a", "b", "c"]);
    }
}
