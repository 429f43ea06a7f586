//! Line-oriented theory files.
//!
//! ```text
//! # comment
//! theory bit
//! states: 0 1
//! map not: 0->1, 1->0
//! attribute zero: {0}
//! variable T: zero one
//! joint map cnot on bit x bit: (0,0)->(0,0), (0,1)->(0,1),
//!     (1,0)->(1,1), (1,1)->(1,0)
//! ```
//!
//! `→` and `->` are interchangeable. A line ending in `,` continues on the
//! next line. Every map lists each state (or state pair) exactly once on the
//! left.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{FiniteError, FiniteTheory, NamedMap, StateSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A joint map declared on the product of two theories of the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointMap {
    pub left: String,
    pub right: String,
    pub map: NamedMap,
}

#[derive(Debug, Clone)]
pub struct TheoryFile {
    theories: Vec<FiniteTheory>,
    joint_maps: Vec<JointMap>,
}

impl TheoryFile {
    /// The first theory declared in the file.
    pub fn primary(&self) -> &FiniteTheory {
        &self.theories[0]
    }

    pub fn theories(&self) -> &[FiniteTheory] {
        &self.theories
    }

    pub fn theory(&self, name: &str) -> Option<&FiniteTheory> {
        self.theories.iter().find(|t| t.name() == name)
    }

    pub fn joint_maps(&self) -> &[JointMap] {
        &self.joint_maps
    }
}

/// One logical line with the source position of every character.
struct Line {
    chars: Vec<char>,
    origin: Vec<(usize, usize)>,
    end: (usize, usize),
}

struct Cursor<'a> {
    line: &'a Line,
    pos: usize,
}

const DELIMS: &[char] = &[',', '(', ')', '{', '}', ':', '→'];

impl<'a> Cursor<'a> {
    fn new(line: &'a Line) -> Self {
        Self { line, pos: 0 }
    }

    fn at(&self) -> (usize, usize) {
        self.line.origin.get(self.pos).copied().unwrap_or(self.line.end)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, column) = self.at();
        ParseError { line, column, message: message.into() }
    }

    fn peek(&self) -> Option<char> {
        self.line.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn done(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.line.chars.len()
    }

    fn at_arrow(&self) -> bool {
        match self.peek() {
            Some('→') => true,
            Some('-') => self.line.chars.get(self.pos + 1) == Some(&'>'),
            _ => false,
        }
    }

    fn try_eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.try_eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn arrow(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('→') => self.pos += 1,
            Some('-') if self.at_arrow() => self.pos += 2,
            _ => return Err(self.error("expected `->` or `→`")),
        }
        Ok(())
    }

    /// A run of non-whitespace, non-delimiter characters. Returns the word
    /// and its starting position.
    fn word(&mut self) -> Result<(String, (usize, usize)), ParseError> {
        self.skip_ws();
        let start = self.at();
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() || DELIMS.contains(&c) || self.at_arrow() {
                break;
            }
            out.push(c);
            self.pos += 1;
        }
        if out.is_empty() {
            return Err(self.error("expected a name"));
        }
        Ok((out, start))
    }

    fn keyword(&mut self, kw: &str) -> bool {
        let save = self.pos;
        match self.word() {
            Ok((w, _)) if w == kw => true,
            _ => {
                self.pos = save;
                false
            }
        }
    }
}

fn logical_lines(text: &str) -> Vec<Line> {
    let mut out = Vec::new();
    let mut current: Option<Line> = None;
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let line_no = i + 1;
        let mut line = current.take().unwrap_or(Line { chars: Vec::new(), origin: Vec::new(), end: (line_no, 1) });
        if !line.chars.is_empty() {
            line.chars.push(' ');
            line.origin.push((line_no, 1));
        }
        for (col, c) in body.chars().enumerate() {
            line.chars.push(c);
            line.origin.push((line_no, col + 1));
        }
        line.end = (line_no, body.chars().count() + 1);
        let trimmed: String = line.chars.iter().collect::<String>().trim_end().to_string();
        if trimmed.ends_with(',') {
            current = Some(line);
        } else if !trimmed.trim().is_empty() {
            out.push(line);
        }
    }
    if let Some(line) = current {
        out.push(line);
    }
    out
}

struct Builder {
    theories: Vec<FiniteTheory>,
    joint_maps: Vec<JointMap>,
}

impl Builder {
    fn current(&mut self, cur: &Cursor) -> Result<&mut FiniteTheory, ParseError> {
        self.theories.last_mut().ok_or_else(|| cur.error("declaration before any `theory` line"))
    }

    fn theory_index(&self, name: &str) -> Option<usize> {
        self.theories.iter().position(|t| t.name() == name)
    }
}

fn lift(e: FiniteError, at: (usize, usize)) -> ParseError {
    ParseError { line: at.0, column: at.1, message: e.to_string() }
}

fn resolve(t: &FiniteTheory, name: &str, at: (usize, usize)) -> Result<usize, ParseError> {
    t.state_index(name).ok_or_else(|| ParseError {
        line: at.0,
        column: at.1,
        message: format!("undeclared state `{name}` in theory `{}`", t.name()),
    })
}

/// Collects a total map from `(left, right)` entries over `n` left keys.
fn total_map(
    name: &str,
    entries: Vec<(usize, usize, (usize, usize))>,
    n: usize,
    key_label: impl Fn(usize) -> String,
    start: (usize, usize),
) -> Result<NamedMap, ParseError> {
    let mut images: BTreeMap<usize, usize> = BTreeMap::new();
    for (from, to, at) in entries {
        if images.insert(from, to).is_some() {
            return Err(ParseError {
                line: at.0,
                column: at.1,
                message: format!("map `{name}` lists state `{}` twice", key_label(from)),
            });
        }
    }
    if let Some(missing) = (0..n).find(|k| !images.contains_key(k)) {
        return Err(ParseError {
            line: start.0,
            column: start.1,
            message: format!("map `{name}` is not total: state `{}` has no image", key_label(missing)),
        });
    }
    Ok(NamedMap::new(name, images.into_values().map(|v| v as u32).collect()))
}

fn parse_line(b: &mut Builder, line: &Line) -> Result<(), ParseError> {
    let mut cur = Cursor::new(line);
    let (head, head_at) = cur.word()?;
    match head.as_str() {
        "theory" => {
            let (name, at) = cur.word()?;
            if !cur.done() {
                return Err(cur.error("unexpected text after theory name"));
            }
            if b.theory_index(&name).is_some() {
                return Err(lift(FiniteError::DuplicateName(name), at));
            }
            b.theories.push(FiniteTheory {
                name,
                states: Vec::new(),
                generators: Vec::new(),
                closure_cap: super::DEFAULT_CLOSURE_CAP,
                attributes: Vec::new(),
                variables: Vec::new(),
            });
        }
        "states" => {
            cur.expect(':')?;
            let mut states: Vec<String> = Vec::new();
            while !cur.done() {
                let (s, at) = cur.word()?;
                if states.contains(&s) {
                    return Err(lift(FiniteError::DuplicateName(s), at));
                }
                states.push(s);
            }
            let t = b.current(&cur)?;
            if !t.states.is_empty() {
                return Err(ParseError { line: head_at.0, column: head_at.1, message: "states declared twice".into() });
            }
            if states.is_empty() {
                return Err(cur.error("`states:` needs at least one state"));
            }
            t.states = states;
        }
        "map" => {
            let (name, _) = cur.word()?;
            cur.expect(':')?;
            let t = b.current(&cur)?;
            if t.states.is_empty() {
                return Err(cur.error("map declared before `states:`"));
            }
            let mut entries = Vec::new();
            loop {
                let (from, from_at) = cur.word()?;
                cur.arrow()?;
                let (to, to_at) = cur.word()?;
                entries.push((resolve(t, &from, from_at)?, resolve(t, &to, to_at)?, from_at));
                if !cur.try_eat(',') {
                    break;
                }
            }
            if !cur.done() {
                return Err(cur.error("expected `,` between map entries"));
            }
            let states = t.states.clone();
            let map = total_map(&name, entries, states.len(), |k| states[k].clone(), head_at)?;
            t.add_generator(map).map_err(|e| lift(e, head_at))?;
        }
        "attribute" => {
            let (name, _) = cur.word()?;
            cur.expect(':')?;
            cur.expect('{')?;
            let t = b.current(&cur)?;
            let mut members = Vec::new();
            if !cur.try_eat('}') {
                loop {
                    let (s, at) = cur.word()?;
                    members.push(resolve(t, &s, at)?);
                    if cur.try_eat('}') {
                        break;
                    }
                    cur.expect(',')?;
                }
            }
            if !cur.done() {
                return Err(cur.error("unexpected text after attribute"));
            }
            if members.is_empty() {
                return Err(ParseError {
                    line: head_at.0,
                    column: head_at.1,
                    message: format!("attribute `{name}` is empty"),
                });
            }
            t.declare_attribute(name, StateSet::new(members)).map_err(|e| lift(e, head_at))?;
        }
        "variable" => {
            let (name, _) = cur.word()?;
            cur.expect(':')?;
            let mut attrs = Vec::new();
            while !cur.done() {
                attrs.push(cur.word()?);
            }
            let t = b.current(&cur)?;
            if attrs.is_empty() {
                return Err(cur.error(format!("variable `{name}` has no attributes")));
            }
            for (a, at) in &attrs {
                if t.attribute(a).is_none() {
                    return Err(lift(FiniteError::UnknownAttribute(a.clone()), *at));
                }
            }
            t.declare_variable(name, attrs.into_iter().map(|(a, _)| a).collect()).map_err(|e| lift(e, head_at))?;
        }
        "joint" => {
            if !cur.keyword("map") {
                return Err(cur.error("expected `map` after `joint`"));
            }
            let (name, _) = cur.word()?;
            if !cur.keyword("on") {
                return Err(cur.error("expected `on`"));
            }
            let (first, first_at) = cur.word()?;
            let (left, right) = if cur.keyword("x") || cur.keyword("×") {
                (first, cur.word()?.0)
            } else {
                // `AxB` written without spaces: split at an `x` that names two theories.
                first
                    .char_indices()
                    .filter(|&(_, c)| c == 'x' || c == '×')
                    .map(|(i, c)| (first[..i].to_string(), first[i + c.len_utf8()..].to_string()))
                    .find(|(l, r)| b.theory_index(l).is_some() && b.theory_index(r).is_some())
                    .ok_or_else(|| ParseError {
                        line: first_at.0,
                        column: first_at.1,
                        message: format!("cannot read `{first}` as `<theory> x <theory>`"),
                    })?
            };
            cur.expect(':')?;
            let li = b.theory_index(&left).ok_or_else(|| ParseError {
                line: first_at.0,
                column: first_at.1,
                message: format!("unknown theory `{left}`"),
            })?;
            let ri = b.theory_index(&right).ok_or_else(|| ParseError {
                line: first_at.0,
                column: first_at.1,
                message: format!("unknown theory `{right}`"),
            })?;
            let (lt, rt) = (&b.theories[li], &b.theories[ri]);
            let width = rt.size();
            let mut entries = Vec::new();
            loop {
                cur.expect('(')?;
                let (s, s_at) = cur.word()?;
                cur.expect(',')?;
                let (t, t_at) = cur.word()?;
                cur.expect(')')?;
                cur.arrow()?;
                cur.expect('(')?;
                let (s2, s2_at) = cur.word()?;
                cur.expect(',')?;
                let (t2, t2_at) = cur.word()?;
                cur.expect(')')?;
                let from = resolve(lt, &s, s_at)? * width + resolve(rt, &t, t_at)?;
                let to = resolve(lt, &s2, s2_at)? * width + resolve(rt, &t2, t2_at)?;
                entries.push((from, to, s_at));
                if !cur.try_eat(',') {
                    break;
                }
            }
            if !cur.done() {
                return Err(cur.error("expected `,` between joint map entries"));
            }
            let label = |k: usize| format!("({},{})", lt.states()[k / width], rt.states()[k % width]);
            let map = total_map(&name, entries, lt.size() * width, label, head_at)?;
            if b.joint_maps.iter().any(|j| j.map.name == name) {
                return Err(lift(FiniteError::DuplicateName(name), head_at));
            }
            b.joint_maps.push(JointMap { left, right, map });
        }
        other => {
            return Err(ParseError {
                line: head_at.0,
                column: head_at.1,
                message: format!("unknown declaration `{other}`"),
            })
        }
    }
    Ok(())
}

/// Parses a theory file. The first theory declared is the file's subject.
pub fn parse_theory(text: &str) -> Result<TheoryFile, ParseError> {
    let mut b = Builder { theories: Vec::new(), joint_maps: Vec::new() };
    for line in logical_lines(text) {
        parse_line(&mut b, &line)?;
    }
    if b.theories.is_empty() {
        return Err(ParseError { line: 1, column: 1, message: "no `theory` declaration".into() });
    }
    if let Some(t) = b.theories.iter().find(|t| t.states.is_empty()) {
        return Err(ParseError { line: 1, column: 1, message: format!("theory `{}` declares no states", t.name()) });
    }
    Ok(TheoryFile { theories: b.theories, joint_maps: b.joint_maps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bit() {
        let f = parse_theory(super::super::BIT_CT).unwrap();
        let t = f.primary();
        assert_eq!(t.name(), "bit");
        assert_eq!(t.size(), 2);
        assert_eq!(t.generators()[0].images, vec![1, 0]);
        assert_eq!(f.joint_maps().len(), 1);
        assert_eq!(f.joint_maps()[0].map.images, vec![0, 1, 3, 2]);
    }

    #[test]
    fn parses_spekkens() {
        let f = parse_theory(super::super::SPEKKENS_CT).unwrap();
        let t = f.primary();
        assert_eq!(t.size(), 4);
        assert_eq!(t.monoid_closure().len(), 24);
        assert_eq!(t.variables().len(), 2);
    }

    #[test]
    fn unicode_arrow_and_compact_product() {
        let f = parse_theory("theory b\nstates: 0 1\nmap not: 0→1, 1→0\njoint map sw on bxb: (0,0)→(0,0), (0,1)→(1,0), (1,0)→(0,1), (1,1)→(1,1)\n").unwrap();
        assert_eq!(f.joint_maps()[0].map.images, vec![0, 2, 1, 3]);
    }

    #[test]
    fn missing_state_is_named() {
        let err = parse_theory("theory b\nstates: 0 1 2\nmap f: 0->1, 1->0\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("state `2`"), "{err}");
    }

    #[test]
    fn undeclared_state_has_location() {
        let err = parse_theory("theory b\nstates: 0 1\nmap f: 0->1, 7->0\n").unwrap_err();
        assert_eq!((err.line, err.column), (3, 14));
        assert!(err.message.contains("undeclared state `7`"));
    }

    #[test]
    fn syntax_error_location() {
        let err = parse_theory("theory b\nstates: 0 1\nmap f 0->1\n").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("expected `:`"), "{err}");
        let err = parse_theory("theory b\nstates: 0 1\nfrobnicate\n").unwrap_err();
        assert_eq!((err.line, err.column), (3, 1));
    }

    #[test]
    fn continuation_lines() {
        let text = "theory b\nstates: 0 1\nmap not: 0->1,\n   1->0\n";
        let f = parse_theory(text).unwrap();
        assert_eq!(f.primary().generators()[0].images, vec![1, 0]);
        let err = parse_theory("theory b\nstates: 0 1\nmap not: 0->1,\n   1->9\n").unwrap_err();
        assert_eq!((err.line, err.column), (4, 7));
    }

    #[test]
    fn duplicate_left_entry() {
        let err = parse_theory("theory b\nstates: 0 1\nmap f: 0->1, 0->0\n").unwrap_err();
        assert!(err.message.contains("twice"));
    }

    #[test]
    fn empty_file() {
        assert!(parse_theory("# nothing\n").is_err());
    }
}
