//! The value universe: hereditarily finite lists over a finite atom alphabet.
//!
//! An [`HElement`] is either an atom or a finite ordered list of elements.
//! Lists share their children through an `Arc`, so cloning is cheap and
//! values can be handed across threads freely.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::SyntaxError;

/// Name of the reserved atom that encodes "undefined".
pub const FALSE_ATOM: &str = "false";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Arc<str>);

impl Atom {
    /// Builds an atom, validating `[a-z][a-z0-9_]*`.
    pub fn new(name: &str) -> Result<Atom, SyntaxError> {
        if is_atom_name(name) {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(SyntaxError::new(0, format!("invalid atom name `{name}`")))
        }
    }

    pub fn false_atom() -> Atom {
        Atom(Arc::from(FALSE_ATOM))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_false(&self) -> bool {
        &*self.0 == FALSE_ATOM
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}

/// A hereditarily finite list value.
///
/// The derived ordering puts atoms before lists, orders atoms by name and
/// lists lexicographically by their children.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HElement {
    Atom(Atom),
    List(Arc<[HElement]>),
}

/// The pair of measures every bound is stated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeRank {
    pub size: u64,
    pub rank: u64,
}

impl HElement {
    pub fn atom(name: &str) -> Result<HElement, SyntaxError> {
        Atom::new(name).map(HElement::Atom)
    }

    pub fn list<I: IntoIterator<Item = HElement>>(children: I) -> HElement {
        HElement::List(children.into_iter().collect())
    }

    pub fn empty() -> HElement {
        HElement::List(Arc::from(Vec::new()))
    }

    pub fn false_value() -> HElement {
        HElement::Atom(Atom::false_atom())
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, HElement::Atom(_))
    }

    pub fn is_list(&self) -> bool {
        matches!(self, HElement::List(_))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, HElement::Atom(a) if a.is_false())
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            HElement::Atom(a) => Some(a),
            HElement::List(_) => None,
        }
    }

    /// Children of a list in order; atoms have none.
    pub fn components(&self) -> &[HElement] {
        match self {
            HElement::Atom(_) => &[],
            HElement::List(children) => children,
        }
    }

    /// Node count: every atom and every list node costs one.
    pub fn size(&self) -> u64 {
        match self {
            HElement::Atom(_) => 1,
            HElement::List(children) => 1 + children.iter().map(HElement::size).sum::<u64>(),
        }
    }

    /// Nesting depth: atoms have rank 0, a list is one deeper than its deepest child.
    pub fn rank(&self) -> u64 {
        match self {
            HElement::Atom(_) => 0,
            HElement::List(children) => 1 + children.iter().map(HElement::rank).max().unwrap_or(0),
        }
    }

    pub fn size_rank(&self) -> SizeRank {
        match self {
            HElement::Atom(_) => SizeRank { size: 1, rank: 0 },
            HElement::List(children) => {
                let (size, rank) = children.iter().fold((1, 0), |(s, r), c| {
                    let sr = c.size_rank();
                    (s + sr.size, r.max(sr.rank))
                });
                SizeRank { size, rank: rank + 1 }
            }
        }
    }

    /// Visits every atom occurring in the element.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            match e {
                HElement::Atom(a) => out.push(a),
                HElement::List(children) => stack.extend(children.iter()),
            }
        }
        out
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for HElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HElement::Atom(a) => f.write_str(a.as_str()),
            HElement::List(children) => {
                f.write_str("<")?;
                for (n, c) in children.iter().enumerate() {
                    if n > 0 {
                        f.write_str(",")?;
                    }
                    fmt::Display::fmt(c, f)?;
                }
                f.write_str(">")
            }
        }
    }
}

impl fmt::Debug for HElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses without checking atoms against an alphabet.
impl FromStr for HElement {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cursor = Cursor::new(s);
        let e = cursor.element()?;
        cursor.finish()?;
        Ok(e)
    }
}

/// The declared atom set. Always contains `false`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    atoms: BTreeSet<Atom>,
}

impl Alphabet {
    pub fn new<'a, I: IntoIterator<Item = &'a str>>(names: I) -> Result<Alphabet, SyntaxError> {
        let mut atoms = BTreeSet::new();
        atoms.insert(Atom::false_atom());
        for name in names {
            atoms.insert(Atom::new(name)?);
        }
        Ok(Alphabet { atoms })
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    /// The alphabet minus the reserved `false` atom, in name order.
    pub fn proper_atoms(&self) -> Vec<Atom> {
        self.atoms.iter().filter(|a| !a.is_false()).cloned().collect()
    }

    pub fn admits(&self, e: &HElement) -> Result<(), Atom> {
        match e.atoms().into_iter().find(|a| !self.contains(a)) {
            Some(a) => Err(a.clone()),
            None => Ok(()),
        }
    }
}

/// Parses `text` and checks every atom against `alphabet`.
pub fn parse_element(text: &str, alphabet: &Alphabet) -> Result<HElement, SyntaxError> {
    let e: HElement = text.parse()?;
    alphabet
        .admits(&e)
        .map_err(|a| SyntaxError::new(0, format!("unknown atom `{a}`")))?;
    Ok(e)
}

pub fn render_element(e: &HElement) -> String {
    e.to_string()
}

/// Byte cursor shared by the element and term parsers.
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.pos, msg.into())
    }

    /// `[a-z][a-z0-9_]*`
    pub(crate) fn ident(&mut self) -> Result<&'a str, SyntaxError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .take_while(|&(n, c)| {
                if n == 0 {
                    c.is_ascii_lowercase()
                } else {
                    matches!(c, 'a'..='z' | '0'..='9' | '_')
                }
            })
            .count();
        if len == 0 {
            return Err(self.error("expected identifier"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    pub(crate) fn element(&mut self) -> Result<HElement, SyntaxError> {
        match self.peek() {
            Some('<') => {
                self.pos += 1;
                let mut children = Vec::new();
                if !self.eat('>') {
                    loop {
                        children.push(self.element()?);
                        if self.eat(',') {
                            continue;
                        }
                        self.expect('>')?;
                        break;
                    }
                }
                Ok(HElement::list(children))
            }
            Some(c) if c.is_ascii_lowercase() => {
                let name = self.ident()?;
                Ok(HElement::Atom(Atom(Arc::from(name))))
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    pub(crate) fn finish(&mut self) -> Result<(), SyntaxError> {
        self.skip_ws();
        if self.pos == self.src.len() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }
}
