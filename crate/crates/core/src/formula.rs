//! LTLf formula trees and their text syntax.
//!
//! Syntax: atoms by name, `!` (not), `&` (and), `|` (or), `X` (next), `F` (future),
//! `U` (until) and parentheses. Binding strength, tightest first: `! X F`, then `U`
//! (right-associative), then `&`, then `|` (both left-associative).

use std::fmt;

use crate::error::FormulaError;
use crate::trace::{is_identifier, Alphabet};

/// Connective tags, in the order the enumerator tries them within a cost level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Op {
    Atom,
    Not,
    Next,
    Future,
    And,
    Until,
    Or,
}

impl Op {
    pub const NON_ATOMIC: [Op; 6] = [Op::Not, Op::Next, Op::Future, Op::And, Op::Until, Op::Or];

    pub fn arity(self) -> usize {
        match self {
            Op::Atom => 0,
            Op::Not | Op::Next | Op::Future => 1,
            Op::And | Op::Until | Op::Or => 2,
        }
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, Op::And | Op::Or)
    }

    /// Name used by the `--ops` flag.
    pub fn name(self) -> &'static str {
        match self {
            Op::Atom => "atom",
            Op::Not => "not",
            Op::Next => "next",
            Op::Future => "future",
            Op::And => "and",
            Op::Until => "until",
            Op::Or => "or",
        }
    }

    pub fn from_name(name: &str) -> Option<Op> {
        Op::NON_ATOMIC.into_iter().find(|op| op.name() == name)
    }
}

/// Non-atomic connectives available to the enumerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OpSet(u8);

impl OpSet {
    pub const EMPTY: OpSet = OpSet(0);

    /// The core grammar: `! & X F U`, without `|`.
    pub fn standard() -> Self {
        [Op::Not, Op::Next, Op::Future, Op::And, Op::Until].into_iter().collect()
    }

    pub fn all() -> Self {
        Op::NON_ATOMIC.into_iter().collect()
    }

    pub fn contains(self, op: Op) -> bool {
        self.0 >> (op as u8) & 1 == 1
    }

    pub fn with(self, op: Op) -> Self {
        OpSet(self.0 | 1 << (op as u8))
    }

    pub fn without(self, op: Op) -> Self {
        OpSet(self.0 & !(1 << (op as u8)))
    }

    /// Members in enumeration order.
    pub fn iter(self) -> impl Iterator<Item = Op> {
        Op::NON_ATOMIC.into_iter().filter(move |&op| self.contains(op))
    }

    pub fn names(self) -> Vec<&'static str> {
        self.iter().map(Op::name).collect()
    }

    /// Parses a comma-separated list such as `not,and,until`.
    pub fn parse(list: &str) -> Result<Self, String> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|name| Op::from_name(name).ok_or_else(|| format!("unknown operator `{name}`")))
            .collect()
    }
}

impl Default for OpSet {
    fn default() -> Self {
        Self::standard()
    }
}

impl FromIterator<Op> for OpSet {
    fn from_iter<I: IntoIterator<Item = Op>>(iter: I) -> Self {
        iter.into_iter().fold(OpSet::EMPTY, OpSet::with)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Future(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(p: usize) -> Self {
        Formula::Atom(p)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn future(f: Formula) -> Self {
        Formula::Future(Box::new(f))
    }

    pub fn until(l: Formula, r: Formula) -> Self {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn op(&self) -> Op {
        match self {
            Formula::Atom(_) => Op::Atom,
            Formula::Not(_) => Op::Not,
            Formula::And(..) => Op::And,
            Formula::Or(..) => Op::Or,
            Formula::Next(_) => Op::Next,
            Formula::Future(_) => Op::Future,
            Formula::Until(..) => Op::Until,
        }
    }

    /// Node count.
    pub fn cost(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Next(f) | Formula::Future(f) => 1 + f.cost(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) => {
                1 + l.cost() + r.cost()
            }
        }
    }

    /// Largest atom index mentioned, if any atom is.
    pub fn max_atom(&self) -> usize {
        match self {
            Formula::Atom(p) => *p,
            Formula::Not(f) | Formula::Next(f) | Formula::Future(f) => f.max_atom(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(l, r) => {
                l.max_atom().max(r.max_atom())
            }
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> Display<'a> {
        Display { formula: self, alphabet }
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        self.display(alphabet).to_string()
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Formula, FormulaError> {
        let tokens = lex(text)?;
        let mut parser = Parser { tokens, pos: 0, alphabet, end: text.len() };
        let f = parser.or()?;
        match parser.peek() {
            None => Ok(f),
            Some(tok) => Err(FormulaError {
                offset: tok.offset,
                message: format!("unexpected `{}`", tok.kind),
            }),
        }
    }
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        Formula::Until(..) => 3,
        _ => 4,
    }
}

pub struct Display<'a> {
    formula: &'a Formula,
    alphabet: &'a Alphabet,
}

impl Display<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &Formula, wrap: bool) -> fmt::Result {
        if wrap {
            f.write_str("(")?;
        }
        match node {
            Formula::Atom(p) => match self.alphabet.names().get(*p) {
                Some(name) => f.write_str(name)?,
                None => write!(f, "p{p}")?,
            },
            Formula::Not(c) => {
                f.write_str("!")?;
                self.write(f, c, precedence(c) < 4)?;
            }
            Formula::Next(c) | Formula::Future(c) => {
                f.write_str(if matches!(node, Formula::Next(_)) { "X" } else { "F" })?;
                let paren = precedence(c) < 4;
                if !paren {
                    f.write_str(" ")?;
                }
                self.write(f, c, paren)?;
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                let own = precedence(node);
                self.write(f, l, precedence(l) < own)?;
                f.write_str(if own == 2 { " & " } else { " | " })?;
                self.write(f, r, precedence(r) <= own)?;
            }
            Formula::Until(l, r) => {
                self.write(f, l, precedence(l) <= 3)?;
                f.write_str(" U ")?;
                self.write(f, r, precedence(r) < 3)?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula, false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    Bang,
    Amp,
    Bar,
    LParen,
    RParen,
    Next,
    Future,
    Until,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => f.write_str(s),
            TokenKind::Bang => f.write_str("!"),
            TokenKind::Amp => f.write_str("&"),
            TokenKind::Bar => f.write_str("|"),
            TokenKind::LParen => f.write_str("("),
            TokenKind::RParen => f.write_str(")"),
            TokenKind::Next => f.write_str("X"),
            TokenKind::Future => f.write_str("F"),
            TokenKind::Until => f.write_str("U"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, FormulaError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => TokenKind::Bang,
            b'&' => TokenKind::Amp,
            b'|' => TokenKind::Bar,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                debug_assert!(is_identifier(word));
                let kind = match word {
                    "X" => TokenKind::Next,
                    "F" => TokenKind::Future,
                    "U" => TokenKind::Until,
                    _ => TokenKind::Ident(word.to_string()),
                };
                tokens.push(Token { kind, offset: start });
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(FormulaError { offset: i, message: format!("unexpected character `{ch}`") });
            }
        };
        tokens.push(Token { kind, offset: i });
        i += 1;
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    alphabet: &'a Alphabet,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error_here(&self, expected: &str) -> FormulaError {
        match self.peek() {
            Some(tok) => FormulaError {
                offset: tok.offset,
                message: format!("expected {expected}, found `{}`", tok.kind),
            },
            None => FormulaError {
                offset: self.end,
                message: format!("expected {expected}, found end of input"),
            },
        }
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while self.eat(&TokenKind::Bar) {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.until()?;
        while self.eat(&TokenKind::Amp) {
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.unary()?;
        if self.eat(&TokenKind::Until) {
            return Ok(Formula::until(lhs, self.until()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error_here("a formula"));
        };
        match tok.kind {
            TokenKind::Bang => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            TokenKind::Next => {
                self.pos += 1;
                Ok(Formula::next(self.unary()?))
            }
            TokenKind::Future => {
                self.pos += 1;
                Ok(Formula::future(self.unary()?))
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.or()?;
                if !self.eat(&TokenKind::RParen) {
                    return Err(self.error_here("`)`"));
                }
                Ok(inner)
            }
            TokenKind::Ident(ref name) => match self.alphabet.index_of(name) {
                Some(p) => {
                    self.pos += 1;
                    Ok(Formula::Atom(p))
                }
                None => Err(FormulaError {
                    offset: tok.offset,
                    message: format!("unknown proposition `{name}`"),
                }),
            },
            _ => Err(self.error_here("a formula")),
        }
    }
}
