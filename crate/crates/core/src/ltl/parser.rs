//! Recursive-descent parser for the textual LTL syntax.
//!
//! Precedence, tightest first: `! X F G` (and `[]`, `<>`), then `U R W`
//! (right-associative), then `&`, then `|`, then `->` (right-associative).

use std::collections::BTreeSet;

use thiserror::Error;

use super::formula::{BinaryOp, Formula, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: unexpected {found}, expected one of: {}", expected.join(", "))]
    Syntax { line: usize, column: usize, found: String, expected: Vec<String> },
    #[error("{line}:{column}: unknown operator `{text}`")]
    UnknownOperator { line: usize, column: usize, text: String },
    #[error("{line}:{column}: variable `{name}` is not in the declared vocabulary")]
    UndeclaredVariable { line: usize, column: usize, name: String },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions<'a> {
    /// When set, identifiers outside this set are rejected.
    pub vocabulary: Option<&'a BTreeSet<String>>,
    /// Rewrite `a -> b` into `!a | b` while parsing.
    pub desugar_implication: bool,
}

pub const KEYWORDS: [&str; 8] = ["true", "false", "X", "F", "G", "U", "R", "W"];

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Unary(UnaryOp),
    Binary(BinaryOp),
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Unary(op) => format!("`{}`", op.symbol()),
            Tok::Binary(op) => format!("`{}`", op.symbol()),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

const OPERATOR_CHARS: &str = "&|-<>[]=~^%$#@*/+:;,.?'\"\\`{}";

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    let fixed: [(&str, Tok); 10] = [
        ("&&", Tok::Binary(BinaryOp::And)),
        ("||", Tok::Binary(BinaryOp::Or)),
        ("->", Tok::Binary(BinaryOp::Implies)),
        ("[]", Tok::Unary(UnaryOp::Globally)),
        ("<>", Tok::Unary(UnaryOp::Finally)),
        ("&", Tok::Binary(BinaryOp::And)),
        ("|", Tok::Binary(BinaryOp::Or)),
        ("!", Tok::Unary(UnaryOp::Not)),
        ("(", Tok::LParen),
        (")", Tok::RParen),
    ];
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let (start_line, start_col) = (line, column);
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            column += i - start;
            let tok = match word.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "X" => Tok::Unary(UnaryOp::Next),
                "F" => Tok::Unary(UnaryOp::Finally),
                "G" => Tok::Unary(UnaryOp::Globally),
                "U" => Tok::Binary(BinaryOp::Until),
                "R" => Tok::Binary(BinaryOp::Release),
                "W" => Tok::Binary(BinaryOp::WeakUntil),
                _ => Tok::Ident(word),
            };
            out.push(Spanned { tok, line: start_line, column: start_col });
            continue;
        }
        if c == '(' || c == ')' || c == '!' {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => Tok::Unary(UnaryOp::Not),
            };
            i += 1;
            column += 1;
            out.push(Spanned { tok, line: start_line, column: start_col });
            continue;
        }
        // A run of operator characters must split exactly into known operators,
        // so `<->` is rejected as a whole instead of lexing as `<` + `->`.
        let run_len = chars[i..].iter().take_while(|c| OPERATOR_CHARS.contains(**c)).count().max(1);
        let run: String = chars[i..i + run_len].iter().collect();
        let mut rest = run.as_str();
        let mut pieces = Vec::new();
        while !rest.is_empty() {
            match fixed.iter().find(|(s, _)| rest.starts_with(s)) {
                Some((s, tok)) => {
                    pieces.push((tok.clone(), column + (run.len() - rest.len())));
                    rest = &rest[s.len()..];
                }
                None => {
                    return Err(ParseError::UnknownOperator { line: start_line, column: start_col, text: run });
                }
            }
        }
        for (tok, col) in pieces {
            out.push(Spanned { tok, line: start_line, column: col });
        }
        i += run_len;
        column += run_len;
    }
    out.push(Spanned { tok: Tok::Eof, line, column });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    opts: ParseOptions<'a>,
}

const ATOM_START: [&str; 6] = ["identifier", "`true`", "`false`", "`(`", "unary operator", "`[]`/`<>`"];

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::Syntax {
            line: t.line,
            column: t.column,
            found: t.tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Binary(BinaryOp::Implies) {
            self.bump();
            let right = self.implication()?;
            if self.opts.desugar_implication {
                return Ok(left.not().or(right));
            }
            return Ok(left.implies(right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while *self.peek() == Tok::Binary(BinaryOp::Or) {
            self.bump();
            left = left.or(self.conjunction()?);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.temporal()?;
        while *self.peek() == Tok::Binary(BinaryOp::And) {
            self.bump();
            left = left.and(self.temporal()?);
        }
        Ok(left)
    }

    fn temporal(&mut self) -> Result<Formula, ParseError> {
        let left = self.unary()?;
        match *self.peek() {
            Tok::Binary(op @ (BinaryOp::Until | BinaryOp::Release | BinaryOp::WeakUntil)) => {
                self.bump();
                let right = self.temporal()?;
                Ok(Formula::binary(op, left, right))
            }
            _ => Ok(left),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if let Tok::Unary(op) = *self.peek() {
            self.bump();
            return Ok(Formula::unary(op, self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::True => {
                self.bump();
                Ok(Formula::tt())
            }
            Tok::False => {
                self.bump();
                Ok(Formula::ff())
            }
            Tok::Ident(name) => {
                let t = self.bump();
                if let Some(vocab) = self.opts.vocabulary {
                    if !vocab.contains(&name) {
                        return Err(ParseError::UndeclaredVariable { line: t.line, column: t.column, name });
                    }
                }
                Ok(Formula::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`", "binary operator"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(&ATOM_START)),
        }
    }
}

pub fn parse_with(text: &str, opts: ParseOptions<'_>) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, opts };
    let f = p.implication()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["binary operator", "end of input"]));
    }
    Ok(f)
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, ParseOptions::default())
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
