//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := iff
//! iff     := imp ("<->" imp)*          left-assoc
//! imp     := or ("->" imp)?            right-assoc
//! or      := and ("|" and)*            left-assoc
//! and     := unary ("&" unary)*        left-assoc
//! unary   := ("~" | "box" | "[]" | "dia" | "<>") unary | atom
//! atom    := "false" | "true" | ident | "(" formula ")"
//! ident   := [a-z][a-z0-9_]*
//! ```
//!
//! `□ ◇ ¬ ∧ ∨ → ↔ ⊥ ⊤` are accepted as aliases.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;

/// Nesting bound; deeper input is rejected rather than risking the stack.
pub const MAX_NESTING: usize = 1024;

const RED_ZONE: usize = 64 * 1024;
const STACK_CHUNK: usize = 1024 * 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{column}: unknown token {found:?}")]
    UnknownToken {
        line: usize,
        column: usize,
        found: String,
    },
    #[error("{line}:{column}: syntax error at {found}, expected one of: {}", expected.join(", "))]
    Syntax {
        line: usize,
        column: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("{line}:{column}: identifier {name:?} is reserved for generated variables")]
    Reserved {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("{line}:{column}: nesting deeper than {MAX_NESTING}")]
    TooDeep { line: usize, column: usize },
    #[error("{line}:{column}: reference #{index} is not defined")]
    UnknownRef { line: usize, column: usize, index: usize },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::UnknownToken { line, column, .. }
            | ParseError::Syntax { line, column, .. }
            | ParseError::Reserved { line, column, .. }
            | ParseError::TooDeep { line, column }
            | ParseError::UnknownRef { line, column, .. } => (*line, *column),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    False,
    True,
    Box,
    Dia,
    Not,
    And,
    Or,
    Imp,
    Iff,
    LParen,
    RParen,
    Ident(String),
    Ref(usize),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::False => f.write_str("\"false\""),
            Tok::True => f.write_str("\"true\""),
            Tok::Box => f.write_str("\"box\""),
            Tok::Dia => f.write_str("\"dia\""),
            Tok::Not => f.write_str("\"~\""),
            Tok::And => f.write_str("\"&\""),
            Tok::Or => f.write_str("\"|\""),
            Tok::Imp => f.write_str("\"->\""),
            Tok::Iff => f.write_str("\"<->\""),
            Tok::LParen => f.write_str("\"(\""),
            Tok::RParen => f.write_str("\")\""),
            Tok::Ident(s) => write!(f, "identifier {s:?}"),
            Tok::Ref(k) => write!(f, "reference #{k}"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str, allow_reserved: bool, allow_refs: bool) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (sl, sc) = (line, col);
        let mut push = |tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: sl,
                column: sc,
            });
            *i += len;
            *col += len;
        };
        let rest = |k: usize| chars.get(i + k).copied();
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '~' | '¬' => push(Tok::Not, 1, &mut i, &mut col),
            '&' | '∧' => push(Tok::And, 1, &mut i, &mut col),
            '|' | '∨' => push(Tok::Or, 1, &mut i, &mut col),
            '→' => push(Tok::Imp, 1, &mut i, &mut col),
            '↔' => push(Tok::Iff, 1, &mut i, &mut col),
            '□' => push(Tok::Box, 1, &mut i, &mut col),
            '◇' => push(Tok::Dia, 1, &mut i, &mut col),
            '⊥' => push(Tok::False, 1, &mut i, &mut col),
            '⊤' => push(Tok::True, 1, &mut i, &mut col),
            '-' if rest(1) == Some('>') => push(Tok::Imp, 2, &mut i, &mut col),
            '[' if rest(1) == Some(']') => push(Tok::Box, 2, &mut i, &mut col),
            '<' if rest(1) == Some('-') && rest(2) == Some('>') => push(Tok::Iff, 3, &mut i, &mut col),
            '<' if rest(1) == Some('>') => push(Tok::Dia, 2, &mut i, &mut col),
            '#' if allow_refs && rest(1).is_some_and(|d| d.is_ascii_digit()) => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i + 1..j].iter().collect();
                let Ok(k) = digits.parse() else {
                    return Err(ParseError::UnknownToken {
                        line: sl,
                        column: sc,
                        found: chars[i..j.min(i + 8)].iter().collect(),
                    });
                };
                push(Tok::Ref(k), j - i, &mut i, &mut col);
            }
            c if c.is_ascii_lowercase() || c == '_' => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len()
                    && (chars[j].is_ascii_lowercase() || chars[j].is_ascii_digit() || chars[j] == '_')
                {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                if c == '_' && !allow_reserved {
                    return Err(ParseError::Reserved {
                        line: sl,
                        column: sc,
                        name: word,
                    });
                }
                let tok = match word.as_str() {
                    "false" => Tok::False,
                    "true" => Tok::True,
                    "box" => Tok::Box,
                    "dia" => Tok::Dia,
                    _ => Tok::Ident(word),
                };
                push(tok, j - start, &mut i, &mut col);
            }
            _ => {
                let mut j = i + 1;
                while j < chars.len() && !chars[j].is_whitespace() && !chars[j].is_ascii_alphanumeric() {
                    j += 1;
                }
                return Err(ParseError::UnknownToken {
                    line: sl,
                    column: sc,
                    found: chars[i..j.min(i + 8)].iter().collect(),
                });
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'r> {
    refs: &'r [Formula],
    toks: Vec<Spanned>,
    pos: usize,
    depth: usize,
    interned: HashMap<Formula, Formula>,
}

const UNARY_START: [&str; 9] = [
    "\"~\"", "\"box\"", "\"[]\"", "\"dia\"", "\"<>\"", "\"false\"", "\"true\"", "identifier", "\"(\"",
];

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn err(&self, expected: &[&'static str]) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::Syntax {
            line: t.line,
            column: t.column,
            found: t.tok.to_string(),
            expected: expected.to_vec(),
        }
    }

    fn intern(&mut self, f: Formula) -> Formula {
        if let Some(g) = self.interned.get(&f) {
            return g.clone();
        }
        self.interned.insert(f.clone(), f.clone());
        f
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            let t = &self.toks[self.pos];
            return Err(ParseError::TooDeep {
                line: t.line,
                column: t.column,
            });
        }
        Ok(())
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.pos += 1;
            let rhs = self.imp()?;
            let f = Formula::iff(lhs, rhs);
            lhs = self.intern(f);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.imp_inner())
    }

    fn imp_inner(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let lhs = self.or()?;
        let out = if *self.peek() == Tok::Imp {
            self.pos += 1;
            let rhs = self.imp()?;
            let f = Formula::implies(lhs, rhs);
            self.intern(f)
        } else {
            lhs
        };
        self.depth -= 1;
        Ok(out)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.pos += 1;
            let rhs = self.and()?;
            let f = Formula::or(lhs, rhs);
            lhs = self.intern(f);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.pos += 1;
            let rhs = self.unary()?;
            let f = Formula::and(lhs, rhs);
            lhs = self.intern(f);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.unary_inner())
    }

    fn unary_inner(&mut self) -> Result<Formula, ParseError> {
        self.enter()?;
        let out = match self.peek().clone() {
            Tok::Not => {
                self.pos += 1;
                let a = self.unary()?;
                Formula::not(a)
            }
            Tok::Box => {
                self.pos += 1;
                let a = self.unary()?;
                Formula::boxed(a)
            }
            Tok::Dia => {
                self.pos += 1;
                let a = self.unary()?;
                Formula::dia(a)
            }
            Tok::False => {
                self.pos += 1;
                Formula::falsum()
            }
            Tok::True => {
                self.pos += 1;
                Formula::top()
            }
            Tok::Ident(name) => {
                self.pos += 1;
                Formula::var(name)
            }
            Tok::Ref(index) => {
                let t = &self.toks[self.pos];
                let Some(f) = self.refs.get(index) else {
                    return Err(ParseError::UnknownRef {
                        line: t.line,
                        column: t.column,
                        index,
                    });
                };
                self.pos += 1;
                self.depth -= 1;
                return Ok(f.clone());
            }
            Tok::LParen => {
                self.pos += 1;
                let a = self.formula()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.err(&["\")\"", "\"<->\"", "\"->\"", "\"|\"", "\"&\""]));
                }
                self.pos += 1;
                a
            }
            _ => return Err(self.err(&UNARY_START)),
        };
        self.depth -= 1;
        Ok(self.intern(out))
    }
}

fn parse_with(text: &str, allow_reserved: bool, refs: Option<&[Formula]>) -> Result<Formula, ParseError> {
    let toks = lex(text, allow_reserved, refs.is_some())?;
    let mut p = Parser {
        refs: refs.unwrap_or_default(),
        toks,
        pos: 0,
        depth: 0,
        interned: HashMap::new(),
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err(&["end of input", "\"<->\"", "\"->\"", "\"|\"", "\"&\""]));
    }
    Ok(f)
}

/// Parses user-facing formula text. Identifiers starting with `_` are
/// rejected.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, false, None)
}

/// Like [`parse`] but also accepts generated `_`-prefixed variables. Used for
/// certificate and trace files, which may mention them.
pub fn parse_internal(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, true, None)
}

/// Like [`parse_internal`], with `#k` standing for `refs[k]`.
pub(crate) fn parse_with_refs(text: &str, refs: &[Formula]) -> Result<Formula, ParseError> {
    parse_with(text, true, Some(refs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        let p = Formula::var("p");
        assert_eq!(
            parse("box (p -> box box p)").unwrap(),
            Formula::boxed(Formula::implies(p.clone(), Formula::boxed(Formula::boxed(p.clone()))))
        );
        assert_eq!(parse("~p").unwrap(), Formula::implies(p, Formula::falsum()));
    }

    #[test]
    fn syntax_error_points_at_token() {
        match parse("box ->") {
            Err(ParseError::Syntax { line, column, found, expected }) => {
                assert_eq!((line, column), (1, 5));
                assert_eq!(found, "\"->\"");
                assert!(expected.contains(&"identifier"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn associativity() {
        assert_eq!(parse("a -> b -> c").unwrap(), parse("a -> (b -> c)").unwrap());
        assert_eq!(parse("a & b & c").unwrap(), parse("(a & b) & c").unwrap());
        assert_eq!(parse("a <-> b <-> c").unwrap(), parse("(a <-> b) <-> c").unwrap());
        assert_eq!(parse("a | b & c").unwrap(), parse("a | (b & c)").unwrap());
        assert_eq!(parse("~a & b").unwrap(), parse("(~a) & b").unwrap());
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(parse("□(p → ◇q) ↔ ¬⊥ ∧ ⊤ ∨ r").unwrap(),
            parse("box (p -> dia q) <-> ~false & true | r").unwrap());
        assert_eq!(parse("[]<>p").unwrap(), parse("box dia p").unwrap());
    }

    #[test]
    fn reserved_and_unknown() {
        assert!(matches!(parse("_fp0"), Err(ParseError::Reserved { .. })));
        assert_eq!(parse_internal("_fp0").unwrap(), Formula::var("_fp0"));
        assert!(matches!(parse("p $ q"), Err(ParseError::UnknownToken { column: 3, .. })));
        assert!(matches!(parse("P"), Err(ParseError::UnknownToken { .. })));
        assert!(parse("").is_err());
        assert!(parse("(p").is_err());
        assert!(parse("p q").is_err());
    }

    #[test]
    fn references() {
        let refs = [parse("box q").unwrap()];
        assert_eq!(parse_with_refs("#0 -> #0", &refs).unwrap(), parse("box q -> box q").unwrap());
        assert!(matches!(parse_with_refs("#1", &refs), Err(ParseError::UnknownRef { index: 1, .. })));
        assert!(matches!(parse_internal("#0"), Err(ParseError::UnknownToken { .. })));
    }

    #[test]
    fn line_numbers() {
        assert_eq!(parse("p ->\n  )").unwrap_err().position(), (2, 3));
    }

    #[test]
    fn deep_nesting_rejected() {
        let s = "~".repeat(MAX_NESTING + 10) + "p";
        assert!(matches!(parse(&s), Err(ParseError::TooDeep { .. })));
        let s = "(".repeat(MAX_NESTING + 10);
        assert!(parse(&s).is_err());
    }

    #[test]
    fn keywords_need_boundaries() {
        assert_eq!(parse("boxp").unwrap(), Formula::var("boxp"));
        assert_eq!(parse("box(p)").unwrap(), Formula::boxed(Formula::var("p")));
    }
}
