//! Tokenizer and expression parser shared by formula and program parsing.

use thiserror::Error;

use crate::formula::{BoolExpr, CmpOp, IntExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

// longest symbols first so that maximal munch works by prefix test
const SYMBOLS: &[&str] = &[
    "->", ":=", "..", "||", "&&", "==", "!=", "<=", ">=", ";", ":", "{", "}", ",", "(", ")", "!",
    "=", "<", ">", "+", "-", "*",
];

pub(crate) fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("");
        let mut rest = text;
        while let Some(c) = rest.chars().next() {
            if c.is_whitespace() {
                rest = &rest[c.len_utf8()..];
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let end = rest
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .unwrap_or(rest.len());
                out.push((Tok::Ident(rest[..end].to_string()), line));
                rest = &rest[end..];
                continue;
            }
            if c.is_ascii_digit() {
                let end = rest
                    .find(|ch: char| !ch.is_ascii_digit())
                    .unwrap_or(rest.len());
                let n = rest[..end].parse().map_err(|_| ParseError {
                    line,
                    message: format!("integer literal `{}` out of range", &rest[..end]),
                })?;
                out.push((Tok::Int(n), line));
                rest = &rest[end..];
                continue;
            }
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    out.push((Tok::Sym(s), line));
                    rest = &rest[s.len()..];
                }
                None => {
                    return Err(ParseError {
                        line,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
    }
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| t.1)
            .unwrap_or(1)
    }

    pub fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: self.line(),
            message: message.into(),
        })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(t)) if t == kw)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    pub fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected("identifier"),
        }
    }

    /// Optionally signed integer literal.
    pub fn int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat_sym("-");
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            _ => self.unexpected("integer"),
        }
    }

    pub fn int_expr(&mut self) -> Result<IntExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_sym("+") {
                lhs = IntExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_sym("-") {
                lhs = IntExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<IntExpr, ParseError> {
        let mut lhs = self.factor()?;
        while self.eat_sym("*") {
            lhs = IntExpr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<IntExpr, ParseError> {
        if self.eat_sym("-") {
            return Ok(IntExpr::Neg(Box::new(self.factor()?)));
        }
        if self.eat_sym("(") {
            let e = self.int_expr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        match self.bump() {
            Some(Tok::Int(n)) => Ok(IntExpr::Const(n)),
            Some(Tok::Ident(s)) if s == "true" || s == "false" => {
                self.pos -= 1;
                self.error(format!("boolean `{s}` used as an integer"))
            }
            Some(Tok::Ident(s)) => Ok(IntExpr::var(&s)),
            _ => {
                self.pos -= 1;
                self.unexpected("integer expression")
            }
        }
    }

    pub fn bool_expr(&mut self) -> Result<BoolExpr, ParseError> {
        let mut parts = vec![self.conj()?];
        while self.eat_sym("||") {
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            BoolExpr::Or(parts)
        })
    }

    fn conj(&mut self) -> Result<BoolExpr, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.eat_sym("&&") {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            BoolExpr::And(parts)
        })
    }

    fn unary(&mut self) -> Result<BoolExpr, ParseError> {
        if self.eat_sym("!") {
            return Ok(BoolExpr::Not(Box::new(self.unary()?)));
        }
        if self.is_keyword("true") || self.is_keyword("false") {
            let b = self.is_keyword("true");
            self.pos += 1;
            return Ok(BoolExpr::Const(b));
        }
        if self.is_sym("(") {
            // `(` opens either a nested boolean or an arithmetic operand
            let save = self.pos;
            self.pos += 1;
            if let Ok(inner) = self.bool_expr() {
                if self.eat_sym(")") && self.cmp_op().is_none() && !self.arith_follows() {
                    return Ok(inner);
                }
            }
            self.pos = save;
        }
        let lhs = self.int_expr()?;
        let Some(op) = self.cmp_op() else {
            return self.unexpected("comparison operator");
        };
        self.pos += 1;
        let rhs = self.int_expr()?;
        Ok(BoolExpr::Cmp(lhs, op, rhs))
    }

    fn arith_follows(&self) -> bool {
        self.is_sym("+") || self.is_sym("-") || self.is_sym("*")
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        match self.peek() {
            Some(Tok::Sym(s)) => match *s {
                "=" | "==" => Some(CmpOp::Eq),
                "!=" => Some(CmpOp::Ne),
                "<" => Some(CmpOp::Lt),
                "<=" => Some(CmpOp::Le),
                ">" => Some(CmpOp::Gt),
                ">=" => Some(CmpOp::Ge),
                _ => None,
            },
            _ => None,
        }
    }

    /// True when the next two tokens are `ident ->`, used to detect transitions.
    pub fn ident_then(&self, sym: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_)))
            && matches!(self.peek_at(1), Some(Tok::Sym(s)) if *s == sym)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_comments_and_symbols() {
        let toks = lex("x := y+1; # trailing\nq0 -> q1").unwrap();
        assert_eq!(toks.len(), 9);
        assert_eq!(toks[1].0, Tok::Sym(":="));
        assert_eq!(toks[6].1, 2);
    }

    #[test]
    fn parenthesized_arithmetic_is_not_boolean() {
        let mut p = Parser::new("(x + 1) * 2 < y").unwrap();
        let e = p.bool_expr().unwrap();
        assert!(matches!(e, BoolExpr::Cmp(_, CmpOp::Lt, _)));
        assert!(p.at_end());
    }

    #[test]
    fn nested_boolean_groups() {
        let mut p = Parser::new("!(a = 1 || (b = 0)) && c >= 2").unwrap();
        let e = p.bool_expr().unwrap();
        assert!(matches!(e, BoolExpr::And(ref v) if v.len() == 2));
    }

    #[test]
    fn reports_line_numbers() {
        let err = lex("x\n  $").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
