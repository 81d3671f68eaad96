//! Recursive-descent parser for phase expressions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?        right-associative
//! primary := number | constant | variable | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! so `-t^2` is `-(t^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;

use thiserror::Error;

use super::expr::{BinOp, Func, Node};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    InvalidNumber(String),
    UnknownIdentifier(String),
    ArityMismatch {
        func: String,
        expected: usize,
        found: usize,
    },
    InvalidVariableName(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::EmptyInput => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token `{t}`"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number `{s}`"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            ParseErrorKind::ArityMismatch {
                func,
                expected,
                found,
            } => write!(f, "`{func}` takes {expected} argument(s), got {found}"),
            ParseErrorKind::InvalidVariableName(s) => {
                write!(f, "`{s}` cannot be used as the variable name")
            }
        }
    }
}

/// Parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Plus => f.write_str("+"),
            Tok::Minus => f.write_str("-"),
            Tok::Star => f.write_str("*"),
            Tok::Slash => f.write_str("/"),
            Tok::Caret => f.write_str("^"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::Comma => f.write_str(","),
        }
    }
}

fn err(kind: ParseErrorKind, offset: usize) -> ParseError {
    ParseError { kind, offset }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b',' => out.push((Tok::Comma, start)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // Exponent part: e or E, optional sign, at least one digit.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let s = &text[start..i];
                let v: f64 = s
                    .parse()
                    .map_err(|_| err(ParseErrorKind::InvalidNumber(s.to_string()), start))?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(err(ParseErrorKind::UnexpectedChar(ch), start));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    var: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.bump() {
            Some((t, _)) if t == want => Ok(()),
            Some((t, o)) => Err(err(ParseErrorKind::UnexpectedToken(t.to_string()), o)),
            None => Err(err(ParseErrorKind::UnexpectedEnd, self.end)),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(match inner {
                Node::Const(c) => Node::Const(-c),
                other => Node::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(base.pow(exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let Some((tok, off)) = self.bump() else {
            return Err(err(ParseErrorKind::UnexpectedEnd, self.end));
        };
        match tok {
            Tok::Num(v) => Ok(Node::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(name, off),
            other => Err(err(ParseErrorKind::UnexpectedToken(other.to_string()), off)),
        }
    }

    fn identifier(&mut self, name: String, off: usize) -> Result<Node, ParseError> {
        let is_call = matches!(self.peek(), Some(Tok::LParen));
        if !is_call {
            if name == self.var {
                return Ok(Node::Var);
            }
            return match name.as_str() {
                "pi" => Ok(Node::Const(std::f64::consts::PI)),
                "e" => Ok(Node::Const(std::f64::consts::E)),
                _ if Func::from_name(&name).is_some() => Err(err(
                    ParseErrorKind::ArityMismatch {
                        func: name,
                        expected: 1,
                        found: 0,
                    },
                    off,
                )),
                _ => Err(err(ParseErrorKind::UnknownIdentifier(name), off)),
            };
        }
        let Some(func) = Func::from_name(&name) else {
            return Err(err(ParseErrorKind::UnknownIdentifier(name), off));
        };
        self.pos += 1; // '('
        let mut args = Vec::new();
        if !matches!(self.peek(), Some(Tok::RParen)) {
            args.push(self.expr()?);
            while let Some(Tok::Comma) = self.peek() {
                self.pos += 1;
                args.push(self.expr()?);
            }
        }
        self.expect(Tok::RParen)?;
        if args.len() != 1 {
            return Err(err(
                ParseErrorKind::ArityMismatch {
                    func: name,
                    expected: 1,
                    found: args.len(),
                },
                off,
            ));
        }
        Ok(Node::Call(func, Box::new(args.pop().unwrap())))
    }
}

fn valid_variable(name: &str) -> bool {
    let mut chars = name.chars();
    let first_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    first_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "pi"
        && name != "e"
        && Func::from_name(name).is_none()
}

pub fn parse(text: &str, variable: &str) -> Result<Node, ParseError> {
    if !valid_variable(variable) {
        return Err(err(
            ParseErrorKind::InvalidVariableName(variable.to_string()),
            0,
        ));
    }
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(err(ParseErrorKind::EmptyInput, 0));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        var: variable,
    };
    let node = p.expr()?;
    if let Some((t, o)) = p.bump() {
        return Err(err(ParseErrorKind::UnexpectedToken(t.to_string()), o));
    }
    Ok(node)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(s: &str, t: f64) -> f64 {
        parse(s, "t").unwrap().eval(t, "t").unwrap()
    }

    fn kind(s: &str) -> (ParseErrorKind, usize) {
        let e = parse(s, "t").unwrap_err();
        (e.kind, e.offset)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(value("1 + 2*3", 0.0), 7.0);
        assert_eq!(value("(1 + 2)*3", 0.0), 9.0);
        assert_eq!(value("-t^2", 3.0), -9.0);
        assert_eq!(value("2^3^2", 0.0), 512.0);
        assert_eq!(value("8/4/2", 0.0), 1.0);
        assert_eq!(value("10 - 4 - 3", 0.0), 3.0);
        assert_eq!(value("2*-t", 3.0), -6.0);
        assert_eq!(value("--t", 3.0), 3.0);
    }

    #[test]
    fn numbers_and_constants() {
        assert_eq!(value("1e-3", 0.0), 1e-3);
        assert_eq!(value("2.5E+2", 0.0), 250.0);
        assert_eq!(value(".5", 0.0), 0.5);
        assert_eq!(value("pi", 0.0), std::f64::consts::PI);
        assert_eq!(value("e", 0.0), std::f64::consts::E);
        assert_eq!(value("  t\t*\n2 ", 1.5), 3.0);
    }

    #[test]
    fn custom_variable_name() {
        let n = parse("x^2 + 1", "x").unwrap();
        assert_eq!(n.eval(2.0, "x").unwrap(), 5.0);
        assert!(matches!(
            parse("x", "sin").unwrap_err().kind,
            ParseErrorKind::InvalidVariableName(_)
        ));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        assert_eq!(kind(""), (ParseErrorKind::EmptyInput, 0));
        assert_eq!(kind("   "), (ParseErrorKind::EmptyInput, 0));
        assert_eq!(kind("1 +"), (ParseErrorKind::UnexpectedEnd, 3));
        assert_eq!(kind("2 $ 3"), (ParseErrorKind::UnexpectedChar('$'), 2));
        assert_eq!(kind("(t + 1"), (ParseErrorKind::UnexpectedEnd, 6));
        assert_eq!(
            kind("t t"),
            (ParseErrorKind::UnexpectedToken("t".into()), 2)
        );
        assert_eq!(
            kind("1..2"),
            (ParseErrorKind::InvalidNumber("1..2".into()), 0)
        );
    }

    #[test]
    fn unknown_identifiers() {
        assert_eq!(
            kind("3*x"),
            (ParseErrorKind::UnknownIdentifier("x".into()), 2)
        );
        assert_eq!(
            kind("cosh(t)"),
            (ParseErrorKind::UnknownIdentifier("cosh".into()), 0)
        );
    }

    #[test]
    fn arity_mismatch() {
        let two = ParseErrorKind::ArityMismatch {
            func: "sin".into(),
            expected: 1,
            found: 2,
        };
        assert_eq!(kind("1 + sin(t, 2)"), (two, 4));
        assert!(matches!(
            kind("exp()").0,
            ParseErrorKind::ArityMismatch { found: 0, .. }
        ));
        assert!(matches!(
            kind("sqrt + 1").0,
            ParseErrorKind::ArityMismatch { found: 0, .. }
        ));
    }
}
