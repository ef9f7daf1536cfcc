//! Recursive-descent parser. Precedence from loosest to tightest:
//! `+ -`, `* /`, unary minus, `^` (integer literal exponent), atoms.

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::ast::{BinOp, Expr, Func};
use super::lexer::{Spanned, Token};
use super::{ParseError, ParseErrorKind};

pub(crate) struct Parser<'a> {
    tokens: &'a [Spanned],
    pos: usize,
    end: usize,
    dimension: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(tokens: &'a [Spanned], source_len: usize, dimension: usize) -> Self {
        Parser { tokens, pos: 0, end: source_len, dimension }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    fn position(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |s| s.position)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { kind, position: self.position() }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(ParseErrorKind::UnexpectedToken { found: t.describe(), expected }),
            None => self.error(ParseErrorKind::UnexpectedEnd { expected }),
        }
    }

    fn expect(&mut self, token: Token, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn at_end(&self) -> bool {
        self.pos == self.tokens.len()
    }

    /// Parses `(e1, ..., en)`; for `n = 1` a bare expression is accepted too.
    pub(crate) fn field(&mut self) -> Result<Vec<Expr>, ParseError> {
        let components = if self.dimension == 1 {
            vec_of(self.expr()?)
        } else {
            let open = self.position();
            self.expect(Token::LParen, "'(' opening the component list")?;
            let mut items = vec_of(self.expr()?);
            while self.peek() == Some(&Token::Comma) {
                self.pos += 1;
                items.push(self.expr()?);
            }
            self.expect(Token::RParen, "',' or ')'")?;
            if items.len() != self.dimension {
                return Err(ParseError {
                    kind: ParseErrorKind::DimensionMismatch { expected: self.dimension, found: items.len() },
                    position: open,
                });
            }
            items
        };
        if !self.at_end() {
            return Err(self.unexpected("end of input"));
        }
        Ok(components)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let exponent_at = self.position();
        let negative = self.peek() == Some(&Token::Minus);
        if negative {
            self.pos += 1;
        }
        match self.peek() {
            Some(Token::Number { value, integral: true }) if *value <= f64::from(i16::MAX) => {
                let k = *value as i32;
                self.pos += 1;
                Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
            }
            _ => Err(ParseError { kind: ParseErrorKind::NonIntegerExponent, position: exponent_at }),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.position();
        match self.peek().cloned() {
            Some(Token::Number { value, .. }) => {
                self.pos += 1;
                Ok(Expr::Num(value))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Token::LParen) {
                    let func = Func::from_name(&name)
                        .ok_or(ParseError { kind: ParseErrorKind::UnknownIdentifier(name.clone()), position: at })?;
                    self.pos += 1;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Token::RParen) {
                        args.push(self.expr()?);
                        while self.peek() == Some(&Token::Comma) {
                            self.pos += 1;
                            args.push(self.expr()?);
                        }
                    }
                    self.expect(Token::RParen, "',' or ')'")?;
                    if args.len() != func.arity() {
                        return Err(ParseError {
                            kind: ParseErrorKind::Arity { name, expected: func.arity(), found: args.len() },
                            position: at,
                        });
                    }
                    Ok(Expr::Call(func, args))
                } else {
                    resolve_variable(&name, self.dimension)
                        .map(Expr::Var)
                        .ok_or(ParseError { kind: ParseErrorKind::UnknownIdentifier(name), position: at })
                }
            }
            _ => Err(self.unexpected("a number, variable, function call or '('")),
        }
    }
}

fn vec_of(e: Expr) -> Vec<Expr> {
    let mut v = Vec::with_capacity(4);
    v.push(e);
    v
}

/// `x1..xn` always; `x, y, z` as aliases when `n ≤ 3`.
pub(crate) fn resolve_variable(name: &str, dimension: usize) -> Option<usize> {
    let alias = match name {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        _ => None,
    };
    if let Some(i) = alias {
        return (dimension <= 3 && i < dimension).then_some(i);
    }
    let digits = name.strip_prefix('x')?;
    if digits.starts_with('0') {
        return None;
    }
    let index: usize = digits.parse().ok()?;
    (index >= 1 && index <= dimension).then(|| index - 1)
}
