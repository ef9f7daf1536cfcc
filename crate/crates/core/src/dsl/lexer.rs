use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{ParseError, ParseErrorKind};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Token {
    Number { value: f64, integral: bool },
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

impl Token {
    pub(crate) fn describe(&self) -> String {
        match self {
            Token::Number { value, .. } => value.to_string(),
            Token::Ident(name) => name.clone(),
            Token::Plus => "+".into(),
            Token::Minus => "-".into(),
            Token::Star => "*".into(),
            Token::Slash => "/".into(),
            Token::Caret => "^".into(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
            Token::Comma => ",".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Spanned {
    pub token: Token,
    pub position: usize,
}

pub(crate) fn tokenize(source: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            b',' => Some(Token::Comma),
            _ => None,
        };
        if let Some(token) = single {
            tokens.push(Spanned { token, position: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            let (token, end) = lex_number(source, start)?;
            tokens.push(Spanned { token, position: start });
            i = end;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push(Spanned { token: Token::Ident(source[start..i].into()), position: start });
        } else {
            let ch = source[start..].chars().next().unwrap_or('?');
            return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(ch), position: start });
        }
    }
    Ok(tokens)
}

fn lex_number(source: &str, start: usize) -> Result<(Token, usize), ParseError> {
    let bytes = source.as_bytes();
    let mut i = start;
    let mut integral = true;
    let digits = |i: &mut usize| {
        let from = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - from
    };
    let mut mantissa_digits = digits(&mut i);
    if i < bytes.len() && bytes[i] == b'.' {
        integral = false;
        i += 1;
        mantissa_digits += digits(&mut i);
    }
    let invalid = |end: usize| ParseError {
        kind: ParseErrorKind::InvalidNumber(source[start..end].into()),
        position: start,
    };
    if mantissa_digits == 0 {
        return Err(invalid(i));
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        integral = false;
        i += 1;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        if digits(&mut i) == 0 {
            return Err(invalid(i));
        }
    }
    let value: f64 = source[start..i].parse().map_err(|_| invalid(i))?;
    if !value.is_finite() {
        return Err(invalid(i));
    }
    Ok((Token::Number { value, integral }, i))
}
