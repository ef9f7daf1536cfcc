//! Field definition language.
//!
//! A field on ℝⁿ is written as a component list `(e1, ..., en)`, or as a bare
//! expression when `n = 1`. Expressions support `+ - * /`, unary minus,
//! `^` with an integer literal exponent, decimal and scientific literals,
//! the functions `abs min max sin cos exp sqrt`, and the conditional
//! `ifge(c, a, b)` (`a` if `c ≥ 0`, else `b`). Variables are `x1..xn`, with
//! `x, y, z` as aliases when `n ≤ 3`.
//!
//! ```
//! use flowbox_core::dsl::parse_field;
//!
//! let f = parse_field("(1+abs(y), 0)", 2).unwrap();
//! assert_eq!(f.eval(&[0.0, -0.5]).unwrap(), vec![1.5, 0.0]);
//! ```

mod ast;
mod lexer;
mod parser;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use ast::{BinOp, Display, Expr, Func};

use crate::field::VectorField;

#[derive(Clone, Debug, PartialEq)]
pub enum ParseErrorKind {
    EmptySource,
    UnexpectedChar(char),
    InvalidNumber(String),
    UnexpectedToken { found: String, expected: &'static str },
    UnexpectedEnd { expected: &'static str },
    UnknownIdentifier(String),
    Arity { name: String, expected: usize, found: usize },
    DimensionMismatch { expected: usize, found: usize },
    NonIntegerExponent,
    InvalidDimension,
}

/// Parse failure with the byte offset where it was detected.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: ", self.position)?;
        match &self.kind {
            ParseErrorKind::EmptySource => f.write_str("empty field definition"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number literal {s:?}"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "found {found:?}, expected {expected}")
            }
            ParseErrorKind::UnexpectedEnd { expected } => write!(f, "input ended, expected {expected}"),
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier {name:?}"),
            ParseErrorKind::Arity { name, expected, found } => {
                write!(f, "{name} takes {expected} argument(s), got {found}")
            }
            ParseErrorKind::DimensionMismatch { expected, found } => {
                write!(f, "field needs {expected} components, got {found}")
            }
            ParseErrorKind::NonIntegerExponent => f.write_str("'^' needs an integer literal exponent"),
            ParseErrorKind::InvalidDimension => f.write_str("dimension must be positive"),
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    NegativeSqrt,
    NonFinite,
}

/// Evaluation failure naming the offending subexpression.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub expr: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::NegativeSqrt => "square root of a negative number",
            EvalErrorKind::NonFinite => "non-finite result",
        };
        write!(f, "{what} in `{}`", self.expr)
    }
}

impl core::error::Error for EvalError {}

/// Parsed vector field: one expression per component.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldExpr {
    components: Vec<Expr>,
}

impl FieldExpr {
    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }

    pub fn eval_into(&self, point: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (slot, c) in out.iter_mut().zip(&self.components) {
            *slot = c.eval(point)?;
        }
        Ok(())
    }

    /// Wraps the expression as a field on `B(0, domain_radius)`.
    pub fn into_field(self, label: impl Into<String>, domain_radius: f64) -> VectorField {
        let n = self.dimension();
        VectorField::new(n, label, domain_radius, move |x, out| Ok(self.eval_into(x, out)?))
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dimension();
        if n == 1 {
            return write!(f, "{}", self.components[0].display(1));
        }
        f.write_str("(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", c.display(n))?;
        }
        f.write_str(")")
    }
}

pub fn parse_field(source: &str, dimension: usize) -> Result<FieldExpr, ParseError> {
    if dimension == 0 {
        return Err(ParseError { kind: ParseErrorKind::InvalidDimension, position: 0 });
    }
    if source.trim().is_empty() {
        return Err(ParseError { kind: ParseErrorKind::EmptySource, position: 0 });
    }
    let tokens = lexer::tokenize(source)?;
    let components = parser::Parser::new(&tokens, source.len(), dimension).field()?;
    Ok(FieldExpr { components })
}

/// Name used by the printer for coordinate `index` in dimension `n`.
pub fn variable_name(index: usize, dimension: usize) -> String {
    ast::variable_name(index, dimension).to_string()
}

/// (dimension, source) pairs covering every operator, function and
/// precedence level of the grammar.
pub const SAMPLE_SOURCES: [(usize, &str); 50] = [
    (1, "1"),
    (1, "x"),
    (1, "-x"),
    (1, "1+x^2"),
    (1, "ifge(x-1, 2, 1)"),
    (1, "x*x*x"),
    (1, "(1+x)*(1-x)"),
    (1, "1/(1+x^2)"),
    (1, "2^3"),
    (1, "x^-2"),
    (1, "-x^2"),
    (1, "(-x)^2"),
    (1, "--x"),
    (1, "1-(2-3)"),
    (1, "1-2-3"),
    (1, "8/4/2"),
    (1, "8/(4/2)"),
    (1, "sin(x)^2+cos(x)^2"),
    (1, "exp(-x^2/2)"),
    (1, "sqrt(abs(x))"),
    (1, "min(x, 1)"),
    (1, "max(min(x, 1), -1)"),
    (1, "ifge(x, x, -x)"),
    (1, "1.5e-3*x"),
    (1, "2.5E2+x"),
    (1, "0.125"),
    (1, "x1"),
    (1, "abs(x-0.5)*3"),
    (1, "ifge(sin(x), 1, ifge(cos(x), 2, 3))"),
    (1, "(x)"),
    (2, "(1+abs(y), 0)"),
    (2, "(1, y)"),
    (2, "(1, 0)"),
    (2, "(x1, x2)"),
    (2, "(-y, x)"),
    (2, "(x*y, x-y)"),
    (2, "(exp(x)*cos(y), exp(x)*sin(y))"),
    (2, "(1+0.1*sin(x*y), 0.2*y)"),
    (2, "(max(x, y), min(x, y))"),
    (2, "(sqrt(1+x^2+y^2), ifge(y, 1, -1))"),
    (2, "(x^3-3*x*y^2, 3*x^2*y-y^3)"),
    (2, "((x+y)/(1+x^2), -(x-y))"),
    (3, "(1, z, -y)"),
    (3, "(x+y+z, x*y*z, 1)"),
    (3, "(y*z, -x*z, 0.5)"),
    (3, "(abs(x)+abs(y)+abs(z), 1, 1)"),
    (4, "(x1, x2, x3, x4)"),
    (4, "(1, x1*x4, -x3, sin(x2))"),
    (5, "(1, 1, 1, 1, x5)"),
    (2, "(2*(x+1)^2, y/2/3)"),
];

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn roundtrip(src: &str, n: usize) {
        let a = parse_field(src, n).unwrap();
        let printed = format!("{a}");
        let b = parse_field(&printed, n).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert_eq!(a, b, "{src} -> {printed}");
    }

    #[test]
    fn abs_shear_source_evaluates() {
        let f = parse_field("(1+abs(y), 0)", 2).unwrap();
        assert_eq!(f.dimension(), 2);
        assert_eq!(f.eval(&[0.0, -0.5]).unwrap(), vec![1.5, 0.0]);
        let v = f.eval(&[0.05, 0.02]).unwrap();
        assert!((v[0] - 1.02).abs() < 1e-15 && v[1] == 0.0);
    }

    #[test]
    fn one_dimensional_forms() {
        assert_eq!(parse_field("1+x^2", 1).unwrap().eval(&[2.0]).unwrap(), vec![5.0]);
        let step = parse_field("ifge(x-1, 2, 1)", 1).unwrap();
        assert_eq!(step.eval(&[1.0]).unwrap(), vec![2.0]);
        assert_eq!(step.eval(&[0.999]).unwrap(), vec![1.0]);
        assert_eq!(parse_field("(1, y)", 2).unwrap().eval(&[0.3, 2.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn precedence_and_associativity() {
        let e = |s: &str| parse_field(s, 1).unwrap().eval(&[3.0]).unwrap()[0];
        assert_eq!(e("1+2*x"), 7.0);
        assert_eq!(e("-x^2"), -9.0);
        assert_eq!(e("(-x)^2"), 9.0);
        assert_eq!(e("x-1-1"), 1.0);
        assert_eq!(e("x/3/3"), 1.0 / 3.0);
        assert_eq!(e("2^-1"), 0.5);
        assert_eq!(e("min(x, 2) + max(x, 2)"), 5.0);
    }

    #[test]
    fn division_by_zero_names_subexpression() {
        let f = parse_field("x/0", 1).unwrap();
        let err = f.eval(&[1.0]).unwrap_err();
        assert_eq!(err.kind, EvalErrorKind::DivisionByZero);
        assert_eq!(err.expr, "x/0");
        let g = parse_field("sqrt(x-5)", 1).unwrap();
        assert_eq!(g.eval(&[1.0]).unwrap_err().kind, EvalErrorKind::NegativeSqrt);
        // Only the selected branch of ifge is evaluated.
        let h = parse_field("ifge(x, 1, 1/0)", 1).unwrap();
        assert_eq!(h.eval(&[1.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn structured_errors() {
        let kind = |s: &str, n: usize| parse_field(s, n).unwrap_err();
        assert_eq!(kind("", 1).kind, ParseErrorKind::EmptySource);
        assert_eq!(
            kind("(1, w)", 2),
            ParseError { kind: ParseErrorKind::UnknownIdentifier("w".into()), position: 4 }
        );
        assert_eq!(kind("(1, z)", 2).kind, ParseErrorKind::UnknownIdentifier("z".into()));
        assert_eq!(kind("(x5, 1, 1, 1)", 4).kind, ParseErrorKind::UnknownIdentifier("x5".into()));
        assert!(matches!(kind("min(x)", 1).kind, ParseErrorKind::Arity { expected: 2, found: 1, .. }));
        assert!(matches!(kind("(1, 2, 3)", 2).kind, ParseErrorKind::DimensionMismatch { expected: 2, found: 3 }));
        assert_eq!(kind("x^1.5", 1).kind, ParseErrorKind::NonIntegerExponent);
        assert_eq!(kind("(x^y, 1)", 2).kind, ParseErrorKind::NonIntegerExponent);
        assert!(matches!(kind("(1+x", 1).kind, ParseErrorKind::UnexpectedEnd { .. }));
        assert!(matches!(kind("1 2", 1).kind, ParseErrorKind::UnexpectedToken { .. }));
        assert!(matches!(kind("foo(x)", 1).kind, ParseErrorKind::UnknownIdentifier(_)));
        assert!(matches!(kind("1, 2", 2).kind, ParseErrorKind::UnexpectedToken { .. }));
    }

    #[test]
    fn printing_roundtrips() {
        for (src, n) in [
            ("(1+abs(y), 0)", 2),
            ("-(x-1)^3", 1),
            ("x-(1-x)", 1),
            ("x/(2*x)", 1),
            ("--x", 1),
            ("1e-7*x^-2", 1),
            ("(x1, x2+x3, x4*x1, sin(x2))", 4),
            ("ifge(x-1, 2, 1)", 1),
        ] {
            roundtrip(src, n);
        }
    }

    #[test]
    fn high_dimensional_names() {
        assert_eq!(variable_name(3, 5), "x4");
        assert_eq!(variable_name(1, 3), "y");
        assert!(parse_field("(x1, y)", 2).is_ok());
        assert!(parse_field("(x1, x2, x3, y)", 4).is_err());
    }
}
