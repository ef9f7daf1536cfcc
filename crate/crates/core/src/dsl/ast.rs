use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use super::{EvalError, EvalErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Abs,
    Min,
    Max,
    Sin,
    Cos,
    Exp,
    Sqrt,
    /// `ifge(c, a, b)` is `a` when `c ≥ 0`, else `b`.
    Ifge,
}

impl Func {
    pub const ALL: [Func; 8] =
        [Func::Abs, Func::Min, Func::Max, Func::Sin, Func::Cos, Func::Exp, Func::Sqrt, Func::Ifge];

    pub fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Ifge => "ifge",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            Func::Ifge => 3,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Zero-based coordinate index.
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power; the exponent is always a literal.
    Pow(Box<Expr>, i32),
    Call(Func, Vec<Expr>),
}

const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => PREC_NEG,
            Expr::Pow(..) => PREC_POW,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => PREC_ATOM,
        }
    }

    /// Printer resolving variables with the naming scheme of `dimension`.
    pub fn display(&self, dimension: usize) -> Display<'_> {
        Display { expr: self, dimension }
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        let fail = |kind| EvalError { kind, expr: self.display(point.len()).to_string() };
        let value = match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => point[*i],
            Expr::Neg(e) => -e.eval(point)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval(point)?;
                let b = r.eval(point)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(fail(EvalErrorKind::DivisionByZero));
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(base, k) => {
                let b = base.eval(point)?;
                if b == 0.0 && *k < 0 {
                    return Err(fail(EvalErrorKind::DivisionByZero));
                }
                libm::pow(b, f64::from(*k))
            }
            Expr::Call(func, args) => match func {
                Func::Ifge => {
                    if args[0].eval(point)? >= 0.0 {
                        args[1].eval(point)?
                    } else {
                        args[2].eval(point)?
                    }
                }
                Func::Min => libm::fmin(args[0].eval(point)?, args[1].eval(point)?),
                Func::Max => libm::fmax(args[0].eval(point)?, args[1].eval(point)?),
                Func::Abs => libm::fabs(args[0].eval(point)?),
                Func::Sin => libm::sin(args[0].eval(point)?),
                Func::Cos => libm::cos(args[0].eval(point)?),
                Func::Exp => libm::exp(args[0].eval(point)?),
                Func::Sqrt => {
                    let a = args[0].eval(point)?;
                    if a < 0.0 {
                        return Err(fail(EvalErrorKind::NegativeSqrt));
                    }
                    libm::sqrt(a)
                }
            },
        };
        if !value.is_finite() {
            return Err(fail(EvalErrorKind::NonFinite));
        }
        Ok(value)
    }
}

pub struct Display<'a> {
    expr: &'a Expr,
    dimension: usize,
}

impl Display<'_> {
    fn child<'b>(&self, expr: &'b Expr) -> Display<'b> {
        Display { expr, dimension: self.dimension }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, expr: &Expr, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({})", self.child(expr))
        } else {
            write!(f, "{}", self.child(expr))
        }
    }
}

pub(crate) fn variable_name(index: usize, dimension: usize) -> alloc::string::String {
    if dimension <= 3 {
        ["x", "y", "z"][index].into()
    } else {
        alloc::format!("x{}", index + 1)
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => f.write_str(&variable_name(*i, self.dimension)),
            Expr::Neg(e) => {
                f.write_str("-")?;
                self.write_operand(f, e, e.precedence() < PREC_NEG)
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                self.write_operand(f, l, l.precedence() < p)?;
                f.write_str(op.symbol())?;
                self.write_operand(f, r, r.precedence() <= p)
            }
            Expr::Pow(base, k) => {
                self.write_operand(f, base, base.precedence() < PREC_ATOM)?;
                write!(f, "^{k}")
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", self.child(a))?;
                }
                f.write_str(")")
            }
        }
    }
}
