//! A small expression language for theta-function expressions.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | factor
//! factor   := base ('^' exponent)?
//! exponent := '-'? base
//! base     := number | imag | ident | ident ('in' | 'notin') ident
//!           | call | '(' expr ')'
//! call     := name '(' args ')'
//! number   := digits ('.' digits)?      imag := number 'i'
//! ident    := letter (letter | digit)* ('_' (digits | letter (letter | digit)*))?
//! ```
//!
//! Calls: `theta(e)`, `tpoch(e; n)`, `qpoch(e; k)`, `sum(h, e)`, `prod(h, e)`
//! and `sumsubsets(I, n, r, e)`, where a head `h` is `k = a..b` or
//! `i in I` / `i notin I`. `tpoch` and `qpoch` use the bound `q`; the
//! complement in `notin` is taken in `1..n` of the enclosing `sumsubsets`.
//! A rational literal `a/b` is the quotient of two integer literals.
//! Exponents must evaluate to integers, so index variables may appear in
//! them.

mod eval;
mod parse;

use std::fmt;

pub use eval::{eval, Env, EvalError, Value};
pub use parse::{parse, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Subscript of an identifier such as `x_2` or `x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sub {
    Index(usize),
    Var(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Head {
    Range { var: String, lo: Box<Expr>, hi: Box<Expr> },
    Member { var: String, set: String, negated: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Real literal, kept as written.
    Num(String),
    /// Imaginary literal `bi`, `b` kept as written.
    Imag(String),
    Var { name: String, sub: Option<Sub> },
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    /// `1` when `var` lies in `set`, else `0` (reversed when negated).
    Member { var: String, set: String, negated: bool },
    Theta(Box<Expr>),
    TPoch(Box<Expr>, Box<Expr>),
    QPoch(Box<Expr>, Box<Expr>),
    Sum(Head, Box<Expr>),
    Prod(Head, Box<Expr>),
    SumSubsets { set: String, n: Box<Expr>, r: Box<Expr>, body: Box<Expr> },
}

/// Names with fixed arity, for error messages.
pub(crate) const FUNCTIONS: &[(&str, usize)] = &[
    ("theta", 1),
    ("tpoch", 2),
    ("qpoch", 2),
    ("sum", 2),
    ("prod", 2),
    ("sumsubsets", 4),
];

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

struct Wrapped<'a>(&'a Expr, bool);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Head::Range { var, lo, hi } => write!(f, "{var} = {lo}..{hi}"),
            Head::Member { var, set, negated } => {
                write!(f, "{var} {} {set}", if *negated { "notin" } else { "in" })
            }
        }
    }
}

/// Pretty printing with the fewest parentheses that parse back to the same
/// tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(s) => write!(f, "{s}"),
            Expr::Imag(s) => write!(f, "{s}i"),
            Expr::Var { name, sub: None } => write!(f, "{name}"),
            Expr::Var { name, sub: Some(Sub::Index(k)) } => write!(f, "{name}_{k}"),
            Expr::Var { name, sub: Some(Sub::Var(v)) } => write!(f, "{name}_{v}"),
            Expr::Neg(e) => write!(f, "-{}", Wrapped(e, prec(e) < 3)),
            Expr::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => (" + ", 1),
                    BinOp::Sub => (" - ", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                };
                // left-associative: the right operand needs parentheses at
                // equal precedence
                write!(f, "{}{sym}{}", Wrapped(a, prec(a) < p), Wrapped(b, prec(b) <= p))
            }
            Expr::Pow(a, b) => write!(f, "{}^{}", Wrapped(a, prec(a) < 5), Wrapped(b, prec(b) < 5)),
            Expr::Member { var, set, negated } => {
                write!(f, "({var} {} {set})", if *negated { "notin" } else { "in" })
            }
            Expr::Theta(e) => write!(f, "theta({e})"),
            Expr::TPoch(a, n) => write!(f, "tpoch({a}; {n})"),
            Expr::QPoch(a, k) => write!(f, "qpoch({a}; {k})"),
            Expr::Sum(h, e) => write!(f, "sum({h}, {e})"),
            Expr::Prod(h, e) => write!(f, "prod({h}, {e})"),
            Expr::SumSubsets { set, n, r, body } => write!(f, "sumsubsets({set}, {n}, {r}, {body})"),
        }
    }
}
