use std::collections::BTreeMap;

use num_complex::Complex64;
use theta_forge::thetaids::subsets;
use theta_forge::thetanum::{NumError, Numeric, ThetaContext, ThetaField};

use super::{BinOp, Expr, Head, Sub};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(Complex64),
    /// Read through subscripts, `x_1` being the first entry.
    Vector(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound identifier `{0}`")]
    Unbound(String),
    #[error("`{0}` is a vector; use a subscript")]
    NeedsSubscript(String),
    #[error("`{0}` is not a vector")]
    NotVector(String),
    #[error("subscript {index} out of range for `{name}` of length {len}")]
    OutOfRange { name: String, index: i64, len: usize },
    #[error("{what} must be an integer, got {value}")]
    NotInteger { what: &'static str, value: Complex64 },
    #[error("unknown set `{0}`")]
    UnknownSet(String),
    #[error("{0}")]
    Num(#[from] NumError),
}

/// Parameter bindings.
#[derive(Debug, Clone, Default)]
pub struct Env {
    vars: BTreeMap<String, Value>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn scalar(mut self, name: &str, z: Complex64) -> Self {
        self.bind(name, Value::Scalar(z));
        self
    }

    pub fn vector(mut self, name: &str, v: Vec<Complex64>) -> Self {
        self.bind(name, Value::Vector(v));
        self
    }

    pub fn bind(&mut self, name: &str, v: Value) {
        self.vars.insert(name.to_string(), v);
    }
}

struct Set {
    name: String,
    members: Vec<usize>,
    n: usize,
}

struct Scope<'a> {
    env: &'a Env,
    f: Numeric,
    basic: Numeric,
    locals: Vec<(String, Complex64)>,
    sets: Vec<Set>,
}

/// Evaluates `e` with theta functions at the nome of `ctx`.
pub fn eval(e: &Expr, env: &Env, ctx: ThetaContext) -> Result<Complex64, EvalError> {
    let mut s = Scope {
        env,
        f: Numeric::new(ctx),
        basic: Numeric::new(ThetaContext::trivial()),
        locals: Vec::new(),
        sets: Vec::new(),
    };
    s.eval(e)
}

fn integer(what: &'static str, z: Complex64) -> Result<i64, EvalError> {
    let r = z.re.round();
    if z.im.abs() > 1e-9 || (z.re - r).abs() > 1e-9 || r.abs() > 1e12 {
        return Err(EvalError::NotInteger { what, value: z });
    }
    Ok(r as i64)
}

impl Scope<'_> {
    fn local(&self, name: &str) -> Option<Complex64> {
        self.locals.iter().rev().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    fn lookup(&self, name: &str) -> Result<Value, EvalError> {
        if let Some(z) = self.local(name) {
            return Ok(Value::Scalar(z));
        }
        self.env.vars.get(name).cloned().ok_or_else(|| EvalError::Unbound(name.to_string()))
    }

    fn set(&self, name: &str) -> Result<&Set, EvalError> {
        self.sets
            .iter()
            .rev()
            .find(|s| s.name == name)
            .ok_or_else(|| EvalError::UnknownSet(name.to_string()))
    }

    fn q(&self) -> Result<Complex64, EvalError> {
        match self.lookup("q")? {
            Value::Scalar(z) => Ok(z),
            Value::Vector(_) => Err(EvalError::NeedsSubscript("q".into())),
        }
    }

    fn var(&self, name: &str, sub: &Option<Sub>) -> Result<Complex64, EvalError> {
        match (self.lookup(name)?, sub) {
            (Value::Scalar(z), None) => Ok(z),
            (Value::Vector(_), None) => Err(EvalError::NeedsSubscript(name.to_string())),
            (Value::Scalar(_), Some(_)) => Err(EvalError::NotVector(name.to_string())),
            (Value::Vector(v), Some(sub)) => {
                let k = match sub {
                    Sub::Index(k) => *k as i64,
                    Sub::Var(i) => integer("subscript", self.var(i, &None)?)?,
                };
                if k < 1 || k as usize > v.len() {
                    return Err(EvalError::OutOfRange {
                        name: name.to_string(),
                        index: k,
                        len: v.len(),
                    });
                }
                Ok(v[k as usize - 1])
            }
        }
    }

    /// Index values a head ranges over.
    fn head_values(&mut self, h: &Head) -> Result<(String, Vec<i64>), EvalError> {
        match h {
            Head::Range { var, lo, hi } => {
                let lo = integer("range bound", self.eval(lo)?)?;
                let hi = integer("range bound", self.eval(hi)?)?;
                Ok((var.clone(), (lo..=hi).collect()))
            }
            Head::Member { var, set, negated } => {
                let s = self.set(set)?;
                let vals = (1..=s.n)
                    .filter(|i| s.members.contains(i) != *negated)
                    .map(|i| i as i64)
                    .collect();
                Ok((var.clone(), vals))
            }
        }
    }

    fn fold(&mut self, h: &Head, body: &Expr, product: bool) -> Result<Complex64, EvalError> {
        let (var, vals) = self.head_values(h)?;
        let mut acc = if product { self.f.one() } else { self.f.int(0) };
        for k in vals {
            self.locals.push((var.clone(), Complex64::new(k as f64, 0.0)));
            let v = self.eval(body);
            self.locals.pop();
            let v = v?;
            acc = if product { acc * v } else { acc + v };
        }
        Ok(acc)
    }

    fn eval(&mut self, e: &Expr) -> Result<Complex64, EvalError> {
        Ok(match e {
            Expr::Num(s) => Complex64::new(s.parse().expect("lexer checked the digits"), 0.0),
            Expr::Imag(s) => Complex64::new(0.0, s.parse().expect("lexer checked the digits")),
            Expr::Var { name, sub } => self.var(name, sub)?,
            Expr::Neg(a) => -self.eval(a)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => self.f.div(&a, &b)?,
                }
            }
            Expr::Pow(a, k) => {
                let a = self.eval(a)?;
                let k = integer("exponent", self.eval(k)?)?;
                self.f.pow(&a, k)?
            }
            Expr::Member { var, set, negated } => {
                let i = integer("index", self.var(var, &None)?)?;
                let inside = i >= 1 && self.set(set)?.members.contains(&(i as usize));
                Complex64::new(if inside != *negated { 1.0 } else { 0.0 }, 0.0)
            }
            Expr::Theta(a) => {
                let a = self.eval(a)?;
                self.f.theta(&a)?
            }
            Expr::TPoch(a, n) => {
                let (a, q) = (self.eval(a)?, self.q()?);
                let n = integer("tpoch length", self.eval(n)?)?;
                self.f.poch(&a, &q, n)?
            }
            Expr::QPoch(a, k) => {
                let (a, q) = (self.eval(a)?, self.q()?);
                let k = integer("qpoch length", self.eval(k)?)?;
                self.basic.poch(&a, &q, k)?
            }
            Expr::Sum(h, body) => self.fold(h, body, false)?,
            Expr::Prod(h, body) => self.fold(h, body, true)?,
            Expr::SumSubsets { set, n, r, body } => {
                let n = integer("subset universe", self.eval(n)?)?.max(0) as usize;
                let r = integer("subset size", self.eval(r)?)?;
                let mut acc = Complex64::new(0.0, 0.0);
                if r < 0 {
                    return Ok(acc);
                }
                for members in subsets(n, r as usize) {
                    self.sets.push(Set {
                        name: set.clone(),
                        members: members.iter().map(|i| i + 1).collect(),
                        n,
                    });
                    let v = self.eval(body);
                    self.sets.pop();
                    acc += v?;
                }
                acc
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn run(src: &str, env: &Env, p: f64) -> Result<Complex64, EvalError> {
        let ctx = if p == 0.0 {
            ThetaContext::trivial()
        } else {
            ThetaContext::new(c(p, 0.0)).unwrap()
        };
        eval(&parse(src).unwrap(), env, ctx)
    }

    #[test]
    fn theta_inversion() {
        let env = Env::new().scalar("x", c(2.0, 1.0));
        assert!(run("theta(x)+x*theta(1/x)", &env, 0.3).unwrap().norm() < 1e-12);
    }

    #[test]
    fn subset_sum_of_products() {
        let env = Env::new().vector("x", vec![c(2.0, 0.0), c(3.0, 0.0)]);
        let v = run("sumsubsets(I,2,1, prod(i in I, x_i))", &env, 0.0).unwrap();
        assert_eq!(v, c(5.0, 0.0));
        let v = run("sumsubsets(I,2,1, prod(i notin I, x_i))", &env, 0.0).unwrap();
        assert_eq!(v, c(5.0, 0.0));
        let v = run("sumsubsets(I,2,1, sum(j = 1..2, (j in I)*x_j))", &env, 0.0).unwrap();
        assert_eq!(v, c(5.0, 0.0));
    }

    #[test]
    fn pochhammer_at_one_vanishes() {
        let env = Env::new().scalar("q", c(0.4, 0.2));
        assert_eq!(run("qpoch(1;3)", &env, 0.0).unwrap(), c(0.0, 0.0));
        assert_eq!(run("qpoch(a;0)", &env.clone().scalar("a", c(3.0, 0.0)), 0.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn index_variables_shadow_parameters() {
        let env = Env::new().scalar("k", c(100.0, 0.0));
        assert_eq!(run("sum(k = 1..3, k) + k", &env, 0.0).unwrap(), c(106.0, 0.0));
        assert_eq!(run("sum(k = 1..0, k)", &env, 0.0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn evaluation_errors() {
        let env = Env::new().vector("x", vec![c(1.0, 0.0)]);
        assert_eq!(run("y", &env, 0.0), Err(EvalError::Unbound("y".into())));
        assert!(matches!(run("x_2", &env, 0.0), Err(EvalError::OutOfRange { .. })));
        assert!(matches!(run("x", &env, 0.0), Err(EvalError::NeedsSubscript(_))));
        assert!(matches!(run("2^(1/2)", &env, 0.0), Err(EvalError::NotInteger { .. })));
        assert!(matches!(run("1/0", &env, 0.0), Err(EvalError::Num(_))));
        assert!(matches!(run("prod(i in I, 2)", &env, 0.0), Err(EvalError::UnknownSet(_))));
    }

    #[test]
    fn quasi_periodicity() {
        let env = Env::new().scalar("z", c(0.7, 0.4)).scalar("p", c(0.3, 0.0));
        assert!(run("theta(z) + z*theta(p*z)", &env, 0.3).unwrap().norm() < 1e-12);
    }
}
