use std::fmt;

use super::{BinOp, Expr, Head, Sub, FUNCTIONS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Imag(String),
    Ident(String),
    Sym(&'static str),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(s) => write!(f, "number `{s}`"),
            Tok::Imag(s) => write!(f, "number `{s}i`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: &[&str] = &["..", "+", "-", "*", "/", "^", "(", ")", ",", ";", "="];

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = (line, col);
        let begin = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            // a '.' starts a fraction only when a digit follows, so `0..n`
            // lexes as a range
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[begin..i].iter().collect();
            if i < chars.len() && chars[i] == 'i' && !chars.get(i + 1).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
                i += 1;
                Tok::Imag(text)
            } else {
                Tok::Num(text)
            }
        } else if c.is_alphabetic() {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[begin..i].iter().collect())
        } else if let Some(s) = SYMBOLS.iter().find(|s| chars[i..].starts_with(&s.chars().collect::<Vec<_>>())) {
            i += s.len();
            Tok::Sym(s)
        } else {
            return Err(ParseError {
                line,
                col,
                msg: format!("unexpected character `{c}`"),
            });
        };
        col += i - begin;
        out.push(Spanned {
            tok,
            line: start.0,
            col: start.1,
        });
    }
    out.push(Spanned { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

/// Parses one expression; see the module docs for the grammar.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(e)
}

fn split_ident(s: &str) -> Result<(String, Option<Sub>), String> {
    let Some((name, sub)) = s.split_once('_') else {
        return Ok((s.to_string(), None));
    };
    if name.is_empty() || sub.is_empty() || sub.contains('_') {
        return Err(format!("malformed subscript in `{s}`"));
    }
    if sub.chars().all(|c| c.is_ascii_digit()) {
        let k = sub.parse().map_err(|_| format!("subscript too large in `{s}`"))?;
        Ok((name.to_string(), Some(Sub::Index(k))))
    } else if sub.starts_with(|c: char| c.is_alphabetic()) {
        Ok((name.to_string(), Some(Sub::Var(sub.to_string()))))
    } else {
        Err(format!("malformed subscript in `{s}`"))
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: String) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            col: s.col,
            msg,
        }
    }

    fn unexpected(&self, want: &str) -> ParseError {
        self.err_here(format!("expected {want}, found {}", self.peek()))
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{sym}`")))
        }
    }

    fn plain_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !s.contains('_') && !is_keyword(&s) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat("+") {
                BinOp::Add
            } else if self.eat("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat("*") {
                BinOp::Mul
            } else if self.eat("/") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.base()?;
        if self.eat("^") {
            let exp = if self.eat("-") {
                Expr::Neg(Box::new(self.base()?))
            } else {
                self.base()?
            };
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let at = self.pos;
        match self.next() {
            Tok::Num(s) => Ok(Expr::Num(s)),
            Tok::Imag(s) => Ok(Expr::Imag(s)),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(s) if self.eat("(") => self.call(&s, at),
            Tok::Ident(s) if is_keyword(&s) => {
                self.pos = at;
                Err(self.unexpected("expression"))
            }
            Tok::Ident(s) => {
                let (name, sub) = split_ident(&s).map_err(|m| {
                    self.pos = at;
                    self.err_here(m)
                })?;
                if let Some(negated) = self.membership() {
                    if sub.is_some() {
                        self.pos = at;
                        return Err(self.err_here("a membership test needs a plain index variable".into()));
                    }
                    let set = self.plain_ident("set name")?;
                    return Ok(Expr::Member { var: name, set, negated });
                }
                Ok(Expr::Var { name, sub })
            }
            _ => {
                self.pos = at;
                Err(self.unexpected("expression"))
            }
        }
    }

    fn membership(&mut self) -> Option<bool> {
        match self.peek() {
            Tok::Ident(s) if s == "in" => {
                self.pos += 1;
                Some(false)
            }
            Tok::Ident(s) if s == "notin" => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }

    /// Arguments separated by `,` or `;`; `at` points at the name.
    fn call(&mut self, name: &str, at: usize) -> Result<Expr, ParseError> {
        let Some(&(_, arity)) = FUNCTIONS.iter().find(|(n, _)| *n == name) else {
            self.pos = at;
            return Err(self.err_here(format!("unknown function `{name}`")));
        };
        let e = match name {
            "theta" => Expr::Theta(Box::new(self.expr()?)),
            "tpoch" | "qpoch" => {
                let a = self.expr()?;
                self.separator(name, at, arity)?;
                let n = self.expr()?;
                if name == "tpoch" {
                    Expr::TPoch(Box::new(a), Box::new(n))
                } else {
                    Expr::QPoch(Box::new(a), Box::new(n))
                }
            }
            "sum" | "prod" => {
                let h = self.head()?;
                self.separator(name, at, arity)?;
                let body = Box::new(self.expr()?);
                if name == "sum" {
                    Expr::Sum(h, body)
                } else {
                    Expr::Prod(h, body)
                }
            }
            _ => {
                let set = self.plain_ident("set name")?;
                self.separator(name, at, arity)?;
                let n = Box::new(self.expr()?);
                self.separator(name, at, arity)?;
                let r = Box::new(self.expr()?);
                self.separator(name, at, arity)?;
                let body = Box::new(self.expr()?);
                Expr::SumSubsets { set, n, r, body }
            }
        };
        if !self.eat(")") {
            if matches!(self.peek(), Tok::Sym("," | ";")) {
                let here = self.pos;
                self.pos = at;
                let err = self.err_here(format!("`{name}` takes {arity} argument(s), got more"));
                self.pos = here;
                return Err(err);
            }
            return Err(self.unexpected("`)`"));
        }
        Ok(e)
    }

    fn separator(&mut self, name: &str, at: usize, arity: usize) -> Result<(), ParseError> {
        if self.eat(",") || self.eat(";") {
            return Ok(());
        }
        if self.peek() == &Tok::Sym(")") {
            self.pos = at;
            return Err(self.err_here(format!("`{name}` takes {arity} argument(s), got fewer")));
        }
        Err(self.unexpected("`,` or `;`"))
    }

    fn head(&mut self) -> Result<Head, ParseError> {
        let var = self.plain_ident("index variable")?;
        if let Some(negated) = self.membership() {
            let set = self.plain_ident("set name")?;
            return Ok(Head::Member { var, set, negated });
        }
        self.expect("=")?;
        let lo = Box::new(self.expr()?);
        self.expect("..")?;
        let hi = Box::new(self.expr()?);
        Ok(Head::Range { var, lo, hi })
    }
}

fn is_keyword(s: &str) -> bool {
    s == "in" || s == "notin"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse("a + b*c^2").unwrap();
        assert_eq!(e.to_string(), "a + b*c^2");
        let e = parse("(a + b)*c").unwrap();
        assert!(matches!(e, Expr::Bin(BinOp::Mul, ..)));
        assert_eq!(parse("a - (b - c)").unwrap().to_string(), "a - (b - c)");
        assert_eq!(parse("a - b - c").unwrap().to_string(), "a - b - c");
        assert_eq!(parse("q^-r").unwrap().to_string(), "q^(-r)");
    }

    #[test]
    fn theta_inversion_has_two_terms() {
        let e = parse("theta(x) + x*theta(1/x)").unwrap();
        assert!(matches!(e, Expr::Bin(BinOp::Add, ..)));
    }

    #[test]
    fn bound_index() {
        let e = parse("sum(k=0..n, tpoch(a;k))").unwrap();
        match e {
            Expr::Sum(Head::Range { var, .. }, body) => {
                assert_eq!(var, "k");
                assert_eq!(body.to_string(), "tpoch(a; k)");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("theta(").unwrap_err();
        assert_eq!((e.line, e.col), (1, 7));
        let e = parse("1 +\n  foo(x)").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
        assert!(e.msg.contains("unknown function"));
        let e = parse("tpoch(a)").unwrap_err();
        assert!(e.msg.contains("takes 2"), "{e}");
        let e = parse("theta(a, b)").unwrap_err();
        assert!(e.msg.contains("takes 1"), "{e}");
        assert_eq!(parse("2 $ 3").unwrap_err().col, 3);
    }

    #[test]
    fn literals() {
        assert_eq!(parse("1.5+2i").unwrap().to_string(), "1.5 + 2i");
        assert!(matches!(parse("3/4").unwrap(), Expr::Bin(BinOp::Div, ..)));
        assert_eq!(parse("x_12").unwrap(), Expr::Var { name: "x".into(), sub: Some(Sub::Index(12)) });
        assert!(parse("x_").is_err());
    }
}
