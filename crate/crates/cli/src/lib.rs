//! Command-line harness for theta-forge: campaigns over the identity
//! registry and an expression language for ad-hoc theta computations.

pub mod campaign;
pub mod dsl;

use num_complex::Complex64;
use theta_forge::thetanum::ThetaContext;

use dsl::{eval, parse, Env, Value};

/// Parses a binding value: a constant expression, or `[e1, e2, ..]` for a
/// vector read through subscripts.
pub fn parse_value(src: &str, ctx: ThetaContext) -> Result<Value, String> {
    let s = src.trim();
    let scalar = |e: &str| -> Result<Complex64, String> {
        let ast = parse(e).map_err(|err| err.to_string())?;
        eval(&ast, &Env::new(), ctx).map_err(|err| err.to_string())
    };
    if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        if inner.trim().is_empty() {
            return Ok(Value::Vector(Vec::new()));
        }
        let v = split_top_level(inner).iter().map(|e| scalar(e)).collect::<Result<_, _>>()?;
        return Ok(Value::Vector(v));
    }
    scalar(s).map(Value::Scalar)
}

/// Splits on commas that are not inside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Formats a complex number so it parses back through the expression
/// language.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{}{}i", z.re, if z.im < 0.0 { "-" } else { "+" }, z.im.abs())
    }
}
