//! The first Macdonald difference operator
//! `D f = sum_i prod_{j != i} (t x_i - x_j)/(x_i - x_j) f(.., q x_i, ..)` on
//! explicit polynomials, giving an eigenvalue check on `P_lambda` in exactly
//! `n` variables.

use std::collections::BTreeMap;

use crate::algebra::{RatFunc, Vars};
use crate::partitions::Partition;

use super::polys::{macdonald_P, MacdonaldCache};
use super::SymSeries;

type Poly = BTreeMap<Vec<u32>, RatFunc>;

fn add(p: &mut Poly, e: Vec<u32>, c: RatFunc) {
    let v = match p.remove(&e) {
        Some(o) => &o + &c,
        None => c,
    };
    if !v.is_zero() {
        p.insert(e, v);
    }
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            add(&mut out, ea.iter().zip(eb).map(|(x, y)| x + y).collect(), ca * cb);
        }
    }
    out
}

/// `c_a x_a + c_b x_b`.
fn linear(n: usize, a: usize, ca: RatFunc, b: usize, cb: RatFunc) -> Poly {
    let mut p = Poly::new();
    let mut ea = vec![0; n];
    ea[a] = 1;
    let mut eb = vec![0; n];
    eb[b] = 1;
    add(&mut p, ea, ca);
    add(&mut p, eb, cb);
    p
}

fn expand(s: &SymSeries) -> Poly {
    let n = s.nvars();
    let mut p = Poly::new();
    for (lambda, c) in s.terms() {
        let mut e = lambda.padded(n);
        e.sort_unstable();
        loop {
            add(&mut p, e.clone(), c.clone());
            let Some(i) = (1..n).rev().find(|&i| e[i - 1] < e[i]) else { break };
            let j = (i..n).rev().find(|&j| e[j] > e[i - 1]).expect("exists");
            e.swap(i - 1, j);
            e[i..].reverse();
        }
    }
    p
}

/// `sum_i q^{lambda_i} t^{n-i}`.
pub fn operator_eigenvalue(lambda: &Partition, n: usize, vars: &Vars) -> RatFunc {
    let q = RatFunc::named(vars, "q");
    let t = RatFunc::named(vars, "t");
    let terms: Vec<RatFunc> = lambda
        .padded(n)
        .iter()
        .enumerate()
        .map(|(i, &l)| &q.pow(l as i32).expect("power") * &t.pow((n - 1 - i) as i32).expect("power"))
        .collect();
    RatFunc::sum_in(vars, &terms)
}

/// `Delta D f == E Delta f` with `Delta` the Vandermonde product, so that no
/// division by `x_i - x_j` is needed.
pub fn is_operator_eigenfunction(f: &SymSeries, eigenvalue: &RatFunc) -> bool {
    let vars = f.vars().clone();
    let n = f.nvars();
    let one = RatFunc::one(&vars);
    let t = RatFunc::named(&vars, "t");
    let q = RatFunc::named(&vars, "q");
    let fx = expand(f);
    let vandermonde = |skip: Option<usize>| -> Poly {
        let mut p = Poly::new();
        add(&mut p, vec![0; n], one.clone());
        for a in 0..n {
            for b in a + 1..n {
                if Some(a) == skip || Some(b) == skip {
                    continue;
                }
                p = mul(&p, &linear(n, a, one.clone(), b, -&one));
            }
        }
        p
    };
    let mut lhs = Poly::new();
    for i in 0..n {
        // f(.., q x_i, ..)
        let shifted: Poly = fx
            .iter()
            .map(|(e, c)| (e.clone(), c * &q.pow(e[i] as i32).expect("power")))
            .collect();
        let mut w = vandermonde(Some(i));
        if i % 2 == 1 {
            w = w.into_iter().map(|(e, c)| (e, -&c)).collect();
        }
        for j in (0..n).filter(|&j| j != i) {
            w = mul(&w, &linear(n, i, t.clone(), j, -&one));
        }
        for (e, c) in mul(&w, &shifted) {
            add(&mut lhs, e, c);
        }
    }
    let rhs: Poly = mul(&vandermonde(None), &fx)
        .into_iter()
        .map(|(e, c)| (e, &c * eigenvalue))
        .collect();
    let zero = RatFunc::zero(&vars);
    let keys: std::collections::BTreeSet<&Vec<u32>> = lhs.keys().chain(rhs.keys()).collect();
    let same = keys
        .into_iter()
        .all(|k| lhs.get(k).unwrap_or(&zero).eq_cross(rhs.get(k).unwrap_or(&zero)));
    same
}

/// `P_lambda(x_1..x_n)` is an eigenfunction of the operator in `n` variables.
pub fn check_operator_eigen(lambda: &Partition, n: usize, cache: &MacdonaldCache) -> bool {
    let p = macdonald_P(lambda, n, cache);
    is_operator_eigenfunction(&p, &operator_eigenvalue(lambda, n, p.vars()))
}
