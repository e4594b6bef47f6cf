//! Gram–Schmidt evaluated over prime fields at grid points `(q, t)`, then
//! lifted back to `Q(q,t)`.
//!
//! The integral form `c_lambda P_lambda` with
//! `c_lambda = prod_s (1 - q^{a(s)} t^{l(s)+1})` has coefficients in `Z[q,t]`
//! of `q`-degree at most `sum a(s)` and `t`-degree at most `sum (l(s)+1)`, so
//! each coefficient is recovered by bivariate interpolation modulo several
//! primes and Chinese remaindering. Every interpolant is checked at extra
//! points and the lift is accepted only once a further prime agrees.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{BigRat, FactoredQT, Mono, MultiPoly, RatFunc, VarSet};
use crate::partitions::Partition;

use super::pieri::{b_pm_factored, Sign};
use super::scalar::{degree_basis, z_lambda, DegreeBasis};

#[derive(Clone, Copy)]
struct Fp(u64);

impl Fp {
    fn add(self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.0 as u128) as u64
    }

    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.0 - (b - a)
        }
    }

    fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.pow(a, self.0 - 2))
    }

    fn from_int(self, x: &BigInt) -> u64 {
        let m = BigInt::from(self.0);
        x.mod_floor(&m).to_u64().expect("reduced")
    }

    fn from_rat(self, x: &BigRat) -> Option<u64> {
        let d = self.inv(self.from_int(x.denom()))?;
        Some(self.mul(self.from_int(x.numer()), d))
    }

    /// `q^a t^b` for signed exponents.
    fn mono(self, q: u64, t: u64, a: i64, b: i64) -> Option<u64> {
        let pw = |x: u64, e: i64| -> Option<u64> {
            if e >= 0 {
                Some(self.pow(x, e as u64))
            } else {
                self.inv(self.pow(x, (-e) as u64))
            }
        };
        Some(self.mul(pw(q, a)?, pw(t, b)?))
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let f = Fp(n);
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // these bases are deterministic below 2^64
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = f.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = f.mul(x, x);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn primes() -> impl Iterator<Item = u64> {
    let mut n = (1u64 << 61) + 1;
    std::iter::from_fn(move || {
        loop {
            n -= 2;
            if is_prime(n) {
                return Some(n);
            }
        }
    })
}

/// Value of a factored `q,t` product at a point, or `None` at a pole.
fn eval_factored(f: Fp, fq: &FactoredQT, q: u64, t: u64) -> Option<u64> {
    let (qa, tb) = fq.monomial_exponents();
    let mut v = f.mul(f.from_rat(fq.coeff())?, f.mono(q, t, qa, tb)?);
    for (bin, e) in fq.factors() {
        let m = f.mono(q, t, bin.a as i64, bin.b as i64)?;
        let x = if bin.eps == 1 { f.sub(1, m) } else { f.add(1, m) };
        let x = if e < 0 { f.inv(x)? } else { x };
        v = f.mul(v, f.pow(x, e.unsigned_abs() as u64));
    }
    Some(v)
}

struct Plan {
    basis: std::sync::Arc<DegreeBasis>,
    /// Dominance-smaller partitions, as indices, for every index.
    lower: Vec<Vec<usize>>,
    /// Degree bounds in `q` and `t` of the integral form.
    bounds: Vec<(usize, usize)>,
    c: Vec<FactoredQT>,
    b: Vec<FactoredQT>,
}

impl Plan {
    fn new(d: u32) -> Plan {
        let basis = degree_basis(d);
        let parts = &basis.parts;
        let lower = parts
            .iter()
            .enumerate()
            .map(|(i, l)| (0..i).filter(|&j| parts[j].dominated_by(l)).collect())
            .collect();
        let bounds = parts
            .iter()
            .map(|l| {
                let al = l.arms_legs();
                (
                    al.iter().map(|(a, _)| *a as usize).sum(),
                    al.iter().map(|(_, l)| *l as usize + 1).sum(),
                )
            })
            .collect();
        let c = parts
            .iter()
            .map(|l| {
                FactoredQT::from_factors(
                    l.arms_legs().into_iter().map(|(a, l)| (1i8, a as i32, l as i32 + 1, 1)),
                )
                .expect("proper factors")
            })
            .collect();
        let b = parts.iter().map(|l| b_pm_factored(l, Sign::Plus)).collect();
        Plan {
            basis,
            lower,
            bounds,
            c,
            b,
        }
    }

    /// Integral-form coefficients `[lambda][mu]` at one point, or `None` if a
    /// denominator vanishes there.
    fn at_point(&self, f: Fp, q: u64, t: u64) -> Option<Vec<Vec<u64>>> {
        let parts = &self.basis.parts;
        let n = parts.len();
        let mut norms = Vec::with_capacity(n);
        for rho in parts {
            let mut w = f.from_int(&z_lambda(rho));
            for &k in rho.parts() {
                let num = f.sub(1, f.pow(q, k as u64));
                let den = f.inv(f.sub(1, f.pow(t, k as u64)))?;
                w = f.mul(w, f.mul(num, den));
            }
            norms.push(w);
        }
        let lmat: Vec<Vec<(usize, u64)>> = self
            .basis
            .m_to_p
            .iter()
            .map(|row| row.iter().map(|(r, x)| Some((*r, f.from_rat(x)?))).collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()?;
        let mut u: Vec<Vec<u64>> = vec![vec![0; n]; n];
        let mut sigma: Vec<Vec<u64>> = vec![vec![0; n]; n];
        for li in 0..n {
            u[li][li] = 1;
            let mut acc = vec![0u64; n];
            acc[li] = 1;
            for &mi in &self.lower[li] {
                let mut ip = 0;
                for &(r, x) in &lmat[li] {
                    ip = f.add(ip, f.mul(x, sigma[mi][r]));
                }
                let c = f.mul(ip, eval_factored(f, &self.b[mi], q, t)?);
                if c == 0 {
                    continue;
                }
                for &ni in self.lower[mi].iter().chain(std::iter::once(&mi)) {
                    acc[ni] = f.sub(acc[ni], f.mul(c, u[mi][ni]));
                }
            }
            u[li] = acc;
            let mut pc = vec![0u64; n];
            for ni in 0..n {
                if u[li][ni] == 0 {
                    continue;
                }
                for &(r, x) in &lmat[ni] {
                    pc[r] = f.add(pc[r], f.mul(u[li][ni], x));
                }
            }
            for r in 0..n {
                sigma[li][r] = f.mul(pc[r], norms[r]);
            }
        }
        for li in 0..n {
            let c = eval_factored(f, &self.c[li], q, t)?;
            for v in u[li].iter_mut() {
                *v = f.mul(*v, c);
            }
        }
        Some(u)
    }
}

/// Monomial coefficients of the polynomial through `(xs[i], ys[i])`.
fn interpolate(f: Fp, xs: &[u64], ys: &[u64]) -> Vec<u64> {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for k in 1..n {
        for i in (k..n).rev() {
            let den = f.inv(f.sub(xs[i], xs[i - k])).expect("distinct nodes");
            dd[i] = f.mul(f.sub(dd[i], dd[i - 1]), den);
        }
    }
    // Horner on the Newton form
    let mut coeffs = vec![0u64; n];
    for k in (0..n).rev() {
        // coeffs <- coeffs * (x - xs[k]) + dd[k]
        let mut next = vec![0u64; n];
        for i in 0..n {
            if coeffs[i] == 0 {
                continue;
            }
            if i + 1 < n {
                next[i + 1] = f.add(next[i + 1], coeffs[i]);
            }
            next[i] = f.sub(next[i], f.mul(coeffs[i], xs[k]));
        }
        next[0] = f.add(next[0], dd[k]);
        coeffs = next;
    }
    coeffs
}

fn eval_biv(f: Fp, c: &[Vec<u64>], q: u64, t: u64) -> u64 {
    let mut v = 0;
    for row in c.iter().rev() {
        let mut r = 0;
        for &x in row.iter().rev() {
            r = f.add(f.mul(r, t), x);
        }
        v = f.add(f.mul(v, q), r);
    }
    v
}

/// One prime: coefficient tables `[lambda][mu][i][j]` of `q^i t^j`.
fn solve_mod(plan: &Plan, f: Fp) -> Option<Vec<Vec<Vec<Vec<u64>>>>> {
    let n = plan.basis.parts.len();
    let dq = plan.bounds.iter().map(|b| b.0).max().unwrap_or(0);
    let dt = plan.bounds.iter().map(|b| b.1).max().unwrap_or(0);
    let qs: Vec<u64> = (0..=dq as u64).map(|i| i + 2).collect();
    let ts: Vec<u64> = (0..=dt as u64).map(|j| j + 3 + dq as u64).collect();
    let mut grid: Vec<Vec<Vec<Vec<u64>>>> = Vec::with_capacity(qs.len());
    for &q in &qs {
        let mut row = Vec::with_capacity(ts.len());
        for &t in &ts {
            row.push(plan.at_point(f, q, t)?);
        }
        grid.push(row);
    }
    let mut out = vec![vec![Vec::new(); n]; n];
    for li in 0..n {
        let (bq, bt) = plan.bounds[li];
        for mi in plan.lower[li].iter().copied().chain(std::iter::once(li)) {
            let rows: Vec<Vec<u64>> = (0..=bq)
                .map(|i| {
                    let ys: Vec<u64> = (0..=bt).map(|j| grid[i][j][li][mi]).collect();
                    interpolate(f, &ts[..=bt], &ys)
                })
                .collect();
            let mut c = vec![vec![0u64; bt + 1]; bq + 1];
            for j in 0..=bt {
                let ys: Vec<u64> = rows.iter().map(|r| r[j]).collect();
                for (i, x) in interpolate(f, &qs[..=bq], &ys).into_iter().enumerate() {
                    c[i][j] = x;
                }
            }
            out[li][mi] = c;
        }
    }
    // spot checks off the grid
    for k in 0..3u64 {
        let (q, t) = (1_000_003 + 7 * k, 2_000_029 + 11 * k);
        let vals = plan.at_point(f, q, t)?;
        for li in 0..n {
            for mi in plan.lower[li].iter().copied().chain(std::iter::once(li)) {
                assert_eq!(
                    eval_biv(f, &out[li][mi], q, t),
                    vals[li][mi],
                    "degree bound violated for {} / {}",
                    plan.basis.parts[li],
                    plan.basis.parts[mi]
                );
            }
        }
    }
    Some(out)
}

fn symmetric(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Monomial coordinates of every `P_lambda` of degree `d`.
pub(crate) fn build_degree_modular(d: u32) -> BTreeMap<Partition, BTreeMap<Partition, RatFunc>> {
    let plan = Plan::new(d);
    let parts = plan.basis.parts.clone();
    let n = parts.len();
    // residues combined so far, with their modulus
    let mut modulus = BigInt::one();
    let mut acc: Vec<Vec<Vec<Vec<BigInt>>>> = Vec::new();
    let mut rounds = 0;
    for p in primes() {
        let f = Fp(p);
        let Some(table) = solve_mod(&plan, f) else { continue };
        rounds += 1;
        if acc.is_empty() {
            acc = table
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| c.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
                        .collect()
                })
                .collect();
            modulus = BigInt::from(p);
            continue;
        }
        let pm = BigInt::from(p);
        let inv = BigInt::from(f.inv(f.from_int(&modulus)).expect("distinct primes"));
        let mut stable = true;
        for li in 0..n {
            for mi in 0..n {
                for (i, row) in table[li][mi].iter().enumerate() {
                    for (j, &x) in row.iter().enumerate() {
                        let old = &acc[li][mi][i][j];
                        let sym = symmetric(old, &modulus);
                        if f.from_int(&sym) != x {
                            stable = false;
                        }
                        // old + modulus * ((x - old) / modulus mod p)
                        let delta = (BigInt::from(x) - old).mod_floor(&pm) * &inv % &pm;
                        acc[li][mi][i][j] = old + &modulus * delta;
                    }
                }
            }
        }
        modulus *= pm;
        if stable && rounds >= 2 {
            break;
        }
    }
    let vars = VarSet::qt();
    let mut out = BTreeMap::new();
    for li in 0..n {
        let mut row = BTreeMap::new();
        row.insert(parts[li].clone(), RatFunc::one(&vars));
        let cden = plan.c[li].to_ratfunc();
        for &mi in &plan.lower[li] {
            let mut terms = Vec::new();
            for (i, r) in acc[li][mi].iter().enumerate() {
                for (j, x) in r.iter().enumerate() {
                    let v = symmetric(x, &modulus);
                    if !v.is_zero() {
                        let m = Mono::from_exps(&[i as u32, j as u32]).expect("small exponents");
                        terms.push((m, BigRat::from_integer(v)));
                    }
                }
            }
            let num = MultiPoly::from_terms(&vars, terms);
            if num.is_zero() {
                continue;
            }
            let val = RatFunc::from_poly(num).try_div(&cden).expect("c_lambda is nonzero");
            row.insert(parts[mi].clone(), val);
        }
        out.insert(parts[li].clone(), row);
    }
    out
}
