//! Sparse multivariate polynomials over Q with a fixed variable universe.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::{AlgebraError, BigRat};

/// Largest exponent any monomial may carry.
pub const MAX_EXPONENT: u32 = i32::MAX as u32;

/// An ordered list of variable names. Polynomials only combine when they
/// share the same universe.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Box<[String]>,
}

pub type Vars = Arc<VarSet>;

impl VarSet {
    pub fn new<I, S>(names: I) -> Vars
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Arc::new(VarSet {
            names: names.into_iter().map(Into::into).collect(),
        })
    }

    /// The universe {q, t} used by the Macdonald engine.
    pub fn qt() -> Vars {
        static QT: OnceLock<Vars> = OnceLock::new();
        QT.get_or_init(|| VarSet::new(["q", "t"])).clone()
    }

    /// The universe {q, t, b} used for the formal-b Macdonald identities.
    pub fn qtb() -> Vars {
        static QTB: OnceLock<Vars> = OnceLock::new();
        QTB.get_or_init(|| VarSet::new(["q", "t", "b"])).clone()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub(crate) fn same_vars(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Exponent vector with its total degree cached. The derived ordering is
/// graded lexicographic with the first variable largest.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mono {
    deg: u32,
    exps: SmallVec<[u32; 4]>,
}

impl Mono {
    pub fn one(nvars: usize) -> Self {
        Mono {
            deg: 0,
            exps: SmallVec::from_elem(0, nvars),
        }
    }

    pub fn from_exps(exps: &[u32]) -> Result<Self, AlgebraError> {
        let mut deg: u64 = 0;
        for &e in exps {
            if e > MAX_EXPONENT {
                return Err(AlgebraError::ExponentOverflow);
            }
            deg += e as u64;
        }
        if deg > MAX_EXPONENT as u64 {
            return Err(AlgebraError::ExponentOverflow);
        }
        Ok(Mono {
            deg: deg as u32,
            exps: SmallVec::from_slice(exps),
        })
    }

    pub fn var(nvars: usize, idx: usize, power: u32) -> Self {
        let mut exps = SmallVec::from_elem(0, nvars);
        exps[idx] = power;
        Mono { deg: power, exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn checked_mul(&self, other: &Mono) -> Result<Mono, AlgebraError> {
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(other.exps.iter()) {
            let s = a.checked_add(*b).filter(|s| *s <= MAX_EXPONENT);
            exps.push(s.ok_or(AlgebraError::ExponentOverflow)?);
        }
        let deg = self
            .deg
            .checked_add(other.deg)
            .filter(|s| *s <= MAX_EXPONENT)
            .ok_or(AlgebraError::ExponentOverflow)?;
        Ok(Mono { deg, exps })
    }

    fn mul(&self, other: &Mono) -> Mono {
        self.checked_mul(other)
            .expect("monomial exponent exceeded 2^31-1")
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut exps = SmallVec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(other.exps.iter()) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(Mono {
            deg: self.deg - other.deg,
            exps,
        })
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }
}

/// A polynomial stored as terms sorted by descending graded-lex order with
/// no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: Vars,
    terms: Vec<(Mono, BigRat)>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({})", self)
    }
}

impl MultiPoly {
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, BigRat::one())
    }

    pub fn constant(vars: &Vars, c: BigRat) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.push((Mono::one(vars.len()), c));
        }
        p
    }

    pub fn from_int(vars: &Vars, c: i64) -> Self {
        Self::constant(vars, BigRat::from_integer(c.into()))
    }

    /// The variable with the given index.
    pub fn var(vars: &Vars, idx: usize) -> Self {
        Self::monomial(vars, Mono::var(vars.len(), idx, 1), BigRat::one())
    }

    /// The variable with the given name; panics when absent.
    pub fn named(vars: &Vars, name: &str) -> Self {
        let idx = vars
            .index_of(name)
            .unwrap_or_else(|| panic!("variable {name} not in universe"));
        Self::var(vars, idx)
    }

    pub fn monomial(vars: &Vars, mono: Mono, c: BigRat) -> Self {
        debug_assert_eq!(mono.exps.len(), vars.len());
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.push((mono, c));
        }
        p
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I>(vars: &Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Mono, BigRat)>,
    {
        let mut acc: HashMap<Mono, BigRat> = HashMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.exps.len(), vars.len());
            *acc.entry(m).or_insert_with(BigRat::zero) += c;
        }
        Self::from_map(vars, acc)
    }

    fn from_map(vars: &Vars, acc: HashMap<Mono, BigRat>) -> Self {
        let mut terms: Vec<(Mono, BigRat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        MultiPoly {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> &[(Mono, BigRat)] {
        &self.terms
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// The constant value if this polynomial has degree zero.
    pub fn constant_value(&self) -> Option<BigRat> {
        match self.terms.as_slice() {
            [] => Some(BigRat::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn lead(&self) -> Option<&(Mono, BigRat)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.deg).unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exps[v]).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exps[v]).min().unwrap_or(0)
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.iter().any(|t| t.0.exps[v] > 0)
    }

    fn check_vars(&self, other: &MultiPoly) {
        assert!(
            same_vars(&self.vars, &other.vars),
            "polynomials live in different variable universes"
        );
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        if !same_vars(&self.vars, &other.vars) {
            return Err(AlgebraError::VariableMismatch);
        }
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        if !same_vars(&self.vars, &other.vars) {
            return Err(AlgebraError::VariableMismatch);
        }
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &MultiPoly, negate_other: bool) -> MultiPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate_other { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate_other { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate_other { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: out,
        }
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        if !same_vars(&self.vars, &other.vars) {
            return Err(AlgebraError::VariableMismatch);
        }
        if self.is_zero() || other.is_zero() {
            return Ok(MultiPoly::zero(&self.vars));
        }
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.terms.len() == 1 {
            let (m, c) = &small.terms[0];
            return big.try_mul_term(m, c);
        }
        let mut acc: HashMap<Mono, BigRat> =
            HashMap::with_capacity(small.terms.len() * big.terms.len());
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let m = ma.checked_mul(mb)?;
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Ok(Self::from_map(&self.vars, acc))
    }

    /// Multiplies by `c * m`; order of terms is preserved.
    pub fn try_mul_term(&self, m: &Mono, c: &BigRat) -> Result<MultiPoly, AlgebraError> {
        if c.is_zero() {
            return Ok(MultiPoly::zero(&self.vars));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (tm, tc) in &self.terms {
            terms.push((tm.checked_mul(m)?, tc * c));
        }
        Ok(MultiPoly {
            vars: self.vars.clone(),
            terms,
        })
    }

    pub fn mul_term(&self, m: &Mono, c: &BigRat) -> MultiPoly {
        self.try_mul_term(m, c)
            .expect("monomial exponent exceeded 2^31-1")
    }

    pub fn scale(&self, c: &BigRat) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut result = MultiPoly::one(&self.vars);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        self.check_vars(d);
        let (dm, dc) = d.terms.first()?;
        if self.is_zero() {
            return Some(self.clone());
        }
        if d.terms.len() == 1 {
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                terms.push((m.div(dm)?, c / dc));
            }
            return Some(MultiPoly {
                vars: self.vars.clone(),
                terms,
            });
        }
        // Quick degree screens before the division loop.
        for v in 0..self.vars.len() {
            if d.degree_in(v) > self.degree_in(v) {
                return None;
            }
        }
        let mut rem: std::collections::BTreeMap<Mono, BigRat> = self.terms.iter().cloned().collect();
        let mut quotient = Vec::new();
        let dc_inv = dc.recip();
        while let Some((lm, lc)) = rem.pop_last() {
            let qm = lm.div(dm)?;
            let qc = &lc * &dc_inv;
            for (m, c) in d.terms.iter().skip(1) {
                let pm = m.mul(&qm);
                let delta = c * &qc;
                match rem.get_mut(&pm) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            rem.remove(&pm);
                        }
                    }
                    None => {
                        rem.insert(pm, -delta);
                    }
                }
            }
            quotient.push((qm, qc));
        }
        Some(MultiPoly {
            vars: self.vars.clone(),
            terms: quotient,
        })
    }

    /// Divides by the monomial `m`; `None` when it does not divide every term.
    pub fn div_mono(&self, m: &Mono) -> Option<MultiPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (tm, c) in &self.terms {
            terms.push((tm.div(m)?, c.clone()));
        }
        Some(MultiPoly {
            vars: self.vars.clone(),
            terms,
        })
    }

    /// Drops all terms whose total degree in `vars` exceeds `max_deg`.
    pub fn truncate_degree(&self, vars: &[usize], max_deg: u32) -> MultiPoly {
        if vars.is_empty() {
            return self.clone();
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().map(|&v| m.exps[v] as u64).sum::<u64>() <= max_deg as u64)
                .cloned()
                .collect(),
        }
    }

    /// Substitutes polynomials for some variables; `None` entries stay put.
    pub fn substitute(&self, bindings: &[Option<MultiPoly>]) -> MultiPoly {
        assert_eq!(bindings.len(), self.vars.len());
        let target = bindings
            .iter()
            .flatten()
            .next()
            .map(|b| b.vars.clone())
            .unwrap_or_else(|| self.vars.clone());
        // Monomial bindings map terms to terms.
        let all_mono = bindings
            .iter()
            .flatten()
            .all(|b| b.terms.len() == 1 && same_vars(&b.vars, &target));
        if all_mono && same_vars(&target, &self.vars) {
            let mut acc: HashMap<Mono, BigRat> = HashMap::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                let mut exps: SmallVec<[u64; 4]> = SmallVec::from_elem(0, self.vars.len());
                let mut coeff = c.clone();
                for (v, &e) in m.exps.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    match &bindings[v] {
                        None => exps[v] += e as u64,
                        Some(b) => {
                            let (bm, bc) = &b.terms[0];
                            for (w, &be) in bm.exps.iter().enumerate() {
                                exps[w] += be as u64 * e as u64;
                            }
                            if !bc.is_one() {
                                coeff *= num_traits::pow(bc.clone(), e as usize);
                            }
                        }
                    }
                }
                let e32: Vec<u32> = exps
                    .iter()
                    .map(|&x| u32::try_from(x).expect("exponent overflow in substitution"))
                    .collect();
                let mono = Mono::from_exps(&e32).expect("exponent overflow in substitution");
                *acc.entry(mono).or_insert_with(BigRat::zero) += coeff;
            }
            return Self::from_map(&self.vars, acc);
        }
        let mut powers: Vec<Vec<MultiPoly>> = bindings
            .iter()
            .map(|b| match b {
                Some(p) => vec![MultiPoly::one(&target), p.clone()],
                None => Vec::new(),
            })
            .collect();
        let mut out = MultiPoly::zero(&target);
        for (m, c) in &self.terms {
            let mut term = MultiPoly::constant(&target, c.clone());
            let mut free = SmallVec::<[u32; 4]>::from_elem(0, target.len());
            for (v, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if bindings[v].is_some() {
                    let pw = &mut powers[v];
                    while pw.len() <= e as usize {
                        let next = &pw[pw.len() - 1] * &pw[1];
                        pw.push(next);
                    }
                    term = &term * &pw[e as usize];
                } else {
                    let name = &self.vars.names[v];
                    let w = target
                        .index_of(name)
                        .expect("free variable missing from target universe");
                    free[w] += e;
                }
            }
            let fm = Mono::from_exps(&free).expect("exponent overflow");
            out = &out + &term.mul_term(&fm, &BigRat::one());
        }
        out
    }

    /// Re-expresses the polynomial over a larger universe containing all its variables.
    pub fn embed(&self, target: &Vars) -> Result<MultiPoly, AlgebraError> {
        if same_vars(&self.vars, target) {
            return Ok(self.clone());
        }
        let map: Vec<usize> = self
            .vars
            .names
            .iter()
            .map(|n| target.index_of(n).ok_or(AlgebraError::VariableMismatch))
            .collect::<Result<_, _>>()?;
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0u32; target.len()];
            for (i, &x) in m.exps.iter().enumerate() {
                e[map[i]] = x;
            }
            (Mono::from_exps(&e).expect("embedding preserves degrees"), c.clone())
        });
        Ok(MultiPoly::from_terms(target, terms))
    }

    /// Exact evaluation at rational values for every variable.
    pub fn eval_rational(&self, values: &[BigRat]) -> BigRat {
        assert_eq!(values.len(), self.vars.len());
        let mut powers: Vec<Vec<BigRat>> = values.iter().map(|v| vec![BigRat::one(), v.clone()]).collect();
        let mut total = BigRat::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = &mut powers[v];
                while pw.len() <= e as usize {
                    let next = &pw[pw.len() - 1] * &pw[1];
                    pw.push(next);
                }
                term *= &pw[e as usize];
            }
            total += term;
        }
        total
    }

    /// Floating-point evaluation at a complex point.
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut z = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
                for (v, &e) in m.exps.iter().enumerate() {
                    if e > 0 {
                        z *= point[v].powi(e as i32);
                    }
                }
                z
            })
            .sum()
    }

    /// Scales to an integer polynomial with coprime coefficients and a
    /// positive leading coefficient; returns `(scale, primitive)` with
    /// `self = scale * primitive`.
    pub fn primitive_part(&self) -> (BigRat, MultiPoly) {
        if self.is_zero() {
            return (BigRat::zero(), self.clone());
        }
        let mut den_lcm = BigInt::one();
        for (_, c) in &self.terms {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for (_, c) in &self.terms {
            let scaled = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&scaled);
        }
        let mut content = BigRat::new(num_gcd, den_lcm);
        if self.terms[0].1.is_negative() {
            content = -content;
        }
        let inv = content.recip();
        (content, self.scale(&inv))
    }

    /// Integer coefficients, for primitive polynomials.
    pub(crate) fn integer_terms(&self) -> Vec<(Mono, BigInt)> {
        self.terms
            .iter()
            .map(|(m, c)| {
                debug_assert!(c.is_integer());
                (m.clone(), c.to_integer())
            })
            .collect()
    }

    pub(crate) fn f64_terms(&self) -> Vec<(SmallVec<[u32; 4]>, f64)> {
        self.terms
            .iter()
            .map(|(m, c)| (m.exps.clone(), c.to_f64().unwrap_or(f64::MAX)))
            .collect()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                if abs.is_integer() {
                    factors.push(abs.to_string());
                } else {
                    factors.push(format!("({})", abs));
                }
            }
            for (v, &e) in m.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars.names[v].clone()),
                    _ => factors.push(format!("{}^{}", self.vars.names[v], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl std::ops::$tr<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$imp(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$imp(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl std::ops::Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qt() -> (Vars, MultiPoly, MultiPoly) {
        let v = VarSet::qt();
        let q = MultiPoly::named(&v, "q");
        let t = MultiPoly::named(&v, "t");
        (v, q, t)
    }

    fn int(v: &Vars, c: i64) -> MultiPoly {
        MultiPoly::from_int(v, c)
    }

    #[test]
    fn additive_inverse_is_zero() {
        let (_, q, _) = qt();
        assert!((&q + &(-&q)).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let (v, q, _) = qt();
        let lhs = &(&int(&v, 1) - &q) * &(&int(&v, 1) + &q);
        assert_eq!(lhs, &int(&v, 1) - &q.pow(2));
    }

    #[test]
    fn multiplicative_identity() {
        let (v, q, t) = qt();
        let f = &(&int(&v, 3) * &(&q * &t.pow(2))) + &int(&v, 5);
        assert_eq!(&f * &MultiPoly::one(&v), f);
        assert_eq!(f.to_string(), "3*q*t^2 + 5");
    }

    #[test]
    fn exponent_overflow_is_reported() {
        let v = VarSet::new(["x"]);
        let big = MultiPoly::monomial(&v, Mono::var(1, 0, MAX_EXPONENT), BigRat::one());
        let x = MultiPoly::var(&v, 0);
        assert_eq!(big.try_mul(&x), Err(AlgebraError::ExponentOverflow));
    }

    #[test]
    fn truncation_examples() {
        let v = VarSet::new(["q", "x1", "x2"]);
        let q = MultiPoly::var(&v, 0);
        let x1 = MultiPoly::var(&v, 1);
        let x2 = MultiPoly::var(&v, 2);
        let f = &(&MultiPoly::one(&v) + &x1) + &x1.pow(2);
        assert_eq!(f.truncate_degree(&[1], 1), &MultiPoly::one(&v) + &x1);
        assert_eq!(f.truncate_degree(&[], 0), f);
        let g = &(&q * &x1) * &x2;
        assert!(g.truncate_degree(&[1, 2], 1).is_zero());
    }

    #[test]
    fn exact_division() {
        let (v, q, t) = qt();
        let a = &int(&v, 1) - &(&q * &t);
        let b = &(&q.pow(3) + &t) - &int(&v, 7);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!((&prod + &int(&v, 1)).div_exact(&a), None);
    }

    #[test]
    fn monomial_substitution() {
        let (v, q, t) = qt();
        let f = &(&int(&v, 1) - &(&q * &t)) * &(&int(&v, 2) + &q);
        let sq = f.substitute(&[Some(q.pow(2)), Some(t.pow(2))]);
        let expect = &(&int(&v, 1) - &(&q.pow(2) * &t.pow(2))) * &(&int(&v, 2) + &q.pow(2));
        assert_eq!(sq, expect);
        let qt_eq = f.substitute(&[Some(t.clone()), None]);
        assert_eq!(qt_eq, &(&int(&v, 1) - &t.pow(2)) * &(&int(&v, 2) + &t));
    }

    #[test]
    fn primitive_part_normalises_sign_and_content() {
        let (v, q, _) = qt();
        let f = (&q - &int(&v, 1)).scale(&BigRat::new((-6).into(), 4.into()));
        let (c, p) = f.primitive_part();
        assert_eq!(p, &q - &int(&v, 1));
        assert_eq!(c, BigRat::new((-3).into(), 2.into()));
    }
}
