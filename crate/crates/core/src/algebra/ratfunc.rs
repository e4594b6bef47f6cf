//! Rational functions with a polynomial numerator and a factored denominator.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use super::cyclo::{cyclotomic_candidates, decompose, image_candidates, Decomposition, FactorKey, Screen};
use super::poly::{same_vars, Mono, MultiPoly, Vars};
use super::{AlgebraError, BigRat};

type Den = BTreeMap<FactorKey, u32>;

/// Element of `Q(vars)`. The denominator is a product of keyed factors;
/// known factors are cancelled against the numerator by trial division, and
/// equality is decided by cross-multiplication, so no gcd is ever needed.
#[derive(Clone)]
pub struct RatFunc {
    num: MultiPoly,
    den: Den,
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self)
    }
}

fn den_poly_cached(vars: &Vars, cache: &mut HashMap<FactorKey, MultiPoly>, key: &FactorKey) -> MultiPoly {
    cache.entry(key.clone()).or_insert_with(|| key.poly(vars)).clone()
}

fn expand(vars: &Vars, factors: impl IntoIterator<Item = (FactorKey, u32)>) -> MultiPoly {
    let mut out = MultiPoly::one(vars);
    for (k, e) in factors {
        if e > 0 {
            out = &out * &k.poly(vars).pow(e);
        }
    }
    out
}

/// Cancels denominator factors that divide the numerator.
fn reduce(num: MultiPoly, den: Den) -> RatFunc {
    let vars = num.vars().clone();
    if num.is_zero() {
        return RatFunc::zero(&vars);
    }
    let mut num = num;
    let mut screen: Option<Screen> = None;
    let mut out = Den::new();
    for (key, mut k) in den {
        match &key {
            FactorKey::Var(v) => {
                let m = num.min_degree_in(*v).min(k);
                if m > 0 {
                    num = num
                        .div_mono(&Mono::var(vars.len(), *v, m))
                        .expect("minimal degree divides");
                    k -= m;
                    screen = None;
                }
            }
            _ => {
                while k > 0 && !num.is_constant() {
                    let s = screen.get_or_insert_with(|| Screen::new(&num));
                    if !s.may_vanish(&key) {
                        break;
                    }
                    match num.div_exact(&key.poly(&vars)) {
                        Some(q) => {
                            num = q;
                            k -= 1;
                            screen = None;
                        }
                        None => break,
                    }
                }
            }
        }
        if k > 0 {
            out.insert(key, k);
        }
    }
    RatFunc { num, den: out }
}

fn lcm(a: &Den, b: &Den) -> Den {
    let mut l = a.clone();
    for (k, &e) in b {
        let slot = l.entry(k.clone()).or_insert(0);
        *slot = (*slot).max(e);
    }
    l
}

fn cofactor(vars: &Vars, cache: &mut HashMap<FactorKey, MultiPoly>, den: &Den, target: &Den) -> MultiPoly {
    let mut out = MultiPoly::one(vars);
    for (k, &e) in target {
        let have = den.get(k).copied().unwrap_or(0);
        if e > have {
            out = &out * &den_poly_cached(vars, cache, k).pow(e - have);
        }
    }
    out
}

impl RatFunc {
    pub fn zero(vars: &Vars) -> Self {
        RatFunc {
            num: MultiPoly::zero(vars),
            den: Den::new(),
        }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(MultiPoly::one(vars))
    }

    pub fn constant(vars: &Vars, c: BigRat) -> Self {
        Self::from_poly(MultiPoly::constant(vars, c))
    }

    pub fn from_int(vars: &Vars, c: i64) -> Self {
        Self::from_poly(MultiPoly::from_int(vars, c))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RatFunc {
            num: p,
            den: Den::new(),
        }
    }

    pub fn var(vars: &Vars, idx: usize) -> Self {
        Self::from_poly(MultiPoly::var(vars, idx))
    }

    pub fn named(vars: &Vars, name: &str) -> Self {
        Self::from_poly(MultiPoly::named(vars, name))
    }

    /// Trusted constructor for callers that know no factor divides `num`.
    pub(crate) fn from_parts_unreduced(num: MultiPoly, den: BTreeMap<FactorKey, u32>) -> Self {
        RatFunc { num, den }
    }

    /// `num / prod key^mult`, cancelling common factors.
    pub fn from_parts(num: MultiPoly, den: impl IntoIterator<Item = (FactorKey, u32)>) -> Self {
        let mut d = Den::new();
        for (k, e) in den {
            if e > 0 {
                *d.entry(k).or_insert(0) += e;
            }
        }
        reduce(num, d)
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator_factors(&self) -> impl Iterator<Item = (&FactorKey, u32)> {
        self.den.iter().map(|(k, &e)| (k, e))
    }

    pub fn denominator(&self) -> MultiPoly {
        expand(self.vars(), self.den.iter().map(|(k, &e)| (k.clone(), e)))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_polynomial(&self) -> Option<&MultiPoly> {
        self.den.is_empty().then_some(&self.num)
    }

    /// The constant value, if this is a constant.
    pub fn constant_value(&self) -> Option<BigRat> {
        if self.den.is_empty() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn try_add(&self, other: &RatFunc) -> Result<RatFunc, AlgebraError> {
        if !same_vars(self.vars(), other.vars()) {
            return Err(AlgebraError::VariableMismatch);
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.den == other.den {
            return Ok(reduce(self.num.try_add(&other.num)?, self.den.clone()));
        }
        Ok(Self::sum([self, other]))
    }

    /// Sums many terms over one common denominator with a single reduction.
    pub fn sum<'a, I>(items: I) -> RatFunc
    where
        I: IntoIterator<Item = &'a RatFunc>,
    {
        let all: Vec<&RatFunc> = items.into_iter().collect();
        let vars = all
            .first()
            .expect("RatFunc::sum of an empty list needs a universe; use sum_in")
            .vars()
            .clone();
        let items: Vec<&RatFunc> = all.into_iter().filter(|r| !r.is_zero()).collect();
        match items.len() {
            0 => return RatFunc::zero(&vars),
            1 => return items[0].clone(),
            _ => {}
        }
        let mut l = Den::new();
        for r in &items {
            assert!(same_vars(&vars, r.vars()), "operands live in different variable universes");
            l = lcm(&l, &r.den);
        }
        let mut cache = HashMap::new();
        let mut cof_cache: HashMap<&Den, MultiPoly> = HashMap::new();
        let mut num = MultiPoly::zero(&vars);
        for r in &items {
            let cof = cof_cache
                .entry(&r.den)
                .or_insert_with(|| cofactor(&vars, &mut cache, &r.den, &l))
                .clone();
            num = &num + &(&r.num * &cof);
        }
        reduce(num, l)
    }

    /// Like [`RatFunc::sum`] but well defined for empty input.
    pub fn sum_in<'a, I>(vars: &Vars, items: I) -> RatFunc
    where
        I: IntoIterator<Item = &'a RatFunc>,
    {
        let items: Vec<&RatFunc> = items.into_iter().filter(|r| !r.is_zero()).collect();
        if items.is_empty() {
            RatFunc::zero(vars)
        } else {
            Self::sum(items)
        }
    }

    pub fn try_sub(&self, other: &RatFunc) -> Result<RatFunc, AlgebraError> {
        self.try_add(&other.neg_ref())
    }

    fn neg_ref(&self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn try_mul(&self, other: &RatFunc) -> Result<RatFunc, AlgebraError> {
        if !same_vars(self.vars(), other.vars()) {
            return Err(AlgebraError::VariableMismatch);
        }
        if self.is_zero() || other.is_zero() {
            return Ok(RatFunc::zero(self.vars()));
        }
        let num = self.num.try_mul(&other.num)?;
        let mut den = self.den.clone();
        for (k, &e) in &other.den {
            *den.entry(k.clone()).or_insert(0) += e;
        }
        if self.den.is_empty() && other.den.is_empty() {
            return Ok(RatFunc { num, den });
        }
        Ok(reduce(num, den))
    }

    pub fn scale(&self, c: &BigRat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero(self.vars());
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Multiplies by a polynomial.
    pub fn mul_poly(&self, p: &MultiPoly) -> RatFunc {
        self.try_mul(&RatFunc::from_poly(p.clone()))
            .unwrap_or_else(|e| panic!("{e}"))
    }

    fn from_decomposition(vars: &Vars, d: Decomposition, invert: bool) -> RatFunc {
        // Builds d^(+1) or d^(-1).
        let mut den = Den::new();
        let mut num = MultiPoly::one(vars);
        for (v, &e) in d.mono.iter().enumerate() {
            if e > 0 {
                if invert {
                    den.insert(FactorKey::Var(v), e);
                } else {
                    num = num.mul_term(&Mono::var(vars.len(), v, e), &BigRat::one());
                }
            }
        }
        for (k, e) in d.factors {
            if invert {
                *den.entry(k).or_insert(0) += e;
            } else {
                num = &num * &k.poly(vars).pow(e);
            }
        }
        let c = if invert { d.coeff.recip() } else { d.coeff };
        RatFunc {
            num: num.scale(&c),
            den,
        }
    }

    pub fn recip(&self) -> Result<RatFunc, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let vars = self.vars().clone();
        let d = decompose(&self.num, &cyclotomic_candidates(&self.num))?;
        let inv = Self::from_decomposition(&vars, d, true);
        let den_poly = self.denominator();
        Ok(reduce(&den_poly * &inv.num, inv.den))
    }

    pub fn try_div(&self, other: &RatFunc) -> Result<RatFunc, AlgebraError> {
        self.try_mul(&other.recip()?)
    }

    pub fn pow(&self, k: i32) -> Result<RatFunc, AlgebraError> {
        let base = if k < 0 { self.recip()? } else { self.clone() };
        let e = k.unsigned_abs();
        let num = base.num.pow(e);
        let den = base.den.iter().map(|(f, &m)| (f.clone(), m * e)).collect();
        Ok(RatFunc { num, den })
    }

    /// Decides `self == other` by cross-multiplication.
    pub fn eq_cross(&self, other: &RatFunc) -> bool {
        if !same_vars(self.vars(), other.vars()) {
            return false;
        }
        if self.den == other.den {
            return self.num == other.num;
        }
        let vars = self.vars().clone();
        let l = lcm(&self.den, &other.den);
        let mut cache = HashMap::new();
        let a = &self.num * &cofactor(&vars, &mut cache, &self.den, &l);
        let b = &other.num * &cofactor(&vars, &mut cache, &other.den, &l);
        a == b
    }

    /// Substitutes rational functions (over the same universe) for variables.
    pub fn specialize(&self, bindings: &[(usize, RatFunc)]) -> Result<RatFunc, AlgebraError> {
        let vars = self.vars().clone();
        let mut table: Vec<Option<&RatFunc>> = vec![None; vars.len()];
        for (v, r) in bindings {
            if !same_vars(&vars, r.vars()) {
                return Err(AlgebraError::VariableMismatch);
            }
            table[*v] = Some(r);
        }
        let bound = |k: &FactorKey| table.iter().enumerate().any(|(v, b)| b.is_some() && k.involves(v));
        let all_poly = table.iter().flatten().all(|r| r.is_polynomial());
        let poly_table: Vec<Option<MultiPoly>> = table
            .iter()
            .map(|b| b.and_then(|r| r.as_polynomial().cloned()))
            .collect();
        let subst = |p: &MultiPoly| -> RatFunc {
            if all_poly {
                RatFunc::from_poly(p.substitute(&poly_table))
            } else {
                substitute_rational(p, &table)
            }
        };
        let mut result = subst(&self.num);
        let mut den = Den::new();
        for (key, &e) in &self.den {
            if !bound(key) {
                *den.entry(key.clone()).or_insert(0) += e;
                continue;
            }
            let image = subst(&key.poly(&vars));
            if image.is_zero() {
                return Err(AlgebraError::PoleAtSpecialization);
            }
            match image.as_polynomial() {
                Some(p) => {
                    let candidates = match key {
                        FactorKey::Cyclo { order, base } => {
                            monomial_image(base, &table).map(|img| image_candidates(*order, &img))
                        }
                        _ => None,
                    };
                    let d = decompose(p, candidates.as_deref().unwrap_or(&[]))?;
                    let inv = Self::from_decomposition(&vars, d, true);
                    result = result.try_mul(&inv.pow(e as i32)?)?;
                }
                None => {
                    result = result.try_div(&image.pow(e as i32)?)?;
                }
            }
        }
        Ok(result.try_mul(&RatFunc {
            num: MultiPoly::one(&vars),
            den,
        })?)
    }

    /// [`RatFunc::specialize`] with bindings addressed by name.
    pub fn specialize_named(&self, bindings: &[(&str, RatFunc)]) -> Result<RatFunc, AlgebraError> {
        let idx: Vec<(usize, RatFunc)> = bindings
            .iter()
            .map(|(n, r)| {
                self.vars()
                    .index_of(n)
                    .map(|i| (i, r.clone()))
                    .ok_or(AlgebraError::VariableMismatch)
            })
            .collect::<Result<_, _>>()?;
        self.specialize(&idx)
    }

    /// Moves into a universe that contains every variable of this one, in the
    /// same relative order.
    pub fn embed(&self, target: &Vars) -> Result<RatFunc, AlgebraError> {
        if same_vars(self.vars(), target) {
            return Ok(self.clone());
        }
        let map: Vec<usize> = self
            .vars()
            .names()
            .iter()
            .map(|n| target.index_of(n).ok_or(AlgebraError::VariableMismatch))
            .collect::<Result<_, _>>()?;
        if map.windows(2).any(|w| w[0] > w[1]) {
            return Err(AlgebraError::VariableMismatch);
        }
        let num = self.num.embed(target)?;
        let mut den = Den::new();
        for (k, &e) in &self.den {
            let nk = match k {
                FactorKey::Var(v) => FactorKey::Var(map[*v]),
                FactorKey::Cyclo { order, base } => {
                    let mut nb = vec![0i32; target.len()];
                    for (i, &b) in base.iter().enumerate() {
                        nb[map[i]] = b;
                    }
                    FactorKey::cyclo(*order, &nb)
                }
                FactorKey::Opaque(_) => {
                    let (_, prim) = k.poly(self.vars()).embed(target)?.primitive_part();
                    FactorKey::Opaque(prim.integer_terms())
                }
            };
            den.insert(nk, e);
        }
        Ok(RatFunc { num, den })
    }

    pub fn eval_rational(&self, values: &[BigRat]) -> Result<BigRat, AlgebraError> {
        let mut d = BigRat::one();
        for (k, &e) in &self.den {
            let v = k.poly(self.vars()).eval_rational(values);
            if v.is_zero() {
                return Err(AlgebraError::PoleAtSpecialization);
            }
            d *= num_traits::pow(v, e as usize);
        }
        Ok(self.num.eval_rational(values) / d)
    }

    pub fn eval_complex(&self, point: &[num_complex::Complex64]) -> num_complex::Complex64 {
        let mut d = num_complex::Complex64::new(1.0, 0.0);
        for (k, &e) in &self.den {
            d *= k.poly(self.vars()).eval_complex(point).powi(e as i32);
        }
        self.num.eval_complex(point) / d
    }
}

/// Image exponent vector of a cyclotomic base under bindings that are all
/// unit-coefficient monomials.
fn monomial_image(base: &[i32], table: &[Option<&RatFunc>]) -> Option<Vec<i64>> {
    let mut img = vec![0i64; base.len()];
    for (v, &b) in base.iter().enumerate() {
        if b == 0 {
            continue;
        }
        match table[v] {
            None => img[v] += b as i64,
            Some(r) => {
                let p = r.as_polynomial()?;
                let [(m, c)] = p.terms() else { return None };
                if !c.is_one() {
                    return None;
                }
                for (w, &e) in m.exps().iter().enumerate() {
                    img[w] += b as i64 * e as i64;
                }
            }
        }
    }
    Some(img)
}

fn substitute_rational(p: &MultiPoly, table: &[Option<&RatFunc>]) -> RatFunc {
    let vars = p.vars().clone();
    let mut powers: Vec<Vec<RatFunc>> = table
        .iter()
        .map(|b| match b {
            Some(r) => vec![RatFunc::one(&vars), (*r).clone()],
            None => Vec::new(),
        })
        .collect();
    let mut terms = Vec::with_capacity(p.nterms());
    for (m, c) in p.terms() {
        let mut free = vec![0u32; vars.len()];
        let mut t = RatFunc::constant(&vars, c.clone());
        for (v, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if table[v].is_some() {
                let pw = &mut powers[v];
                while pw.len() <= e as usize {
                    let next = &pw[pw.len() - 1] * &pw[1];
                    pw.push(next);
                }
                t = &t * &pw[e as usize];
            } else {
                free[v] = e;
            }
        }
        let fm = Mono::from_exps(&free).expect("exponent overflow");
        terms.push(t.mul_poly(&MultiPoly::monomial(&vars, fm, BigRat::one())));
    }
    RatFunc::sum_in(&vars, &terms)
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        self.eq_cross(other)
    }
}

impl Eq for RatFunc {}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        if self.num.nterms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        write!(f, "/(")?;
        for (i, (k, &e)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            let p = k.poly(self.vars());
            let body = if p.nterms() > 1 { format!("({p})") } else { p.to_string() };
            if e > 1 {
                write!(f, "{body}^{e}")?;
            } else {
                write!(f, "{body}")?;
            }
        }
        write!(f, ")")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl std::ops::$tr<&RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: &RatFunc) -> RatFunc {
                self.$imp(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: RatFunc) -> RatFunc {
                (&self).$imp(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl std::ops::Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}

impl std::ops::Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VarSet;

    fn qt() -> (Vars, RatFunc, RatFunc) {
        let v = VarSet::qt();
        let q = RatFunc::named(&v, "q");
        let t = RatFunc::named(&v, "t");
        (v, q, t)
    }

    fn one(v: &Vars) -> RatFunc {
        RatFunc::one(v)
    }

    #[test]
    fn common_factor_equality() {
        let (v, q, _) = qt();
        let f = &(&q * &q - one(&v)) / &(&q - &one(&v));
        assert_eq!(f, &q + &one(&v));
        assert!(f.is_polynomial(), "cancellation should clear the denominator: {f}");
    }

    #[test]
    fn ratio_of_variables_is_not_inverted() {
        let (_, q, t) = qt();
        assert_ne!(&q / &t, &t / &q);
    }

    #[test]
    fn multiplying_by_a_unit_fraction() {
        let (v, q, t) = qt();
        let f = &(&one(&v) - &(&q * &t)) / &(&one(&v) - &q);
        let u = &(&one(&v) + &t) / &(&one(&v) + &t);
        assert_eq!(&f * &u, f);
    }

    #[test]
    fn specialization_examples() {
        let (v, q, t) = qt();
        let f = &(&one(&v) - &(&q * &t)) / &(&one(&v) - &q);
        let g = f.specialize_named(&[("q", t.clone())]).unwrap();
        assert_eq!(g, &one(&v) + &t);
        let h = &(&one(&v) + &t) / &(&one(&v) - &q);
        assert_eq!(
            h.specialize_named(&[("q", RatFunc::zero(&v))]).unwrap(),
            &one(&v) + &t
        );
        let pole = &one(&v) / &(&one(&v) - &q);
        assert_eq!(
            pole.specialize_named(&[("q", one(&v))]),
            Err(AlgebraError::PoleAtSpecialization)
        );
    }

    #[test]
    fn squaring_substitution_refactors_denominators() {
        let (v, q, t) = qt();
        let f = &(&one(&v) + &t) / &(&(&one(&v) - &q) * &(&one(&v) - &(&q * &t)));
        let g = f
            .specialize_named(&[("q", &q * &q), ("t", &t * &t)])
            .unwrap();
        let q2 = &q * &q;
        let t2 = &t * &t;
        let expect = &(&one(&v) + &t2) / &(&(&one(&v) - &q2) * &(&one(&v) - &(&q2 * &t2)));
        assert_eq!(g, expect);
        assert!(g
            .denominator_factors()
            .all(|(k, _)| matches!(k, FactorKey::Cyclo { .. })));
    }

    #[test]
    fn reciprocal_round_trip() {
        let (v, q, t) = qt();
        let f = &(&(&q * &q) + &(&t * &RatFunc::from_int(&v, 3))) / &(&one(&v) - &(&q * &t));
        assert_eq!(&f * &f.recip().unwrap(), one(&v));
        assert!(RatFunc::zero(&v).recip().is_err());
    }

    #[test]
    fn embedding_keeps_values() {
        let (v, q, t) = qt();
        let f = &(&one(&v) + &t) / &(&(&q - &t) * &q);
        let g = f.embed(&VarSet::qtb()).unwrap();
        let vals = [BigRat::from_integer(3.into()), BigRat::from_integer(5.into())];
        let valsb = [vals[0].clone(), vals[1].clone(), BigRat::from_integer(7.into())];
        assert_eq!(f.eval_rational(&vals).unwrap(), g.eval_rational(&valsb).unwrap());
    }
}
