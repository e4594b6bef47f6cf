//! Products of binomials `(1 - eps q^a t^b)^e` with a monomial prefactor.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::cyclo::{binomial_factors, FactorKey};
use super::poly::{Mono, MultiPoly, VarSet, Vars};
use super::ratfunc::RatFunc;
use super::{AlgebraError, BigRat};

/// The binomial `1 - eps * q^a * t^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binomial {
    pub eps: i8,
    pub a: i32,
    pub b: i32,
}

impl Binomial {
    pub fn new(eps: i8, a: i32, b: i32) -> Result<Self, AlgebraError> {
        assert!(eps == 1 || eps == -1, "sign must be +1 or -1");
        if eps == 1 && a == 0 && b == 0 {
            return Err(AlgebraError::DegenerateFactor);
        }
        Ok(Binomial { eps, a, b })
    }
}

/// `coeff * q^qexp * t^texp * prod (1 - eps q^a t^b)^e`. A zero `coeff`
/// denotes the zero element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredQT {
    coeff: BigRat,
    qexp: i64,
    texp: i64,
    factors: BTreeMap<Binomial, i32>,
}

impl Default for FactoredQT {
    fn default() -> Self {
        Self::one()
    }
}

impl FactoredQT {
    pub fn one() -> Self {
        Self::constant(BigRat::one())
    }

    pub fn zero() -> Self {
        Self::constant(BigRat::zero())
    }

    pub fn constant(c: BigRat) -> Self {
        FactoredQT {
            coeff: c,
            qexp: 0,
            texp: 0,
            factors: BTreeMap::new(),
        }
    }

    pub fn monomial(c: BigRat, qexp: i64, texp: i64) -> Self {
        FactoredQT {
            coeff: c,
            qexp,
            texp,
            factors: BTreeMap::new(),
        }
    }

    /// `(1 - eps q^a t^b)^e`.
    pub fn binomial(eps: i8, a: i32, b: i32, e: i32) -> Result<Self, AlgebraError> {
        let mut f = Self::one();
        f.push(Binomial::new(eps, a, b)?, e);
        Ok(f)
    }

    /// Builds from `(eps, a, b, e)` tuples.
    pub fn from_factors<I>(items: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (i8, i32, i32, i32)>,
    {
        let mut f = Self::one();
        for (eps, a, b, e) in items {
            f.push(Binomial::new(eps, a, b)?, e);
        }
        Ok(f)
    }

    fn push(&mut self, bin: Binomial, e: i32) {
        if e == 0 {
            return;
        }
        if bin.a == 0 && bin.b == 0 {
            // 1 + 1 = 2
            self.coeff *= num_traits::pow(BigRat::from_integer(2.into()), e.unsigned_abs() as usize)
                .pow(e.signum());
            return;
        }
        let slot = self.factors.entry(bin).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.factors.remove(&bin);
        }
    }

    /// `(eps q^a t^b; q^sq t^st)_k`, with negative `k` meaning
    /// `1 / prod_{j=1}^{-k} (1 - eps q^{a - j sq} t^{b - j st})`.
    /// A unit factor in the numerator gives zero; in the denominator it is
    /// an error.
    pub fn poch(eps: i8, a: i32, b: i32, sq: i32, st: i32, k: i64) -> Result<Self, AlgebraError> {
        let mut f = Self::one();
        if k >= 0 {
            for j in 0..k as i32 {
                match Binomial::new(eps, a + j * sq, b + j * st) {
                    Ok(bin) => f.push(bin, 1),
                    // a vanishing factor in the numerator
                    Err(_) => return Ok(Self::zero()),
                }
            }
        } else {
            for j in 1..=(-k) as i32 {
                f.push(Binomial::new(eps, a - j * sq, b - j * st)?, -1);
            }
        }
        Ok(f)
    }

    /// `(eps q^a t^b; q)_k`.
    pub fn qpoch(eps: i8, a: i32, b: i32, k: i64) -> Result<Self, AlgebraError> {
        Self::poch(eps, a, b, 1, 0, k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn coeff(&self) -> &BigRat {
        &self.coeff
    }

    pub fn monomial_exponents(&self) -> (i64, i64) {
        (self.qexp, self.texp)
    }

    pub fn factors(&self) -> impl Iterator<Item = (Binomial, i32)> + '_ {
        self.factors.iter().map(|(b, &e)| (*b, e))
    }

    pub fn mul(&self, other: &FactoredQT) -> FactoredQT {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = self.clone();
        out.coeff *= &other.coeff;
        out.qexp += other.qexp;
        out.texp += other.texp;
        for (b, &e) in &other.factors {
            out.push(*b, e);
        }
        out
    }

    pub fn inv(&self) -> Result<FactoredQT, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(FactoredQT {
            coeff: self.coeff.recip(),
            qexp: -self.qexp,
            texp: -self.texp,
            factors: self.factors.iter().map(|(b, &e)| (*b, -e)).collect(),
        })
    }

    pub fn div(&self, other: &FactoredQT) -> Result<FactoredQT, AlgebraError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i32) -> Result<FactoredQT, AlgebraError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let e = k.unsigned_abs();
        Ok(FactoredQT {
            coeff: num_traits::pow(base.coeff.clone(), e as usize),
            qexp: base.qexp * e as i64,
            texp: base.texp * e as i64,
            factors: base.factors.iter().map(|(b, &m)| (*b, m * e as i32)).collect(),
        })
    }

    pub fn scale(&self, c: &BigRat) -> FactoredQT {
        let mut out = self.clone();
        out.coeff *= c;
        out
    }

    /// Exchanges the roles of `q` and `t`.
    pub fn swap_qt(&self) -> FactoredQT {
        FactoredQT {
            coeff: self.coeff.clone(),
            qexp: self.texp,
            texp: self.qexp,
            factors: self
                .factors
                .iter()
                .map(|(b, &e)| (Binomial { eps: b.eps, a: b.b, b: b.a }, e))
                .collect(),
        }
    }

    /// Substitutes `q -> q^k`, `t -> t^k`.
    pub fn dilate(&self, k: i32) -> FactoredQT {
        assert!(k > 0);
        FactoredQT {
            coeff: self.coeff.clone(),
            qexp: self.qexp * k as i64,
            texp: self.texp * k as i64,
            factors: self
                .factors
                .iter()
                .map(|(b, &e)| (Binomial { eps: b.eps, a: b.a * k, b: b.b * k }, e))
                .collect(),
        }
    }

    /// Exact value at rational `q`, `t`.
    pub fn eval(&self, q: &BigRat, t: &BigRat) -> Result<BigRat, AlgebraError> {
        let mono = |a: i64, b: i64| -> Result<BigRat, AlgebraError> {
            let pw = |x: &BigRat, e: i64| -> Result<BigRat, AlgebraError> {
                if e < 0 && x.is_zero() {
                    return Err(AlgebraError::PoleAtSpecialization);
                }
                Ok(num_traits::pow(x.clone(), e.unsigned_abs() as usize).pow(e.signum() as i32))
            };
            let qa = if a == 0 { BigRat::one() } else { pw(q, a)? };
            let tb = if b == 0 { BigRat::one() } else { pw(t, b)? };
            Ok(qa * tb)
        };
        let mut v = self.coeff.clone() * mono(self.qexp, self.texp)?;
        for (b, &e) in &self.factors {
            let x = BigRat::one() - BigRat::from_integer(b.eps.into()) * mono(b.a as i64, b.b as i64)?;
            if x.is_zero() {
                if e < 0 {
                    return Err(AlgebraError::PoleAtSpecialization);
                }
                return Ok(BigRat::zero());
            }
            v *= num_traits::pow(x, e.unsigned_abs() as usize).pow(e.signum());
        }
        Ok(v)
    }

    /// Expansion into `Q(q,t)` with the standard universe.
    pub fn to_ratfunc(&self) -> RatFunc {
        self.to_ratfunc_in(&VarSet::qt(), 0, 1)
    }

    /// Expansion into any universe, placing `q` and `t` at the given indices.
    pub fn to_ratfunc_in(&self, vars: &Vars, qi: usize, ti: usize) -> RatFunc {
        if self.is_zero() {
            return RatFunc::zero(vars);
        }
        let n = vars.len();
        let mut coeff = self.coeff.clone();
        let mut laurent = vec![0i64; n];
        laurent[qi] += self.qexp;
        laurent[ti] += self.texp;
        let mut mult: BTreeMap<FactorKey, i64> = BTreeMap::new();
        for (b, &e) in &self.factors {
            let mut x = vec![0i64; n];
            x[qi] = b.a as i64;
            x[ti] = b.b as i64;
            let (sign, keys) = binomial_factors(&x, b.eps);
            // 1 - eps X = sign * prod F / X_-
            if sign < 0 && e % 2 != 0 {
                coeff = -coeff;
            }
            for v in 0..n {
                laurent[v] += e as i64 * x[v].min(0);
            }
            for k in keys {
                *mult.entry(k).or_insert(0) += e as i64;
            }
        }
        let mut num = MultiPoly::constant(vars, coeff);
        let mut den = BTreeMap::new();
        let pos: Vec<u32> = laurent.iter().map(|&e| u32::try_from(e.max(0)).expect("exponent overflow")).collect();
        num = num.mul_term(&Mono::from_exps(&pos).expect("exponent overflow"), &BigRat::one());
        for (v, &e) in laurent.iter().enumerate() {
            if e < 0 {
                den.insert(FactorKey::Var(v), u32::try_from(-e).expect("exponent overflow"));
            }
        }
        for (k, e) in mult {
            if e > 0 {
                num = &num * &k.poly(vars).pow(e as u32);
            } else if e < 0 {
                den.insert(k, (-e) as u32);
            }
        }
        RatFunc::from_parts_unreduced(num, den)
    }
}

impl std::ops::Mul for &FactoredQT {
    type Output = FactoredQT;
    fn mul(self, rhs: &FactoredQT) -> FactoredQT {
        FactoredQT::mul(self, rhs)
    }
}

impl std::ops::Mul for FactoredQT {
    type Output = FactoredQT;
    fn mul(self, rhs: FactoredQT) -> FactoredQT {
        FactoredQT::mul(&self, &rhs)
    }
}

impl fmt::Display for FactoredQT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        if self.qexp != 0 {
            write!(f, "*q^{}", self.qexp)?;
        }
        if self.texp != 0 {
            write!(f, "*t^{}", self.texp)?;
        }
        for (b, e) in &self.factors {
            let sign = if b.eps > 0 { '-' } else { '+' };
            write!(f, "*(1{sign}q^{}t^{})^{}", b.a, b.b, e)?;
        }
        Ok(())
    }
}
