//! Double-precision theta functions and shifted factorials.

use std::cell::Cell;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::algebra::BigRat;

/// Largest admissible `|p|`.
pub const PMAX: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("theta argument must be nonzero")]
    ZeroArgument,
    #[error("nome |p| = {0} must be below {PMAX}")]
    Nome(f64),
    #[error("pole: a denominator factor vanishes")]
    Pole,
    #[error("infinite product diverges for |q| = {0} >= 1")]
    Divergent(f64),
    #[error("non-finite value produced")]
    NonFinite,
}

/// Nome together with the truncation order of the product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaContext {
    p: Complex64,
    order: usize,
}

impl ThetaContext {
    pub fn new(p: Complex64) -> Result<Self, NumError> {
        let r = p.norm();
        if !(r < PMAX) || !p.re.is_finite() || !p.im.is_finite() {
            return Err(NumError::Nome(r));
        }
        let order = if r == 0.0 {
            1
        } else {
            20usize.max((-37.0 / r.log10()).ceil() as usize)
        };
        Ok(ThetaContext { p, order })
    }

    /// The trigonometric limit `p = 0`.
    pub fn trivial() -> Self {
        ThetaContext {
            p: Complex64::new(0.0, 0.0),
            order: 1,
        }
    }

    pub fn p(&self) -> Complex64 {
        self.p
    }

    /// Number of factor pairs kept from the infinite product.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.p == Complex64::new(0.0, 0.0)
    }

    /// `theta(x; p) = prod_{k>=0} (1 - x p^k)(1 - p^{k+1}/x)`.
    pub fn theta(&self, x: Complex64) -> Result<Complex64, NumError> {
        if x == Complex64::new(0.0, 0.0) {
            return Err(NumError::ZeroArgument);
        }
        let one = Complex64::new(1.0, 0.0);
        if self.is_trivial() {
            return Ok(one - x);
        }
        let xinv = x.inv();
        let mut pk = one;
        let mut acc = one;
        for _ in 0..self.order {
            acc *= (one - x * pk) * (one - pk * self.p * xinv);
            pk *= self.p;
        }
        finite(acc)
    }

    /// Product of thetas over a list of arguments.
    pub fn theta_prod(&self, xs: &[Complex64]) -> Result<Complex64, NumError> {
        xs.iter()
            .try_fold(Complex64::new(1.0, 0.0), |acc, &x| Ok(acc * self.theta(x)?))
    }

    /// `(a; q, p)_n`, with `(a)_{-n} = 1 / (a q^{-n})_n`.
    pub fn theta_poch(&self, a: Complex64, q: Complex64, n: i64) -> Result<Complex64, NumError> {
        let mut acc = Complex64::new(1.0, 0.0);
        if n >= 0 {
            let mut aq = a;
            for _ in 0..n {
                acc *= self.theta(aq)?;
                aq *= q;
            }
            Ok(acc)
        } else {
            let qinv = q.inv();
            let mut aq = a * qinv;
            for _ in 0..(-n) {
                acc *= self.theta(aq)?;
                aq *= qinv;
            }
            if acc == Complex64::new(0.0, 0.0) {
                return Err(NumError::Pole);
            }
            finite(acc.inv())
        }
    }

    /// Product of `(a_i; q, p)_n` over several `a_i`.
    pub fn theta_poch_prod(&self, a: &[Complex64], q: Complex64, n: i64) -> Result<Complex64, NumError> {
        a.iter()
            .try_fold(Complex64::new(1.0, 0.0), |acc, &x| Ok(acc * self.theta_poch(x, q, n)?))
    }
}

fn finite(z: Complex64) -> Result<Complex64, NumError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(NumError::NonFinite)
    }
}

/// Length of a q-shifted factorial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochLen {
    Finite(i64),
    Infinite,
}

/// `(a; q)_k` for finite `k` (negative via the infinite-product ratio) or `k = oo`.
pub fn qpoch(a: Complex64, q: Complex64, k: PochLen) -> Result<Complex64, NumError> {
    let one = Complex64::new(1.0, 0.0);
    match k {
        PochLen::Finite(n) if n >= 0 => {
            let mut acc = one;
            let mut aq = a;
            for _ in 0..n {
                acc *= one - aq;
                aq *= q;
            }
            Ok(acc)
        }
        PochLen::Finite(n) => {
            let qinv = q.inv();
            let mut acc = one;
            let mut aq = a * qinv;
            for _ in 0..(-n) {
                acc *= one - aq;
                aq *= qinv;
            }
            if acc == Complex64::new(0.0, 0.0) {
                return Err(NumError::Pole);
            }
            finite(acc.inv())
        }
        PochLen::Infinite => {
            if q.norm() >= 1.0 {
                return Err(NumError::Divergent(q.norm()));
            }
            let mut acc = one;
            let mut aq = a;
            for _ in 0..100_000 {
                if aq.norm() < 1e-18 {
                    break;
                }
                acc *= one - aq;
                aq *= q;
            }
            finite(acc)
        }
    }
}

/// `|L - R| / (1 + max(|L|, |R|))`.
pub fn residual(l: Complex64, r: Complex64) -> f64 {
    (l - r).norm() / (1.0 + l.norm().max(r.norm()))
}

/// Arithmetic with theta functions over a field: complex values at a nome
/// `p`, or exact rationals at `p = 0`. Every inversion passes through
/// [`ThetaField::inv`], which lets an implementation watch for small
/// denominators.
pub trait ThetaField {
    type V: Clone + std::fmt::Debug;

    fn int(&self, c: i64) -> Self::V;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn inv(&self, a: &Self::V) -> Result<Self::V, NumError>;
    fn theta(&self, x: &Self::V) -> Result<Self::V, NumError>;

    fn one(&self) -> Self::V {
        self.int(1)
    }

    fn neg(&self, a: &Self::V) -> Self::V {
        self.sub(&self.int(0), a)
    }

    fn div(&self, a: &Self::V, b: &Self::V) -> Result<Self::V, NumError> {
        let bi = self.inv(b)?;
        Ok(self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::V, k: i64) -> Result<Self::V, NumError> {
        let mut acc = self.one();
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, a);
        }
        if k < 0 {
            acc = self.inv(&acc)?;
        }
        Ok(acc)
    }

    fn prod(&self, xs: &[Self::V]) -> Self::V {
        xs.iter().fold(self.one(), |acc, x| self.mul(&acc, x))
    }

    /// `prod theta(num) / prod theta(den)`.
    fn theta_ratio(&self, num: &[Self::V], den: &[Self::V]) -> Result<Self::V, NumError> {
        let mut acc = self.one();
        for x in num {
            acc = self.mul(&acc, &self.theta(x)?);
        }
        for x in den {
            let th = self.theta(x)?;
            acc = self.div(&acc, &th)?;
        }
        Ok(acc)
    }

    /// `(a; q, p)_n`, with `(a)_{-n} = 1 / (a q^{-n})_n`.
    fn poch(&self, a: &Self::V, q: &Self::V, n: i64) -> Result<Self::V, NumError> {
        if n >= 0 {
            let mut acc = self.one();
            let mut x = a.clone();
            for _ in 0..n {
                acc = self.mul(&acc, &self.theta(&x)?);
                x = self.mul(&x, q);
            }
            Ok(acc)
        } else {
            let qn = self.pow(q, n)?;
            let start = self.mul(a, &qn);
            let d = self.poch(&start, q, -n)?;
            self.inv(&d)
        }
    }

    /// `prod (num_i)_n / prod (den_i)_n`.
    fn poch_ratio(&self, num: &[Self::V], den: &[Self::V], q: &Self::V, n: i64) -> Result<Self::V, NumError> {
        let mut acc = self.one();
        for a in num {
            let x = self.poch(a, q, n)?;
            acc = self.mul(&acc, &x);
        }
        for a in den {
            let x = self.poch(a, q, n)?;
            acc = self.div(&acc, &x)?;
        }
        Ok(acc)
    }
}

/// Complex values at a fixed nome, recording the smallest denominator met.
#[derive(Debug, Clone)]
pub struct Numeric {
    pub ctx: ThetaContext,
    min_den: Cell<f64>,
}

impl Numeric {
    /// Smallest `|denominator|` inverted since construction or the last reset.
    pub fn min_den(&self) -> f64 {
        self.min_den.get()
    }

    pub fn reset_min_den(&self) {
        self.min_den.set(f64::INFINITY);
    }

    pub fn ctx(&self) -> &ThetaContext {
        &self.ctx
    }

    pub fn new(ctx: ThetaContext) -> Self {
        Numeric {
            ctx,
            min_den: Cell::new(f64::INFINITY),
        }
    }
}

impl ThetaField for Numeric {
    type V = Complex64;

    fn int(&self, c: i64) -> Complex64 {
        Complex64::new(c as f64, 0.0)
    }

    fn add(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a + b
    }

    fn sub(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a - b
    }

    fn mul(&self, a: &Complex64, b: &Complex64) -> Complex64 {
        a * b
    }

    fn inv(&self, a: &Complex64) -> Result<Complex64, NumError> {
        let r = a.norm();
        self.min_den.set(self.min_den.get().min(r));
        if r == 0.0 {
            return Err(NumError::Pole);
        }
        finite(a.inv())
    }

    fn theta(&self, x: &Complex64) -> Result<Complex64, NumError> {
        self.ctx.theta(*x)
    }
}

/// Exact rationals at `p = 0`, where `theta(x) = 1 - x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactP0;

impl ThetaField for ExactP0 {
    type V = BigRat;

    fn int(&self, c: i64) -> BigRat {
        BigRat::from_integer(c.into())
    }

    fn add(&self, a: &BigRat, b: &BigRat) -> BigRat {
        a + b
    }

    fn sub(&self, a: &BigRat, b: &BigRat) -> BigRat {
        a - b
    }

    fn mul(&self, a: &BigRat, b: &BigRat) -> BigRat {
        a * b
    }

    fn inv(&self, a: &BigRat) -> Result<BigRat, NumError> {
        if a.is_zero() {
            return Err(NumError::Pole);
        }
        Ok(a.recip())
    }

    fn theta(&self, x: &BigRat) -> Result<BigRat, NumError> {
        if x.is_zero() {
            return Err(NumError::ZeroArgument);
        }
        Ok(BigRat::one() - x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_nome_is_linear() {
        let ctx = ThetaContext::trivial();
        assert_eq!(ctx.theta(c(2.0, 0.0)).unwrap(), c(-1.0, 0.0));
        let z = c(0.3, -1.7);
        assert_eq!(ctx.theta(z).unwrap(), c(1.0, 0.0) - z);
    }

    #[test]
    fn theta_vanishes_at_one() {
        for p in [0.0, 0.2, 0.45] {
            let ctx = ThetaContext::new(c(p, 0.1)).unwrap();
            assert_eq!(ctx.theta(c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn argument_and_nome_errors() {
        let ctx = ThetaContext::new(c(0.3, 0.0)).unwrap();
        assert_eq!(ctx.theta(c(0.0, 0.0)), Err(NumError::ZeroArgument));
        assert!(matches!(ThetaContext::new(c(0.95, 0.0)), Err(NumError::Nome(_))));
    }

    #[test]
    fn truncation_order_policy() {
        assert_eq!(ThetaContext::new(c(0.5, 0.0)).unwrap().order(), 123);
        assert_eq!(ThetaContext::new(c(1e-3, 0.0)).unwrap().order(), 20);
    }

    #[test]
    fn pochhammer_examples() {
        let ctx = ThetaContext::new(c(0.31, 0.2)).unwrap();
        let a = c(0.7, 1.3);
        let q = c(0.9, -0.4);
        assert_eq!(ctx.theta_poch(a, q, 0).unwrap(), c(1.0, 0.0));
        assert_eq!(ctx.theta_poch(a, q, 1).unwrap(), ctx.theta(a).unwrap());
        let lhs = ctx.theta_poch(a, q, 2).unwrap() * ctx.theta_poch(a * q * q, q, 3).unwrap();
        let rhs = ctx.theta_poch(a, q, 5).unwrap();
        assert!(residual(lhs, rhs) < 1e-12);
    }

    #[test]
    fn qpoch_examples() {
        let a = c(0.4, 0.2);
        let q = c(0.5, 0.1);
        let m1 = qpoch(a, q, PochLen::Finite(-1)).unwrap();
        assert!((m1 - (c(1.0, 0.0) - a / q).inv()).norm() < 1e-13);
        let k3 = qpoch(q, q, PochLen::Finite(3)).unwrap();
        let direct = (c(1.0, 0.0) - q) * (c(1.0, 0.0) - q * q) * (c(1.0, 0.0) - q * q * q);
        assert!((k3 - direct).norm() < 1e-15);
        for k in 1..5 {
            assert_eq!(qpoch(c(1.0, 0.0), q, PochLen::Finite(k)).unwrap(), c(0.0, 0.0));
        }
        assert!(matches!(qpoch(a, c(1.2, 0.0), PochLen::Infinite), Err(NumError::Divergent(_))));
        // (a;q)_k = (a;q)_oo / (a q^k; q)_oo
        let inf = qpoch(a, q, PochLen::Infinite).unwrap();
        let tail = qpoch(a * q.powi(3), q, PochLen::Infinite).unwrap();
        let k = qpoch(a, q, PochLen::Finite(3)).unwrap();
        assert!((inf / tail - k).norm() < 1e-14);
    }
}
