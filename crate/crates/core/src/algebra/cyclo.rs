//! Cyclotomic building blocks for factored denominators.
//!
//! A binomial `1 - eps * X` in a Laurent monomial `X` splits over Q into
//! homogenised cyclotomic polynomials `F_{d,y} = Y_-^phi(d) * Phi_d(Y_+/Y_-)`
//! where `y` is the primitive exponent vector of `X` and `Y_+`, `Y_-` are its
//! positive and negative parts. These are the only denominator factors the
//! symmetric-function code produces, so tracking them by key keeps rational
//! functions small without any multivariate gcd.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use parking_lot::RwLock;
use smallvec::SmallVec;

use super::poly::{Mono, MultiPoly, Vars};
use super::{AlgebraError, BigRat};

/// Irreducible-ish denominator factor. Irreducibility is never relied on for
/// correctness; keys only need to identify a fixed polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FactorKey {
    /// A single variable.
    Var(usize),
    /// `F_{order,base}` with `base` primitive and its first nonzero entry positive.
    Cyclo { order: u32, base: SmallVec<[i32; 4]> },
    /// Any other polynomial: primitive, integral, positive leading coefficient.
    Opaque(Vec<(Mono, BigInt)>),
}

pub fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn divisors(n: u32) -> Vec<u32> {
    let mut out: Vec<u32> = (1..=n).filter(|d| n % d == 0).collect();
    out.sort_unstable();
    out
}

/// Coefficients of the cyclotomic polynomial `Phi_d`, lowest degree first.
pub fn cyclotomic(d: u32) -> Arc<Vec<i64>> {
    static CACHE: RwLock<Option<HashMap<u32, Arc<Vec<i64>>>>> = RwLock::new(None);
    if let Some(c) = CACHE.read().as_ref().and_then(|m| m.get(&d)) {
        return c.clone();
    }
    assert!(d >= 1);
    // x^d - 1 divided by Phi_e for every proper divisor e.
    let mut num = vec![0i64; d as usize + 1];
    num[0] = -1;
    num[d as usize] = 1;
    for e in divisors(d) {
        if e == d {
            continue;
        }
        let den = cyclotomic(e);
        num = poly_div_monic(&num, &den);
    }
    let arc = Arc::new(num);
    CACHE
        .write()
        .get_or_insert_with(HashMap::new)
        .insert(d, arc.clone());
    arc
}

fn poly_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn];
        quot[k] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[k + j] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Splits a Laurent exponent vector into its gcd and canonically oriented
/// primitive direction. Returns `(g, y, flipped)` with `x = g * y` when not
/// flipped and `x = -g * y` when flipped.
pub(crate) fn primitive_direction(x: &[i64]) -> (u64, SmallVec<[i32; 4]>, bool) {
    let g = x.iter().fold(0i64, |acc, &v| acc.gcd(&v)) as u64;
    assert!(g > 0, "zero exponent vector has no direction");
    let first = x.iter().find(|&&v| v != 0).copied().unwrap_or(0);
    let flipped = first < 0;
    let y = x
        .iter()
        .map(|&v| {
            let s = v / g as i64;
            i32::try_from(if flipped { -s } else { s }).expect("exponent out of range")
        })
        .collect();
    (g, y, flipped)
}

impl FactorKey {
    pub fn cyclo(order: u32, base: &[i32]) -> FactorKey {
        debug_assert!(base.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0));
        FactorKey::Cyclo {
            order,
            base: SmallVec::from_slice(base),
        }
    }

    /// The polynomial this key denotes in the given universe.
    pub fn poly(&self, vars: &Vars) -> MultiPoly {
        match self {
            FactorKey::Var(v) => MultiPoly::var(vars, *v),
            FactorKey::Cyclo { order, base } => {
                let coeffs = cyclotomic(*order);
                let n = vars.len();
                let plus: Vec<u32> = base.iter().map(|&e| e.max(0) as u32).collect();
                let minus: Vec<u32> = base.iter().map(|&e| (-e).max(0) as u32).collect();
                let phi = coeffs.len() as u32 - 1;
                let terms = coeffs.iter().enumerate().filter(|(_, c)| **c != 0).map(|(k, &c)| {
                    let k = k as u32;
                    let exps: Vec<u32> = (0..n).map(|v| plus[v] * k + minus[v] * (phi - k)).collect();
                    (
                        Mono::from_exps(&exps).expect("cyclotomic exponent overflow"),
                        BigRat::from_integer(c.into()),
                    )
                });
                MultiPoly::from_terms(vars, terms)
            }
            FactorKey::Opaque(terms) => MultiPoly::from_terms(
                vars,
                terms
                    .iter()
                    .map(|(m, c)| (m.clone(), BigRat::from_integer(c.clone()))),
            ),
        }
    }

    pub fn involves(&self, v: usize) -> bool {
        match self {
            FactorKey::Var(w) => *w == v,
            FactorKey::Cyclo { base, .. } => base[v] != 0,
            FactorKey::Opaque(terms) => terms.iter().any(|(m, _)| m.exps()[v] > 0),
        }
    }

    /// Unit-modulus points on the zero set of a cyclotomic factor.
    pub(crate) fn probes(&self) -> Vec<Vec<Complex64>> {
        let FactorKey::Cyclo { order, base } = self else {
            return Vec::new();
        };
        const ANGLES: [f64; 8] = [
            0.618_033_988_7,
            0.414_213_562_4,
            0.732_050_807_6,
            0.236_067_977_5,
            0.645_751_311_1,
            0.162_277_660_2,
            0.316_624_790_4,
            0.872_983_346_2,
        ];
        let pivot = base.iter().position(|&e| e != 0).expect("nonzero base");
        let tau = std::f64::consts::TAU;
        (0..2)
            .map(|j| {
                let mut theta: Vec<f64> = (0..base.len())
                    .map(|u| tau * ANGLES[(u + 3 * j) % ANGLES.len()] * (1.0 + j as f64 * 0.37))
                    .collect();
                let rest: f64 = (0..base.len())
                    .filter(|&u| u != pivot)
                    .map(|u| base[u] as f64 * theta[u])
                    .sum();
                theta[pivot] = (tau / *order as f64 - rest) / base[pivot] as f64;
                theta.iter().map(|&a| Complex64::from_polar(1.0, a)).collect()
            })
            .collect()
    }
}

/// Floating-point copy of a polynomial used to screen candidate divisors.
pub(crate) struct Screen {
    terms: Vec<(SmallVec<[u32; 4]>, f64)>,
    scale: f64,
}

impl Screen {
    pub fn new(p: &MultiPoly) -> Self {
        let terms = p.f64_terms();
        let scale = terms.iter().map(|t| t.1.abs()).sum::<f64>();
        Screen { terms, scale }
    }

    fn eval(&self, point: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut z = Complex64::new(*c, 0.0);
                for (v, &k) in e.iter().enumerate() {
                    if k > 0 {
                        z *= point[v].powi(k as i32);
                    }
                }
                z
            })
            .sum()
    }

    /// `false` means the factor certainly does not divide; `true` means an
    /// exact division is worth attempting.
    pub fn may_vanish(&self, key: &FactorKey) -> bool {
        match key {
            FactorKey::Var(v) => self.terms.iter().all(|(e, _)| e[*v] > 0),
            FactorKey::Cyclo { .. } => key
                .probes()
                .iter()
                .all(|pt| self.eval(pt).norm() <= 1e-8 * self.scale.max(f64::MIN_POSITIVE)),
            FactorKey::Opaque(_) => true,
        }
    }
}

/// A polynomial written as `coeff * x^mono * prod key^mult`.
#[derive(Debug, Clone)]
pub(crate) struct Decomposition {
    pub coeff: BigRat,
    pub mono: Vec<u32>,
    pub factors: Vec<(FactorKey, u32)>,
}

/// Cyclotomic factors that may divide `p`. Every factor `F_{d,e}` of `p`
/// contributes an edge parallel to `e` to its Newton polytope, and edges join
/// terms of `p`, so pairwise exponent differences cover all directions.
pub(crate) fn cyclotomic_candidates(p: &MultiPoly) -> Vec<FactorKey> {
    const MAX_TERMS: usize = 200;
    let terms = p.terms();
    if terms.len() < 2 || terms.len() > MAX_TERMS {
        return Vec::new();
    }
    let n = p.vars().len();
    let span: Vec<i64> = (0..n)
        .map(|v| p.degree_in(v) as i64 - p.min_degree_in(v) as i64)
        .collect();
    let mut dirs = std::collections::BTreeSet::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let diff: Vec<i64> = (0..n)
                .map(|v| terms[i].0.exps()[v] as i64 - terms[j].0.exps()[v] as i64)
                .collect();
            let (_, y, _) = primitive_direction(&diff);
            dirs.insert(y);
        }
    }
    let screen = Screen::new(p);
    let mut out = Vec::new();
    for y in dirs {
        let reach = (0..n)
            .filter(|&v| y[v] != 0)
            .map(|v| span[v] / (y[v] as i64).abs())
            .min()
            .unwrap_or(0);
        for d in 1..=(5 * reach as u32 + 6) {
            if euler_phi(d) as i64 > reach {
                continue;
            }
            let key = FactorKey::Cyclo { order: d, base: y.clone() };
            if screen.may_vanish(&key) {
                out.push(key);
            }
        }
    }
    out
}

/// Factors `p` by trial division against `candidates`; what remains becomes
/// a single opaque factor.
pub(crate) fn decompose(p: &MultiPoly, candidates: &[FactorKey]) -> Result<Decomposition, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::DivisionByZero);
    }
    let vars = p.vars().clone();
    let n = vars.len();
    let mono: Vec<u32> = (0..n).map(|v| p.min_degree_in(v)).collect();
    let mut rest = p
        .div_mono(&Mono::from_exps(&mono).expect("content monomial"))
        .expect("content divides");
    let mut factors = Vec::new();
    for key in candidates {
        if rest.is_constant() {
            break;
        }
        let fp = key.poly(&vars);
        let mut k = 0;
        while let Some(q) = rest.div_exact(&fp) {
            rest = q;
            k += 1;
        }
        if k > 0 {
            factors.push((key.clone(), k));
        }
    }
    let (coeff, prim) = rest.primitive_part();
    if !prim.is_constant() {
        factors.push((FactorKey::Opaque(prim.integer_terms()), 1));
    }
    Ok(Decomposition { coeff, mono, factors })
}

/// Cyclotomic factors of `1 - eps * X` for a nonzero Laurent exponent vector,
/// together with the sign `c` in `X_- - eps * X_+ = c * prod F`.
pub(crate) fn binomial_factors(x: &[i64], eps: i8) -> (i8, Vec<FactorKey>) {
    let (g, y, flipped) = primitive_direction(x);
    let g32 = u32::try_from(g).expect("binomial exponent too large");
    let orders: Vec<u32> = if eps > 0 {
        divisors(g32)
    } else {
        divisors(2 * g32).into_iter().filter(|d| g32 % d != 0).collect()
    };
    let sign = if eps > 0 && !flipped { -1 } else { 1 };
    let keys = orders
        .into_iter()
        .map(|d| FactorKey::Cyclo {
            order: d,
            base: y.clone(),
        })
        .collect();
    (sign, keys)
}

/// Candidate factors of `F_{d,e}` after a substitution sending its base
/// monomial to `Y^k` for the primitive direction `y`.
pub(crate) fn image_candidates(order: u32, image: &[i64]) -> Vec<FactorKey> {
    if image.iter().all(|&v| v == 0) {
        return Vec::new();
    }
    let (g, y, _) = primitive_direction(image);
    let g = u32::try_from(g).expect("exponent too large");
    let dg = order.checked_mul(g).expect("cyclotomic order overflow");
    divisors(dg)
        .into_iter()
        .filter(|m| m / m.gcd(&g) == order)
        .map(|m| FactorKey::Cyclo {
            order: m,
            base: y.clone(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VarSet;
    use num_traits::One;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(*cyclotomic(1), vec![-1, 1]);
        assert_eq!(*cyclotomic(2), vec![1, 1]);
        assert_eq!(*cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic(12), vec![1, 0, -1, 0, 1]);
        for d in 1..40 {
            assert_eq!(cyclotomic(d).len() as u32 - 1, euler_phi(d));
        }
    }

    #[test]
    fn binomial_splits_into_its_factors() {
        let v = VarSet::qt();
        for (x, eps) in [([2i64, 4], 1i8), ([-3, 0], 1), ([1, -2], -1), ([0, 6], -1), ([-2, 2], 1)] {
            let (sign, keys) = binomial_factors(&x, eps);
            let plus: Vec<u32> = x.iter().map(|&e| e.max(0) as u32).collect();
            let minus: Vec<u32> = x.iter().map(|&e| (-e).max(0) as u32).collect();
            let b = &MultiPoly::monomial(&v, Mono::from_exps(&minus).unwrap(), BigRat::one())
                - &MultiPoly::monomial(&v, Mono::from_exps(&plus).unwrap(), BigRat::from_integer(eps.into()));
            let mut prod = MultiPoly::from_int(&v, sign as i64);
            for k in &keys {
                prod = &prod * &k.poly(&v);
            }
            assert_eq!(prod, b, "x={x:?} eps={eps}");
        }
    }

    #[test]
    fn probes_lie_on_zero_sets() {
        let v = VarSet::new(["a", "b", "c"]);
        let key = FactorKey::cyclo(6, &[2, -1, 3]);
        let s = Screen::new(&key.poly(&v));
        assert!(s.may_vanish(&key));
        assert!(!s.may_vanish(&FactorKey::cyclo(3, &[2, -1, 3])));
    }

    #[test]
    fn image_of_cyclotomic_under_squaring() {
        // Phi_3(y^2) = Phi_3(y) Phi_6(y), Phi_4(y^2) = Phi_8(y).
        let orders = |d, g: i64| -> Vec<u32> {
            image_candidates(d, &[g, 0])
                .into_iter()
                .map(|k| match k {
                    FactorKey::Cyclo { order, .. } => order,
                    _ => unreachable!(),
                })
                .collect()
        };
        assert_eq!(orders(3, 2), vec![3, 6]);
        assert_eq!(orders(4, 2), vec![8]);
        assert_eq!(orders(1, 3), vec![1, 3]);
    }
}
