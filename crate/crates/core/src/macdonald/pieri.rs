//! Cell products `b_lambda^{+-}`, the series `g_r`, and Pieri coefficients by
//! closed formula and by extraction from products.

use std::collections::BTreeMap;

use crate::algebra::{FactoredQT, RatFunc, VarSet, Vars};
use crate::partitions::{partitions_of, strip_test, Partition, PartitionError, StripKind};

use super::msym::msym_product;
use super::polys::{expand_in_p, macdonald_P, macdonald_Q, MacdonaldCache};
use super::{MacdonaldError, SymSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn eps(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// `prod_s (1 -+ q^{a(s)} t^{l(s)+1}) / (1 - q^{a(s)+1} t^{l(s)})`.
pub fn b_pm_factored(lambda: &Partition, sign: Sign) -> FactoredQT {
    let items = lambda
        .arms_legs()
        .into_iter()
        .flat_map(|(a, l)| [(sign.eps(), a as i32, l as i32 + 1, 1), (1, a as i32 + 1, l as i32, -1)]);
    FactoredQT::from_factors(items).expect("cell factors are never 1 - 1")
}

pub fn b_pm(lambda: &Partition, sign: Sign) -> RatFunc {
    b_pm_factored(lambda, sign).to_ratfunc()
}

fn poch(eps: i8, a: i32, b: i32, sq: i32, st: i32, k: i64) -> FactoredQT {
    FactoredQT::poch(eps, a, b, sq, st, k).expect("no unit factor in a denominator")
}

fn div(a: &FactoredQT, b: &FactoredQT) -> FactoredQT {
    a.div(b).expect("nonzero divisor")
}

/// `b^{+-}_lambda` from the row-product form valid for any `n >= l(lambda)`.
pub fn b_pm_rows(lambda: &Partition, sign: Sign, n: usize) -> Result<FactoredQT, MacdonaldError> {
    if n < lambda.len() {
        return Err(MacdonaldError::Precondition(format!("n = {n} < l({lambda})")));
    }
    let e = sign.eps();
    let l = lambda.padded(n);
    let mut f = FactoredQT::one();
    for i in 1..=n {
        let k = l[i - 1] as i64;
        let num = poch(e, 0, (n - i + 1) as i32, 1, 0, k);
        let den = poch(1, 1, (n - i) as i32, 1, 0, k);
        f = f.mul(&div(&num, &den));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let k = (l[i - 1] - l[j - 1]) as i64;
            let d = (j - i) as i32;
            let num = poch(e, 0, d, 1, 0, k).mul(&poch(1, 1, d, 1, 0, k));
            let den = poch(e, 0, d + 1, 1, 0, k).mul(&poch(1, 1, d - 1, 1, 0, k));
            f = f.mul(&div(&num, &den));
        }
    }
    Ok(f)
}

/// `b^-_{lambda'}` from the row-product form in base `t`.
pub fn b_minus_conj_rows(lambda: &Partition, n: usize) -> Result<FactoredQT, MacdonaldError> {
    if n < lambda.len() {
        return Err(MacdonaldError::Precondition(format!("n = {n} < l({lambda})")));
    }
    let l = lambda.padded(n);
    let mut f = FactoredQT::one();
    for i in 1..=n {
        let k = l[i - 1] as i64;
        let num = poch(-1, (n - i) as i32, 1, 0, 1, k);
        let den = poch(1, (n - i + 1) as i32, 0, 0, 1, k);
        f = f.mul(&div(&num, &den));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let k = (l[i - 1] - l[j - 1]) as i64;
            let d = (j - i) as i32;
            let num = poch(1, d + 1, 0, 0, 1, k).mul(&poch(-1, d - 1, 1, 0, 1, k));
            let den = poch(1, d, 0, 0, 1, k).mul(&poch(-1, d, 1, 0, 1, k));
            f = f.mul(&div(&num, &den));
        }
    }
    Ok(f)
}

/// `b^-_{lambda'}(q,t) = b^-_lambda(t,q) / b_lambda(t^2,q^2)`.
pub fn b_minus_conj_swap(lambda: &Partition) -> FactoredQT {
    let num = b_pm_factored(lambda, Sign::Minus).swap_qt();
    let den = b_pm_factored(lambda, Sign::Plus).swap_qt().dilate(2);
    div(&num, &den)
}

/// The independent expressions for `b^-`.
#[derive(Debug, Clone)]
pub struct BMinusForms {
    /// `b^-_lambda` by the row-product form.
    pub via_rows: RatFunc,
    /// `b^-_{lambda'}` by the row-product form in base `t`.
    pub conj_via_rows: RatFunc,
    /// `b^-_{lambda'}` by exchanging `q` and `t`.
    pub conj_via_swap: RatFunc,
}

pub fn b_minus_forms(lambda: &Partition, n: usize) -> Result<BMinusForms, MacdonaldError> {
    Ok(BMinusForms {
        via_rows: b_pm_rows(lambda, Sign::Minus, n)?.to_ratfunc(),
        conj_via_rows: b_minus_conj_rows(lambda, n)?.to_ratfunc(),
        conj_via_swap: b_minus_conj_swap(lambda).to_ratfunc(),
    })
}

/// `g_r` as the coefficient of `y^r` in `prod_i (t x_i y; q)_oo / (x_i y; q)_oo`,
/// each factor expanded by the q-binomial theorem.
pub fn g_r(r: u32, n: usize, maxdeg: u32) -> Result<SymSeries, MacdonaldError> {
    g_r_in(&VarSet::qt(), r, n, maxdeg)
}

pub(crate) fn g_r_in(vars: &Vars, r: u32, n: usize, maxdeg: u32) -> Result<SymSeries, MacdonaldError> {
    if r > maxdeg {
        return Err(MacdonaldError::Precondition(format!("r = {r} exceeds the degree bound {maxdeg}")));
    }
    let (qi, ti) = super::qt_indices(vars)?;
    // (t;q)_k / (q;q)_k is the coefficient of z^k in (tz;q)_oo/(z;q)_oo; the
    // coefficient of x^lambda y^r in the product is the product over rows.
    let single: Vec<FactoredQT> = (0..=r as i64)
        .map(|k| div(&poch(1, 0, 1, 1, 0, k), &poch(1, 1, 0, 1, 0, k)))
        .collect();
    let mut s = SymSeries::zero(vars, n, maxdeg);
    for lambda in partitions_of(r, n) {
        let mut c = FactoredQT::one();
        for &p in lambda.parts() {
            c = c.mul(&single[p as usize]);
        }
        s.insert(lambda, c.to_ratfunc_in(vars, qi, ti));
    }
    Ok(s)
}

fn strip_error(lambda: &Partition, mu: &Partition, kind: StripKind) -> MacdonaldError {
    PartitionError::NotAStrip(lambda.clone(), mu.clone(), kind).into()
}

/// `psi'_{lambda/mu}` as a factored product over pairs `i < j` with
/// `lambda_i = mu_i` and `lambda_j = mu_j + 1`.
pub fn psi_prime_factored(lambda: &Partition, mu: &Partition) -> Result<FactoredQT, MacdonaldError> {
    if strip_test(lambda, mu, StripKind::Vertical).is_none() {
        return Err(strip_error(lambda, mu, StripKind::Vertical));
    }
    let n = lambda.len();
    let l = lambda.padded(n);
    let m = mu.padded(n);
    let mut f = FactoredQT::one();
    for i in 0..n {
        if l[i] != m[i] {
            continue;
        }
        for j in i + 1..n {
            if l[j] != m[j] + 1 {
                continue;
            }
            let d = (j - i) as i32;
            let a = (m[i] - m[j]) as i32;
            let b = (l[i] - l[j]) as i32;
            let g = FactoredQT::from_factors([(1, a, d - 1, 1), (1, b, d + 1, 1), (1, a, d, -1), (1, b, d, -1)])
                .expect("strip pairs give proper factors");
            f = f.mul(&g);
        }
    }
    Ok(f)
}

pub fn pieri_psi_prime(lambda: &Partition, mu: &Partition) -> Result<RatFunc, MacdonaldError> {
    Ok(psi_prime_factored(lambda, mu)?.to_ratfunc())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhiPsi {
    Phi,
    Psi,
}

/// `f(q^a t^b) / f(q^c t^b)` with `f(u) = (tu;q)_oo/(qu;q)_oo`.
fn f_ratio(a: i32, c: i32, b: i32) -> FactoredQT {
    let k = (c - a) as i64;
    div(&poch(1, a, b + 1, 1, 0, k), &poch(1, a + 1, b, 1, 0, k))
}

/// `phi_{lambda/mu}` from the product of `f`-ratios over `i <= j`, every
/// infinite product cancelled to a finite one.
pub fn phi_factored(lambda: &Partition, mu: &Partition) -> Result<FactoredQT, MacdonaldError> {
    if strip_test(lambda, mu, StripKind::Horizontal).is_none() {
        return Err(strip_error(lambda, mu, StripKind::Horizontal));
    }
    let n = lambda.len();
    let l = lambda.padded(n + 1);
    let m = mu.padded(n + 1);
    let mut f = FactoredQT::one();
    for i in 0..n {
        for j in i..n {
            let b = (j - i) as i32;
            let li = l[i] as i32;
            let mi = m[i] as i32;
            f = f.mul(&f_ratio(li - l[j] as i32, li - m[j] as i32, b));
            f = f.mul(&f_ratio(mi - m[j + 1] as i32, mi - l[j + 1] as i32, b));
        }
    }
    Ok(f)
}

/// `psi_{lambda/mu}(q,t) = psi'_{lambda'/mu'}(t,q)`.
pub fn psi_factored(lambda: &Partition, mu: &Partition) -> Result<FactoredQT, MacdonaldError> {
    if strip_test(lambda, mu, StripKind::Horizontal).is_none() {
        return Err(strip_error(lambda, mu, StripKind::Horizontal));
    }
    Ok(psi_prime_factored(&lambda.conjugate(), &mu.conjugate())?.swap_qt())
}

pub fn pieri_phi_psi(lambda: &Partition, mu: &Partition, which: PhiPsi) -> Result<RatFunc, MacdonaldError> {
    let f = match which {
        PhiPsi::Phi => phi_factored(lambda, mu)?,
        PhiPsi::Psi => psi_factored(lambda, mu)?,
    };
    Ok(f.to_ratfunc())
}

/// `phi_{lambda/mu}(q,t) = b_{mu'}(t,q) / b_{lambda'}(t,q) * psi'_{lambda'/mu'}(t,q)`.
pub fn pieri_phi_via_b(lambda: &Partition, mu: &Partition) -> Result<RatFunc, MacdonaldError> {
    if strip_test(lambda, mu, StripKind::Horizontal).is_none() {
        return Err(strip_error(lambda, mu, StripKind::Horizontal));
    }
    let (lc, mc) = (lambda.conjugate(), mu.conjugate());
    let ratio = div(&b_pm_factored(&mc, Sign::Plus), &b_pm_factored(&lc, Sign::Plus));
    Ok(ratio.mul(&psi_prime_factored(&lc, &mc)?).swap_qt().to_ratfunc())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieriKind {
    /// `P_nu g_r = sum phi_{lambda/nu} P_lambda`.
    Phi,
    /// `Q_nu g_r = sum psi_{lambda/nu} Q_lambda`.
    Psi,
    /// `P_nu e_r = sum psi'_{lambda/nu} P_lambda`.
    PsiPrime,
}

/// Pieri coefficients read off by expanding a product in the `P` basis.
pub fn pieri_extract(
    nu: &Partition,
    r: u32,
    n: usize,
    which: PieriKind,
    cache: &MacdonaldCache,
) -> Result<BTreeMap<Partition, RatFunc>, MacdonaldError> {
    if n < nu.len() + r as usize {
        return Err(MacdonaldError::Precondition(format!(
            "n = {n} would truncate strips over {nu} of size {r}"
        )));
    }
    let d = nu.weight() + r;
    let vars = VarSet::qt();
    let (left, right) = match which {
        PieriKind::Phi => (macdonald_P(nu, n, cache), g_r(r, n, d)?),
        PieriKind::Psi => (macdonald_Q(nu, n, cache), g_r(r, n, d)?),
        PieriKind::PsiPrime => (macdonald_P(nu, n, cache), SymSeries::elementary(&vars, n, d, r)),
    };
    let prod = msym_product(&left.with_maxdeg(d), &right)?;
    let mut coords = expand_in_p(&prod, cache)?;
    if which == PieriKind::Psi {
        for (lambda, c) in coords.iter_mut() {
            let inv_b = b_pm_factored(lambda, Sign::Plus).inv().expect("nonzero").to_ratfunc();
            *c = &*c * &inv_b;
        }
    }
    coords.retain(|_, c| !c.is_zero());
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BigRat;
    use crate::partition;
    use crate::partitions::{add_strips, partitions_up_to};

    fn qt() -> Vars {
        VarSet::qt()
    }

    fn lin(c: i64, q: u32, t: u32) -> RatFunc {
        // 1 + c q^q t^t
        let v = qt();
        let mono = RatFunc::named(&v, "q").pow(q as i32).unwrap() * RatFunc::named(&v, "t").pow(t as i32).unwrap();
        RatFunc::one(&v) + mono.scale(&BigRat::from_integer(c.into()))
    }

    #[test]
    fn b_examples() {
        let v = qt();
        assert_eq!(b_pm(&partition![1], Sign::Minus), lin(1, 0, 1) / lin(-1, 1, 0));
        let want = (lin(1, 0, 1) * lin(1, 1, 1)) / (lin(-1, 1, 0) * lin(-1, 2, 0));
        assert_eq!(b_pm(&partition![2], Sign::Minus), want);
        assert_eq!(b_pm(&Partition::empty(), Sign::Plus), RatFunc::one(&v));
    }

    #[test]
    fn b_forms_agree() {
        for lambda in partitions_up_to(6, 6) {
            for n in [lambda.len(), lambda.len() + 2] {
                let f = b_minus_forms(&lambda, n).unwrap();
                assert_eq!(f.via_rows, b_pm(&lambda, Sign::Minus), "{lambda} n={n}");
                let conj = b_pm(&lambda.conjugate(), Sign::Minus);
                assert_eq!(f.conj_via_rows, conj, "{lambda} n={n}");
                assert_eq!(f.conj_via_swap, conj, "{lambda}");
            }
            let plus = b_pm_rows(&lambda, Sign::Plus, lambda.len() + 1).unwrap().to_ratfunc();
            assert_eq!(plus, b_pm(&lambda, Sign::Plus));
        }
        assert!(b_minus_forms(&partition![2, 1], 1).is_err());
    }

    #[test]
    fn g_matches_q_row() {
        let cache = MacdonaldCache::global();
        for r in 0..=3 {
            let g = g_r(r, 3, r).unwrap();
            let q = macdonald_Q(&Partition::from_unsorted(&[r]), 3, cache);
            assert!(g.eq_exact(&q), "g_{r}");
        }
    }

    #[test]
    fn psi_prime_examples() {
        let v = qt();
        assert_eq!(pieri_psi_prime(&partition![2], &partition![1]).unwrap(), RatFunc::one(&v));
        let want = (lin(-1, 1, 0) * lin(1, 0, 1)) / lin(-1, 1, 1);
        assert_eq!(pieri_psi_prime(&partition![1, 1], &partition![1]).unwrap(), want);
        assert!(pieri_psi_prime(&partition![3], &partition![1]).is_err());
    }

    #[test]
    fn phi_psi_examples() {
        let v = qt();
        let e = Partition::empty();
        assert_eq!(pieri_phi_psi(&partition![1], &e, PhiPsi::Phi).unwrap(), lin(-1, 0, 1) / lin(-1, 1, 0));
        assert_eq!(pieri_phi_psi(&partition![1], &e, PhiPsi::Psi).unwrap(), RatFunc::one(&v));
        let l = partition![3, 1];
        assert_eq!(pieri_phi_psi(&l, &l, PhiPsi::Phi).unwrap(), RatFunc::one(&v));
    }

    #[test]
    fn phi_routes_agree() {
        for mu in partitions_up_to(4, 4) {
            for r in 0..=3 {
                for lambda in add_strips(&mu, r, StripKind::Horizontal) {
                    let a = pieri_phi_psi(&lambda, &mu, PhiPsi::Phi).unwrap();
                    let b = pieri_phi_via_b(&lambda, &mu).unwrap();
                    assert_eq!(a, b, "{lambda}/{mu}");
                    // phi = b_lambda / b_mu * psi
                    let psi = pieri_phi_psi(&lambda, &mu, PhiPsi::Psi).unwrap();
                    let ratio = div(&b_pm_factored(&lambda, Sign::Plus), &b_pm_factored(&mu, Sign::Plus));
                    assert_eq!(a, &psi * &ratio.to_ratfunc(), "{lambda}/{mu}");
                }
            }
        }
    }

    #[test]
    fn extraction_small_cases() {
        let cache = MacdonaldCache::global();
        let v = qt();
        let e = Partition::empty();
        let phi = pieri_extract(&e, 1, 1, PieriKind::Phi, cache).unwrap();
        assert_eq!(phi.len(), 1);
        assert_eq!(phi[&partition![1]], lin(-1, 0, 1) / lin(-1, 1, 0));
        let pp = pieri_extract(&partition![1], 1, 2, PieriKind::PsiPrime, cache).unwrap();
        assert_eq!(pp[&partition![2]], RatFunc::one(&v));
        assert_eq!(pp[&partition![1, 1]], pieri_psi_prime(&partition![1, 1], &partition![1]).unwrap());
        for kind in [PieriKind::Phi, PieriKind::Psi, PieriKind::PsiPrime] {
            let z = pieri_extract(&e, 0, 0, kind, cache).unwrap();
            assert_eq!(z.len(), 1);
            assert_eq!(z[&e], RatFunc::one(&v));
        }
    }

    #[test]
    fn extraction_matches_formulas_degree_four() {
        let cache = MacdonaldCache::global();
        for nu in partitions_up_to(2, 2) {
            for r in 1..=2 {
                let n = nu.len() + r as usize;
                let phi = pieri_extract(&nu, r, n, PieriKind::Phi, cache).unwrap();
                let want: Vec<Partition> = add_strips(&nu, r, StripKind::Horizontal);
                assert_eq!(phi.keys().cloned().collect::<Vec<_>>().len(), want.len());
                for l in &want {
                    assert_eq!(phi[l], pieri_phi_psi(l, &nu, PhiPsi::Phi).unwrap(), "phi {l}/{nu}");
                }
                let psi = pieri_extract(&nu, r, n, PieriKind::Psi, cache).unwrap();
                for l in &want {
                    assert_eq!(psi[l], pieri_phi_psi(l, &nu, PhiPsi::Psi).unwrap(), "psi {l}/{nu}");
                }
                let pp = pieri_extract(&nu, r, n, PieriKind::PsiPrime, cache).unwrap();
                let vert = add_strips(&nu, r, StripKind::Vertical);
                assert_eq!(pp.len(), vert.len());
                for l in &vert {
                    assert_eq!(pp[l], pieri_psi_prime(l, &nu).unwrap(), "psi' {l}/{nu}");
                }
            }
        }
    }
}
