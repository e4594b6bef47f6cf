//! Truncated exact checks of the Kawanaka identity
//! `sum_lambda b^-_lambda(q,t) P_lambda(x;q^2,t^2) = prod (-t x_i;q)_inf/(x_i;q)_inf
//! prod_{i<j} (t^2 x_i x_j;q^2)_inf/(x_i x_j;q^2)_inf`, the Pieri-level identities
//! it reduces to, the induction step on the number of variables, and the
//! companion identities (the formal-`b` Macdonald pair, the Schur and
//! Hall–Littlewood cases).
//!
//! Product sides are expanded as explicit polynomials in `x_1..x_n` and only
//! then collected into the monomial basis, so symmetry is checked rather than
//! assumed.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::{AlgebraError, FactoredQT, RatFunc, VarSet, Vars};
use crate::macdonald::{
    b_pm_factored, macdonald_P, phi_factored, schur, psi_factored, psi_prime_factored, MacdonaldCache, MacdonaldError,
    Sign, SymSeries,
};
use crate::partitions::{add_strips, partitions_up_to, sub_strips, Partition, StripKind};
use crate::thetaids::final_sides;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KawanakaError {
    #[error("expansion is not symmetric at exponent {0:?}")]
    NotSymmetric(Vec<u32>),
    #[error(transparent)]
    Macdonald(#[from] MacdonaldError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `n` variables, total degree at most `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationSpec {
    pub n: usize,
    pub d: u32,
}

impl TruncationSpec {
    pub fn new(n: usize, d: u32) -> Self {
        TruncationSpec { n, d }
    }

    /// `{ lambda : |lambda| <= d, l(lambda) <= n }`.
    pub fn partitions(&self) -> Vec<Partition> {
        partitions_up_to(self.d, self.n)
    }
}

/// A polynomial in `x_1..x_nx`, truncated at total degree `maxdeg`, keyed
/// by exponent vectors.
#[derive(Clone)]
pub(crate) struct Expansion {
    vars: Vars,
    nx: usize,
    maxdeg: u32,
    terms: BTreeMap<Vec<u32>, RatFunc>,
}

impl Expansion {
    fn zero(vars: &Vars, nx: usize, maxdeg: u32) -> Self {
        Expansion {
            vars: vars.clone(),
            nx,
            maxdeg,
            terms: BTreeMap::new(),
        }
    }

    fn one(vars: &Vars, nx: usize, maxdeg: u32) -> Self {
        let mut e = Self::zero(vars, nx, maxdeg);
        e.add(vec![0; nx], RatFunc::one(vars));
        e
    }

    fn add(&mut self, exps: Vec<u32>, c: RatFunc) {
        if c.is_zero() || exps.iter().sum::<u32>() > self.maxdeg {
            return;
        }
        let v = match self.terms.remove(&exps) {
            Some(old) => &old + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(exps, v);
        }
    }

    /// `sum_k c(k) prod_{i in idx} x_i^{step k}`; `c` returns `None` for zero.
    fn factor<F>(vars: &Vars, nx: usize, maxdeg: u32, idx: &[usize], step: u32, c: F) -> Self
    where
        F: Fn(u32) -> Option<RatFunc>,
    {
        let mut e = Self::zero(vars, nx, maxdeg);
        let per_k = step * idx.len() as u32;
        let mut k = 0;
        while k * per_k <= maxdeg {
            if let Some(v) = c(k) {
                let mut exps = vec![0; nx];
                for &i in idx {
                    exps[i] = step * k;
                }
                e.add(exps, v);
            }
            if per_k == 0 {
                break;
            }
            k += 1;
        }
        e
    }

    fn mul(&self, other: &Expansion) -> Expansion {
        let mut acc: BTreeMap<Vec<u32>, Vec<RatFunc>> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            let da: u32 = ea.iter().sum();
            for (eb, cb) in &other.terms {
                if da + eb.iter().sum::<u32>() > self.maxdeg {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                acc.entry(e).or_default().push(ca * cb);
            }
        }
        let mut out = Self::zero(&self.vars, self.nx, self.maxdeg.min(other.maxdeg));
        for (e, cs) in acc {
            out.add(e, RatFunc::sum_in(&self.vars, &cs));
        }
        out
    }

    /// Monomial-basis series in its own variables, placed on the first
    /// `s.nvars()` of `nx` variables, truncated at `maxdeg`.
    fn from_sym(s: &SymSeries, nx: usize, maxdeg: u32) -> Self {
        let mut e = Self::zero(s.vars(), nx, maxdeg);
        for (lambda, c) in s.terms() {
            for mut p in distinct_permutations(&lambda.padded(s.nvars())) {
                p.resize(nx, 0);
                e.add(p, c.clone());
            }
        }
        e
    }

    /// Back to the monomial basis, checking that every permutation of an
    /// exponent carries the same coefficient.
    fn collect(&self) -> Result<SymSeries, KawanakaError> {
        let mut out = SymSeries::zero(&self.vars, self.nx, self.maxdeg);
        for (e, c) in &self.terms {
            let mut canon = e.clone();
            canon.sort_unstable_by(|a, b| b.cmp(a));
            let lead = self
                .terms
                .get(&canon)
                .ok_or_else(|| KawanakaError::NotSymmetric(e.clone()))?;
            if !c.eq_cross(lead) {
                return Err(KawanakaError::NotSymmetric(e.clone()));
            }
            if &canon == e {
                for p in distinct_permutations(&canon) {
                    if !self.terms.contains_key(&p) {
                        return Err(KawanakaError::NotSymmetric(p));
                    }
                }
                out.insert(Partition::from_unsorted(&canon), c.clone());
            }
        }
        Ok(out)
    }

    fn eq_exact(&self, other: &Expansion) -> bool {
        let keys: std::collections::BTreeSet<&Vec<u32>> = self.terms.keys().chain(other.terms.keys()).collect();
        let zero = RatFunc::zero(&self.vars);
        keys.into_iter().all(|k| {
            let a = self.terms.get(k).unwrap_or(&zero);
            let b = other.terms.get(k).unwrap_or(&zero);
            a.eq_cross(b)
        })
    }
}

/// Distinct rearrangements of a multiset, in lex order.
fn distinct_permutations(v: &[u32]) -> Vec<Vec<u32>> {
    let mut cur: Vec<u32> = v.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    // next_permutation until it wraps
    loop {
        let n = cur.len();
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists by choice of i");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

fn qt() -> Vars {
    VarSet::qt()
}

fn rf(f: &FactoredQT) -> RatFunc {
    f.to_ratfunc()
}

fn poch(eps: i8, a: i32, b: i32, sq: i32, st: i32, k: u32) -> FactoredQT {
    FactoredQT::poch(eps, a, b, sq, st, k as i64).expect("nonnegative length")
}

fn ratio(num: &FactoredQT, den: &FactoredQT) -> FactoredQT {
    num.div(den).expect("denominator has no unit factor")
}

/// `(-t;q)_k / (q;q)_k`, zero for negative `k`.
fn qbinomial_weight(k: i64) -> FactoredQT {
    if k < 0 {
        return FactoredQT::zero();
    }
    ratio(&poch(-1, 0, 1, 1, 0, k as u32), &poch(1, 1, 0, 1, 0, k as u32))
}

/// `(t^2;q^2)_k / (q^2;q^2)_k`.
fn pair_weight(k: u32) -> FactoredQT {
    ratio(&poch(1, 0, 2, 2, 0, k), &poch(1, 2, 0, 2, 0, k))
}

/// `q -> q^2`, `t -> t^2` on a coefficient in `Q(q,t)`.
fn square_qt(c: &RatFunc) -> Result<RatFunc, AlgebraError> {
    let v = qt();
    let q2 = RatFunc::var(&v, 0).pow(2)?;
    let t2 = RatFunc::var(&v, 1).pow(2)?;
    c.specialize(&[(0, q2), (1, t2)])
}

/// `P_lambda(x_1..x_n; q^2, t^2)`.
fn p_squared(lambda: &Partition, n: usize, cache: &MacdonaldCache) -> Result<SymSeries, KawanakaError> {
    Ok(macdonald_P(lambda, n, cache).map_coeffs(&qt(), square_qt)?)
}

/// `sum b^-_lambda(q,t) P_lambda(x; q^2, t^2)` over the truncation range.
pub fn kawanaka_lhs(spec: TruncationSpec) -> Result<SymSeries, KawanakaError> {
    let cache = MacdonaldCache::global();
    let parts: Vec<Result<SymSeries, KawanakaError>> = spec
        .partitions()
        .par_iter()
        .map(|lambda| {
            let p = p_squared(lambda, spec.n, cache)?;
            Ok(p.scale(&b_pm_factored(lambda, Sign::Minus).to_ratfunc())?)
        })
        .collect();
    let mut out = SymSeries::zero(&qt(), spec.n, spec.d);
    for p in parts {
        out = out.try_add(&p?.with_maxdeg(spec.d))?;
    }
    Ok(out)
}

fn kawanaka_product(n: usize, d: u32) -> Expansion {
    let v = qt();
    let mut e = Expansion::one(&v, n, d);
    for i in 0..n {
        e = e.mul(&Expansion::factor(&v, n, d, &[i], 1, |k| Some(rf(&qbinomial_weight(k as i64)))));
    }
    for i in 0..n {
        for j in i + 1..n {
            e = e.mul(&Expansion::factor(&v, n, d, &[i, j], 1, |k| Some(rf(&pair_weight(k)))));
        }
    }
    e
}

/// The product side expanded through degree `d` and collected into the
/// monomial basis.
pub fn kawanaka_rhs(spec: TruncationSpec) -> Result<SymSeries, KawanakaError> {
    kawanaka_product(spec.n, spec.d).collect()
}

pub fn verify_kawanaka(spec: TruncationSpec) -> Result<bool, KawanakaError> {
    Ok(kawanaka_lhs(spec)?.eq_exact(&kawanaka_rhs(spec)?))
}

/// The two equivalent Pieri-level forms: horizontal strips with `phi`, `psi`,
/// or vertical strips with `psi'` after conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieriForm {
    Horizontal,
    Vertical,
}

fn b_minus(lambda: &Partition) -> FactoredQT {
    b_pm_factored(lambda, Sign::Minus)
}

/// Both sides of the Pieri-coefficient identity behind the induction step.
pub fn proppieri_sides(mu: &Partition, r: u32, form: PieriForm) -> Result<(RatFunc, RatFunc), KawanakaError> {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    match form {
        PieriForm::Horizontal => {
            for k in 0..=r.min(mu.weight()) {
                let w = qbinomial_weight((r - k) as i64);
                for nu in sub_strips(mu, k, StripKind::Horizontal) {
                    let phi = phi_factored(mu, &nu)?.dilate(2);
                    lhs.push(rf(&w.mul(&b_minus(&nu)).mul(&phi)));
                }
            }
            for lambda in add_strips(mu, r, StripKind::Horizontal) {
                let psi = psi_factored(&lambda, mu)?.dilate(2);
                rhs.push(rf(&b_minus(&lambda).mul(&psi)));
            }
        }
        PieriForm::Vertical => {
            let b_mu = b_minus(mu).swap_qt();
            for k in 0..=r.min(mu.weight()) {
                let w = qbinomial_weight((r - k) as i64);
                for nu in sub_strips(mu, k, StripKind::Vertical) {
                    let b = ratio(&b_minus(&nu).swap_qt(), &b_mu);
                    let psi = psi_prime_factored(mu, &nu)?.swap_qt().dilate(2);
                    lhs.push(rf(&w.mul(&b).mul(&psi)));
                }
            }
            let b_conj = b_minus(&mu.conjugate());
            for lambda in add_strips(mu, r, StripKind::Vertical) {
                let b = ratio(&b_minus(&lambda.conjugate()), &b_conj);
                let psi = psi_prime_factored(&lambda, mu)?.swap_qt().dilate(2);
                rhs.push(rf(&b.mul(&psi)));
            }
        }
    }
    let v = qt();
    Ok((RatFunc::sum_in(&v, &lhs), RatFunc::sum_in(&v, &rhs)))
}

pub fn verify_proppieri(mu: &Partition, r: u32, form: PieriForm) -> Result<bool, KawanakaError> {
    let (l, rr) = proppieri_sides(mu, r, form)?;
    Ok(l.eq_cross(&rr))
}

/// The horizontal form at `mu'` equals `b^-_{mu'}(q,t)` times the vertical
/// form at `mu`, side by side.
pub fn pieri_forms_agree(mu: &Partition, r: u32) -> Result<bool, KawanakaError> {
    let conj = mu.conjugate();
    let (hl, hr) = proppieri_sides(&conj, r, PieriForm::Horizontal)?;
    let (vl, vr) = proppieri_sides(mu, r, PieriForm::Vertical)?;
    let scale = rf(&b_minus(&conj));
    Ok(hl.eq_cross(&(&vl * &scale)) && hr.eq_cross(&(&vr * &scale)))
}

/// The closed subset-sum form with `n = l(mu)` reproduces both sides of the
/// vertical form.
pub fn final_matches_vertical(mu: &Partition, r: u32) -> Result<bool, KawanakaError> {
    let (fl, fr) = final_sides(mu, mu.len(), r as usize)?;
    let (vl, vr) = proppieri_sides(mu, r, PieriForm::Vertical)?;
    Ok(fl.eq_cross(&vl) && fr.eq_cross(&vr))
}

/// Outcome of the induction step at one truncation: the step itself, and
/// each side against its expansion through Pieri coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecursionCheck {
    pub step: bool,
    pub product_expansion: bool,
    pub branching_expansion: bool,
}

impl RecursionCheck {
    pub fn passed(&self) -> bool {
        self.step && self.product_expansion && self.branching_expansion
    }
}

/// `Phi(x, y) = Phi(x) (-ty;q)_inf/(y;q)_inf prod (t^2 x_i y;q^2)_inf/(x_i y;q^2)_inf`
/// with `Phi` the Macdonald side, in `n + 1` variables through degree `d`.
pub fn verify_recursion(n: usize, d: u32) -> Result<RecursionCheck, KawanakaError> {
    let v = qt();
    let nx = n + 1;
    let y = n;
    let cache = MacdonaldCache::global();

    let lhs = Expansion::from_sym(&kawanaka_lhs(TruncationSpec::new(nx, d))?, nx, d);

    let mut rhs = Expansion::from_sym(&kawanaka_lhs(TruncationSpec::new(n, d))?, nx, d);
    rhs = rhs.mul(&Expansion::factor(&v, nx, d, &[y], 1, |k| Some(rf(&qbinomial_weight(k as i64)))));
    for i in 0..n {
        rhs = rhs.mul(&Expansion::factor(&v, nx, d, &[i, y], 1, |k| Some(rf(&pair_weight(k)))));
    }

    // sum_{mu, r} c(mu, r) P_mu(x; q^2, t^2) y^r for either side's coefficients
    let expand = |side: fn((RatFunc, RatFunc)) -> RatFunc| -> Result<Expansion, KawanakaError> {
        let mut e = Expansion::zero(&v, nx, d);
        for mu in partitions_up_to(d, n) {
            let p = Expansion::from_sym(&p_squared(&mu, n, cache)?, nx, d);
            for r in 0..=d - mu.weight() {
                let c = side(proppieri_sides(&mu, r, PieriForm::Horizontal)?);
                if c.is_zero() {
                    continue;
                }
                let yr = Expansion::factor(&v, nx, d, &[y], 1, |k| (k == r).then(|| c.clone()));
                for (ex, cx) in p.mul(&yr).terms {
                    e.add(ex, cx);
                }
            }
        }
        Ok(e)
    };
    let product_side = expand(|(l, _)| l)?;
    let branching_side = expand(|(_, r)| r)?;

    Ok(RecursionCheck {
        step: lhs.eq_exact(&rhs),
        product_expansion: product_side.eq_exact(&rhs),
        branching_expansion: branching_side.eq_exact(&lhs),
    })
}

/// The two members of the Macdonald pair with a formal parameter `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdVariant {
    /// `b^{c(lambda)}`, cells with even leg.
    ColumnsEvenLegs,
    /// `b^{r(lambda)}`, cells with odd arm.
    RowsOddArms,
}

/// Cell weight of the pair: `prod (1 - q^a t^{l+1})/(1 - q^{a+1} t^l)` over
/// the selected cells.
pub fn md_cell_weight(lambda: &Partition, variant: MdVariant) -> FactoredQT {
    let items = lambda
        .arms_legs()
        .into_iter()
        .filter(|&(a, l)| match variant {
            MdVariant::ColumnsEvenLegs => l % 2 == 0,
            MdVariant::RowsOddArms => a % 2 == 1,
        })
        .flat_map(|(a, l)| [(1i8, a as i32, l as i32 + 1, 1), (1, a as i32 + 1, l as i32, -1)]);
    FactoredQT::from_factors(items).expect("cell factors are never 1 - 1")
}

fn md_b_power(lambda: &Partition, variant: MdVariant) -> usize {
    match variant {
        MdVariant::ColumnsEvenLegs => lambda.odd_columns(),
        MdVariant::RowsOddArms => lambda.odd_rows(),
    }
}

/// How `b` enters: as a formal variable, or fixed at 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BValue {
    Formal,
    Zero,
    One,
}

/// Every variant lives in `Q(q,t,b)` so fixed-`b` results compare directly
/// with specialised formal ones.
fn md_vars(_b: BValue) -> Vars {
    VarSet::qtb()
}

/// `b^k` in the universe chosen by `b`.
fn b_power(vars: &Vars, b: BValue, k: usize) -> RatFunc {
    match b {
        BValue::Formal => RatFunc::named(vars, "b").pow(k as i32).expect("nonnegative power"),
        BValue::Zero if k > 0 => RatFunc::zero(vars),
        _ => RatFunc::one(vars),
    }
}

fn in_vars(f: &FactoredQT, vars: &Vars) -> RatFunc {
    f.to_ratfunc_in(vars, 0, 1)
}

fn md_lhs_expansion(variant: MdVariant, b: BValue, spec: TruncationSpec) -> Result<SymSeries, KawanakaError> {
    let vars = md_vars(b);
    let cache = MacdonaldCache::global();
    let mut out = SymSeries::zero(&vars, spec.n, spec.d);
    for lambda in spec.partitions() {
        let w = &in_vars(&md_cell_weight(&lambda, variant), &vars) * &b_power(&vars, b, md_b_power(&lambda, variant));
        if w.is_zero() {
            continue;
        }
        let p = crate::macdonald::macdonald_P_in(&vars, &lambda, spec.n, cache);
        out = out.try_add(&p.scale(&w)?.with_maxdeg(spec.d))?;
    }
    Ok(out)
}

fn md_rhs_expansion(variant: MdVariant, b: BValue, spec: TruncationSpec) -> Result<SymSeries, KawanakaError> {
    let vars = md_vars(b);
    let (n, d) = (spec.n, spec.d);
    let mut e = Expansion::one(&vars, n, d);
    for i in 0..n {
        match variant {
            // (b t x;q)_inf / (b x;q)_inf
            MdVariant::ColumnsEvenLegs => {
                e = e.mul(&Expansion::factor(&vars, n, d, &[i], 1, |k| {
                    let w = ratio(&poch(1, 0, 1, 1, 0, k), &poch(1, 1, 0, 1, 0, k));
                    Some(&in_vars(&w, &vars) * &b_power(&vars, b, k as usize))
                }));
            }
            // (1 + b x) (q t x^2;q^2)_inf / (x^2;q^2)_inf
            MdVariant::RowsOddArms => {
                e = e.mul(&Expansion::factor(&vars, n, d, &[i], 1, |k| match k {
                    0 => Some(RatFunc::one(&vars)),
                    1 => Some(b_power(&vars, b, 1)),
                    _ => None,
                }));
                e = e.mul(&Expansion::factor(&vars, n, d, &[i], 2, |k| {
                    Some(in_vars(&ratio(&poch(1, 1, 1, 2, 0, k), &poch(1, 2, 0, 2, 0, k)), &vars))
                }));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            e = e.mul(&Expansion::factor(&vars, n, d, &[i, j], 1, |k| {
                Some(in_vars(&ratio(&poch(1, 0, 1, 1, 0, k), &poch(1, 1, 0, 1, 0, k)), &vars))
            }));
        }
    }
    e.collect()
}

/// Both sides of one member of the pair, with `b` formal or fixed.
pub fn md_sides(variant: MdVariant, b: BValue, spec: TruncationSpec) -> Result<(SymSeries, SymSeries), KawanakaError> {
    Ok((md_lhs_expansion(variant, b, spec)?, md_rhs_expansion(variant, b, spec)?))
}

/// The formal-`b` identity, and its `b = 0`, `b = 1` images against the
/// fixed-`b` identities built directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MdCheck {
    pub formal: bool,
    pub at_zero: bool,
    pub at_one: bool,
}

impl MdCheck {
    pub fn passed(&self) -> bool {
        self.formal && self.at_zero && self.at_one
    }
}

fn fix_b(s: &SymSeries, value: i64) -> Result<SymSeries, KawanakaError> {
    let v = VarSet::qtb();
    Ok(s.map_coeffs(&v, |c| c.specialize(&[(2, RatFunc::from_int(&v, value))]))?)
}

pub fn verify_md(variant: MdVariant, spec: TruncationSpec) -> Result<MdCheck, KawanakaError> {
    let (fl, fr) = md_sides(variant, BValue::Formal, spec)?;
    let formal = fl.eq_exact(&fr);
    let mut fixed = [false; 2];
    for (slot, (value, b)) in fixed.iter_mut().zip([(0, BValue::Zero), (1, BValue::One)]) {
        let (dl, dr) = md_sides(variant, b, spec)?;
        let (sl, sr) = (fix_b(&fl, value)?, fix_b(&fr, value)?);
        *slot = dl.eq_exact(&dr) && sl.eq_exact(&dl) && sr.eq_exact(&dr);
    }
    Ok(MdCheck {
        formal,
        at_zero: fixed[0],
        at_one: fixed[1],
    })
}

/// The two classical specialisations of the Kawanaka identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Specialisation {
    /// `q = t`, where `P_lambda(x;q^2,q^2)` is a Schur function.
    Schur,
    /// `q = 0`, where `P_lambda(x;0,t^2)` is a Hall–Littlewood function.
    HallLittlewood,
}

/// The specialised Kawanaka data against the identity built directly from
/// hook or multiplicity weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialisedCheck {
    pub lhs_matches: bool,
    pub rhs_matches: bool,
    pub identity: bool,
}

impl SpecialisedCheck {
    pub fn passed(&self) -> bool {
        self.lhs_matches && self.rhs_matches && self.identity
    }
}

fn specialise(c: &RatFunc, case: Specialisation) -> Result<RatFunc, AlgebraError> {
    let v = qt();
    match case {
        Specialisation::Schur => c.specialize(&[(1, RatFunc::var(&v, 0))]),
        Specialisation::HallLittlewood => c.specialize(&[(0, RatFunc::zero(&v))]),
    }
}

/// `prod_s (1 + q^{h(s)}) / (1 - q^{h(s)})`.
pub fn hook_weight(lambda: &Partition) -> FactoredQT {
    let items = lambda.arms_legs().into_iter().flat_map(|(a, l)| {
        let h = (a + l + 1) as i32;
        [(-1i8, h, 0, 1), (1, h, 0, -1)]
    });
    FactoredQT::from_factors(items).expect("hooks are positive")
}

/// `prod_i (-t;t)_{m_i(lambda)}`.
pub fn multiplicity_weight(lambda: &Partition) -> FactoredQT {
    lambda
        .multiplicities()
        .into_iter()
        .fold(FactoredQT::one(), |acc, (_, m)| acc.mul(&poch(-1, 0, 1, 0, 1, m as u32)))
}

/// Hall–Littlewood `P_lambda(x_1..x_n; t^2)` from the symmetrisation
/// `x^lambda prod_{i<j} (x_i - t^2 x_j)/(x_i - x_j)` over `S_n`, normalised by
/// `v_lambda(t^2)`. The antisymmetrised numerator is read off in the Schur
/// basis from its strictly decreasing exponents.
fn hall_littlewood_squared(lambda: &Partition, n: usize) -> SymSeries {
    let v = qt();
    let t2 = RatFunc::var(&v, 1).pow(2).expect("positive power");
    // x^lambda prod_{i<j} (x_i - t^2 x_j) as exponent vectors
    let mut base: BTreeMap<Vec<u32>, RatFunc> = BTreeMap::new();
    base.insert(lambda.padded(n), RatFunc::one(&v));
    for i in 0..n {
        for j in i + 1..n {
            let mut next: BTreeMap<Vec<u32>, RatFunc> = BTreeMap::new();
            for (e, c) in &base {
                let mut ei = e.clone();
                ei[i] += 1;
                let mut ej = e.clone();
                ej[j] += 1;
                for (k, w) in [(ei, c.clone()), (ej, -(c * &t2))] {
                    let s = match next.remove(&k) {
                        Some(o) => &o + &w,
                        None => w,
                    };
                    next.insert(k, s);
                }
            }
            base = next;
        }
    }
    // antisymmetrise, keeping only strictly decreasing exponents mu + delta
    let mut alt: BTreeMap<Vec<u32>, RatFunc> = BTreeMap::new();
    for perm in distinct_permutations(&(0..n as u32).collect::<Vec<_>>()) {
        let sign = permutation_sign(&perm);
        for (e, c) in &base {
            let mut w = vec![0; n];
            for (i, &p) in perm.iter().enumerate() {
                w[p as usize] = e[i];
            }
            if w.windows(2).all(|p| p[0] > p[1]) {
                let c = if sign { c.clone() } else { -c };
                let s = match alt.remove(&w) {
                    Some(o) => &o + &c,
                    None => c,
                };
                alt.insert(w, s);
            }
        }
    }
    // v_lambda(t^2) = prod over multiplicities, zeros included, of [m]_{t^2}!
    let mut mults: Vec<usize> = lambda.multiplicities().into_iter().map(|(_, m)| m).collect();
    mults.push(n - lambda.len());
    let norm = mults.into_iter().fold(FactoredQT::one(), |acc, m| {
        (1..=m as i32).fold(acc, |acc, j| {
            acc.mul(&ratio(&poch(1, 0, 2 * j, 0, 0, 1), &poch(1, 0, 2, 0, 0, 1)))
        })
    });
    let inv = rf(&norm).recip().expect("nonzero");
    let mut out = SymSeries::zero(&v, n, lambda.weight());
    for (w, c) in alt {
        if c.is_zero() {
            continue;
        }
        let mu: Vec<u32> = w.iter().enumerate().map(|(i, &x)| x - (n - 1 - i) as u32).collect();
        let s = schur(&Partition::from_unsorted(&mu), n, &v);
        out = out.try_add(&s.scale(&(&c * &inv)).expect("same universe").with_maxdeg(lambda.weight())).expect("same universe");
    }
    out
}

fn permutation_sign(p: &[u32]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

fn specialised_direct(case: Specialisation, spec: TruncationSpec) -> Result<(SymSeries, SymSeries), KawanakaError> {
    let v = qt();
    let (n, d) = (spec.n, spec.d);
    let mut lhs = SymSeries::zero(&v, n, d);
    for lambda in spec.partitions() {
        let (w, p) = match case {
            Specialisation::Schur => (hook_weight(&lambda), schur(&lambda, n, &v)),
            Specialisation::HallLittlewood => (multiplicity_weight(&lambda), hall_littlewood_squared(&lambda, n)),
        };
        lhs = lhs.try_add(&p.scale(&rf(&w))?.with_maxdeg(d))?;
    }
    let one = RatFunc::one(&v);
    let mut e = Expansion::one(&v, n, d);
    for i in 0..n {
        e = e.mul(&Expansion::factor(&v, n, d, &[i], 1, |k| {
            Some(match case {
                // (-q x;q)_inf / (x;q)_inf
                Specialisation::Schur => rf(&ratio(&poch(-1, 1, 0, 1, 0, k), &poch(1, 1, 0, 1, 0, k))),
                // (1 + t x) / (1 - x)
                Specialisation::HallLittlewood if k == 0 => one.clone(),
                Specialisation::HallLittlewood => rf(&poch(-1, 0, 1, 0, 0, 1)),
            })
        }));
    }
    for i in 0..n {
        for j in i + 1..n {
            e = e.mul(&Expansion::factor(&v, n, d, &[i, j], 1, |k| {
                Some(match case {
                    Specialisation::Schur => one.clone(),
                    Specialisation::HallLittlewood if k == 0 => one.clone(),
                    Specialisation::HallLittlewood => rf(&poch(1, 0, 2, 0, 0, 1)),
                })
            }));
        }
    }
    Ok((lhs, e.collect()?))
}

pub fn verify_specialised(case: Specialisation, spec: TruncationSpec) -> Result<SpecialisedCheck, KawanakaError> {
    let v = qt();
    let l = kawanaka_lhs(spec)?.map_coeffs(&v, |c| specialise(c, case))?;
    let r = kawanaka_rhs(spec)?.map_coeffs(&v, |c| specialise(c, case))?;
    let (dl, dr) = specialised_direct(case, spec)?;
    Ok(SpecialisedCheck {
        lhs_matches: l.eq_exact(&dl),
        rhs_matches: r.eq_exact(&dr),
        identity: dl.eq_exact(&dr),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition;

    fn q() -> RatFunc {
        RatFunc::var(&qt(), 0)
    }

    fn t() -> RatFunc {
        RatFunc::var(&qt(), 1)
    }

    fn one() -> RatFunc {
        RatFunc::one(&qt())
    }

    #[test]
    fn degree_zero_is_one() {
        let s = TruncationSpec::new(3, 0);
        let one = SymSeries::one(&qt(), 3, 0);
        assert!(kawanaka_lhs(s).unwrap().eq_exact(&one));
        assert!(kawanaka_rhs(s).unwrap().eq_exact(&one));
    }

    #[test]
    fn degree_one_coefficient() {
        let s = TruncationSpec::new(2, 1);
        let want = (&one() + &t()).try_div(&(&one() - &q())).unwrap();
        let l = kawanaka_lhs(s).unwrap();
        assert!(l.coeff(&partition![1]).eq_cross(&want));
        assert!(kawanaka_rhs(s).unwrap().coeff(&partition![1]).eq_cross(&want));
    }

    #[test]
    fn one_variable_is_the_q_binomial_series() {
        let s = TruncationSpec::new(1, 4);
        let l = kawanaka_lhs(s).unwrap();
        for k in 0..=4u32 {
            // (-t;q)_k / (q;q)_k built cell by cell
            let mut want = one();
            for j in 0..k {
                let qj = q().pow(j as i32).unwrap();
                let num = &one() + &(&qj * &t());
                let den = &one() - &(&qj * &q());
                want = (&want * &num).try_div(&den).unwrap();
            }
            let lambda = if k == 0 { Partition::empty() } else { partition![k] };
            assert!(l.coeff(&lambda).eq_cross(&want), "k = {k}");
        }
        assert!(verify_kawanaka(s).unwrap());
    }

    #[test]
    fn identity_in_two_and_three_variables() {
        assert!(verify_kawanaka(TruncationSpec::new(2, 4)).unwrap());
        assert!(verify_kawanaka(TruncationSpec::new(3, 3)).unwrap());
    }

    #[test]
    fn asymmetric_expansion_is_rejected() {
        let v = qt();
        let e = Expansion::factor(&v, 2, 2, &[0], 1, |_| Some(RatFunc::one(&v)));
        assert!(matches!(e.collect(), Err(KawanakaError::NotSymmetric(_))));
    }

    #[test]
    fn distinct_permutations_of_a_multiset() {
        assert_eq!(distinct_permutations(&[1, 0, 1]).len(), 3);
        assert_eq!(distinct_permutations(&[2, 1, 0]).len(), 6);
        assert_eq!(distinct_permutations(&[]), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn pieri_identity_small_cases() {
        for form in [PieriForm::Horizontal, PieriForm::Vertical] {
            let (l, r) = proppieri_sides(&Partition::empty(), 0, form).unwrap();
            assert!(l.eq_cross(&one()) && r.eq_cross(&one()));
            for mu in [Partition::empty(), partition![1], partition![2, 1], partition![2, 2, 1]] {
                for r in 0..=3 {
                    assert!(verify_proppieri(&mu, r, form).unwrap(), "{mu} r={r} {form:?}");
                }
            }
        }
    }

    #[test]
    fn empty_partition_one_strip() {
        // both sides reduce to (1+t)/(1-q)
        let want = (&one() + &t()).try_div(&(&one() - &q())).unwrap();
        let (l, r) = proppieri_sides(&Partition::empty(), 1, PieriForm::Horizontal).unwrap();
        assert!(l.eq_cross(&want) && r.eq_cross(&want));
    }

    #[test]
    fn forms_agree_under_conjugation() {
        for mu in [Partition::empty(), partition![1], partition![2], partition![2, 1], partition![3, 1]] {
            for r in 0..=2 {
                assert!(pieri_forms_agree(&mu, r).unwrap(), "{mu} r={r}");
            }
        }
    }

    #[test]
    fn subset_form_matches_vertical_form() {
        for mu in [Partition::empty(), partition![1], partition![2, 1], partition![3, 3, 1]] {
            for r in 0..=3 {
                assert!(final_matches_vertical(&mu, r).unwrap(), "{mu} r={r}");
            }
        }
    }

    #[test]
    fn induction_step() {
        let c = verify_recursion(0, 0).unwrap();
        assert!(c.passed());
        for n in 1..=2 {
            let c = verify_recursion(n, 3).unwrap();
            assert!(c.passed(), "n = {n} {c:?}");
        }
    }

    #[test]
    fn macdonald_pair_formal_b() {
        for variant in [MdVariant::ColumnsEvenLegs, MdVariant::RowsOddArms] {
            let c = verify_md(variant, TruncationSpec::new(1, 4)).unwrap();
            assert!(c.passed(), "{variant:?} {c:?}");
        }
    }

    #[test]
    fn b_zero_kills_the_one_variable_factor() {
        let (_, r) = md_sides(MdVariant::ColumnsEvenLegs, BValue::Zero, TruncationSpec::new(1, 3)).unwrap();
        assert!(r.eq_exact(&SymSeries::one(&VarSet::qtb(), 1, 3)));
    }

    #[test]
    fn multiplicity_weight_of_two_equal_parts() {
        let w = rf(&multiplicity_weight(&partition![1, 1]));
        let want = &(&one() + &t()) * &(&one() + &t().pow(2).unwrap());
        assert!(w.eq_cross(&want));
    }

    #[test]
    fn hall_littlewood_at_t_zero_is_schur() {
        let v = qt();
        for lambda in [partition![2, 1], partition![1, 1], partition![3]] {
            let hl = hall_littlewood_squared(&lambda, 3)
                .map_coeffs(&v, |c| c.specialize(&[(1, RatFunc::zero(&v))]))
                .unwrap();
            assert!(hl.eq_exact(&schur(&lambda, 3, &v)), "{lambda}");
        }
    }

    #[test]
    fn specialisations() {
        for case in [Specialisation::Schur, Specialisation::HallLittlewood] {
            let c = verify_specialised(case, TruncationSpec::new(2, 3)).unwrap();
            assert!(c.passed(), "{case:?} {c:?}");
        }
    }
}
