//! Elliptic hypergeometric series over `A`-type index sets: the
//! hyper-rectangle series `V_m` and its transformation, the one-variable
//! case, the simplex series `W_n`, the multiple Jackson sum, the matrix pair
//! behind the double multi-sum, and the link back to the main theta identity
//! through principal specialisation.
//!
//! Evaluators are generic over [`ThetaField`]. The multiple Jackson sum, the
//! matrix pair and the double multi-sum are basic identities; they contain
//! explicit `1 - x` factors and are meant to be run with a trivial nome,
//! normally through [`ExactP0`].

use num_traits::{One, Zero};

use crate::algebra::BigRat;
use crate::macdonald::{pieri_phi_psi, PhiPsi};
use crate::partitions::{strip_test, Partition, StripKind};
use crate::thetaids::{thmrn_side, Side};
use crate::thetanum::{ExactP0, NumError, ThetaField};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EhsError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("two of the t parameters coincide")]
    Vandermonde,
    #[error("{0}")]
    Shape(String),
}

/// Parameters of `V_m(a; b, c, d; t)` together with `q`.
#[derive(Debug, Clone)]
pub struct EhsParams<V> {
    pub a: V,
    pub b: V,
    pub c: V,
    pub d: V,
    pub q: V,
    pub t: Vec<V>,
    pub m: Vec<usize>,
}

impl<V: Clone> EhsParams<V> {
    pub fn rank(&self) -> usize {
        self.t.len()
    }

    fn check(&self) -> Result<(), EhsError> {
        if self.t.is_empty() || self.t.len() != self.m.len() {
            return Err(EhsError::Shape(format!(
                "need N >= 1 with matching lengths, got {} t values and {} bounds",
                self.t.len(),
                self.m.len()
            )));
        }
        Ok(())
    }

    /// `cd / ab`.
    pub fn a_hat<F: ThetaField<V = V>>(&self, f: &F) -> Result<V, NumError> {
        f.div(&f.mul(&self.c, &self.d), &f.mul(&self.a, &self.b))
    }

    /// `s_i = q^{-m_i} / t_i`.
    pub fn s<F: ThetaField<V = V>>(&self, f: &F) -> Result<Vec<V>, NumError> {
        let mut out = Vec::with_capacity(self.t.len());
        for (ti, &mi) in self.t.iter().zip(&self.m) {
            let qm = f.pow(&self.q, mi as i64)?;
            out.push(f.inv(&f.mul(&qm, ti))?);
        }
        Ok(out)
    }

    /// The same series with `a` and `t` replaced.
    pub fn with_at(&self, a: V, t: Vec<V>) -> Self {
        EhsParams { a, t, ..self.clone() }
    }
}

/// All `k` with `0 <= k_i <= m_i`, in lex order.
pub fn hyper_rectangle(m: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(m.len())];
    for &mi in m {
        out = out
            .into_iter()
            .flat_map(|k| {
                (0..=mi).map(move |j| {
                    let mut k = k.clone();
                    k.push(j);
                    k
                })
            })
            .collect();
    }
    out
}

/// All `k` with `N` nonnegative entries and `|k| <= n`.
pub fn simplex(rank: usize, n: usize) -> Vec<Vec<usize>> {
    hyper_rectangle(&vec![n; rank])
        .into_iter()
        .filter(|k| k.iter().sum::<usize>() <= n)
        .collect()
}

fn weight(k: &[usize]) -> i64 {
    k.iter().sum::<usize>() as i64
}

/// `x * y / z`.
fn mdv<F: ThetaField>(f: &F, x: &F::V, y: &F::V, z: &F::V) -> Result<F::V, NumError> {
    f.div(&f.mul(x, y), z)
}

/// `prod_{i,j} (q t_i/t_j)_{k_i - k_j} / (b t_i/t_j)_{k_i - k_j}` over all
/// pairs of `t`, with signed `k`.
fn well_poised_pairs<F: ThetaField>(f: &F, b: &F::V, q: &F::V, t: &[F::V], k: &[i64]) -> Result<F::V, NumError> {
    let mut acc = f.one();
    for (i, ti) in t.iter().enumerate() {
        for (j, tj) in t.iter().enumerate() {
            let r = f.div(ti, tj)?;
            let x = f.poch_ratio(&[f.mul(q, &r)], &[f.mul(b, &r)], q, k[i] - k[j])?;
            acc = f.mul(&acc, &x);
        }
    }
    Ok(acc)
}

/// `prod_{i <= rows, j <= N} (q^{-m_j} t_i/t_j, b t_i/t_j)_{k_i} / (q^{1-m_j} t_i/b t_j, q t_i/t_j)_{k_i}`
/// where the row set may be longer than `m`.
fn terminating_pairs<F: ThetaField>(
    f: &F,
    b: &F::V,
    q: &F::V,
    rows: &[F::V],
    cols: &[F::V],
    m: &[usize],
    k: &[i64],
) -> Result<F::V, NumError> {
    let mut acc = f.one();
    for (i, ti) in rows.iter().enumerate() {
        for (tj, &mj) in cols.iter().zip(m) {
            let r = f.div(ti, tj)?;
            let qm = f.pow(q, -(mj as i64))?;
            let top = f.mul(&qm, &r);
            let bot = mdv(f, &f.mul(&qm, q), &r, b)?;
            let x = f.poch_ratio(&[top, f.mul(b, &r)], &[bot, f.mul(q, &r)], q, k[i])?;
            acc = f.mul(&acc, &x);
        }
    }
    Ok(acc)
}

/// One summand of `V_m(a; b, c, d; t)`.
pub fn vm_term<F: ThetaField>(f: &F, p: &EhsParams<F::V>, k: &[usize]) -> Result<F::V, NumError> {
    let (a, b, c, d, q) = (&p.a, &p.b, &p.c, &p.d, &p.q);
    let n = p.rank();
    let kk = weight(k);
    let mut acc = f.one();
    for (i, ti) in p.t.iter().enumerate() {
        let ki = k[i] as i64;
        let at = f.mul(a, ti);
        let abt = f.mul(&at, b);
        let aqt = f.mul(&at, q);
        let shift = f.pow(q, ki + kk)?;
        let vwp = f.theta_ratio(&[f.mul(&at, &shift)], &[at.clone()])?;
        let abt_c = f.div(&abt, c)?;
        let abt_d = f.div(&abt, d)?;
        let aqt_c = f.div(&aqt, c)?;
        let aqt_d = f.div(&aqt, d)?;
        let x1 = f.poch_ratio(&[abt_c, abt_d], &[aqt_c, aqt_d], q, ki)?;
        let qm = f.pow(q, p.m[i] as i64)?;
        let aqt_b = f.div(&aqt, b)?;
        let x2 = f.poch_ratio(
            &[at.clone(), f.mul(&abt, &qm)],
            &[aqt_b.clone(), f.mul(&aqt, &qm)],
            q,
            kk,
        )?;
        let x3 = f.poch_ratio(&[aqt_b], &[abt], q, ki + kk)?;
        acc = f.prod(&[acc, vwp, x1, x2, x3]);
    }
    let cq_b = mdv(f, c, q, b)?;
    let dq_b = mdv(f, d, q, b)?;
    let cd = f.poch_ratio(&[c.clone(), d.clone()], &[cq_b, dq_b], q, kk)?;
    let q_b = f.div(q, b)?;
    let power = f.pow(&q_b, (n as i64 + 1) * kk)?;
    let ks: Vec<i64> = k.iter().map(|&x| x as i64).collect();
    let pairs = terminating_pairs(f, b, q, &p.t, &p.t, &p.m, &ks)?;
    let wp = well_poised_pairs(f, b, q, &p.t, &ks)?;
    Ok(f.prod(&[acc, cd, power, pairs, wp]))
}

/// `V_m(a; b, c, d; t)`, summed over the hyper-rectangle `0 <= k <= m`.
pub fn vm<F: ThetaField>(f: &F, p: &EhsParams<F::V>) -> Result<F::V, EhsError> {
    p.check()?;
    let mut total = f.int(0);
    for k in hyper_rectangle(&p.m) {
        let term = vm_term(f, p, &k)?;
        total = f.add(&total, &term);
    }
    Ok(total)
}

/// `V_m` written with an extra parameter `t_{N+1} = 1/a` carrying the index
/// `k_{N+1} = -|k|`, so that every factor is a ratio of the `t_i`.
pub fn vm_succinct<F: ThetaField>(f: &F, p: &EhsParams<F::V>) -> Result<F::V, EhsError> {
    p.check()?;
    let (b, c, d, q) = (&p.b, &p.c, &p.d, &p.q);
    let mut ext = p.t.clone();
    let last = f.inv(&p.a)?;
    ext.push(last.clone());
    let c_last = f.mul(c, &last);
    let d_last = f.mul(d, &last);
    let mut total = f.int(0);
    for k in hyper_rectangle(&p.m) {
        let mut ks: Vec<i64> = k.iter().map(|&x| x as i64).collect();
        ks.push(-weight(&k));
        let mut term = f.one();
        for (ti, &ki) in ext.iter().zip(&ks) {
            let bt = f.mul(b, ti);
            let qt = f.mul(q, ti);
            let num = [f.div(&bt, &c_last)?, f.div(&bt, &d_last)?];
            let den = [f.div(&qt, &c_last)?, f.div(&qt, &d_last)?];
            let x = f.poch_ratio(&num, &den, q, ki)?;
            term = f.mul(&term, &x);
        }
        let pairs = terminating_pairs(f, b, q, &ext, &p.t, &p.m, &ks)?;
        let wp = well_poised_pairs(f, b, q, &ext, &ks)?;
        term = f.prod(&[term, pairs, wp]);
        total = f.add(&total, &term);
    }
    Ok(total)
}

/// Both sides of the `V_m` transformation `a -> cd/ab`, `t_i -> q^{-m_i}/t_i`.
pub fn thm_vst_sides<F: ThetaField>(f: &F, p: &EhsParams<F::V>) -> Result<(F::V, F::V), EhsError> {
    let lhs = vm(f, p)?;
    let ah = p.a_hat(f)?;
    let s = p.s(f)?;
    let moved = p.with_at(ah.clone(), s.clone());
    let base = vm(f, &moved)?;
    let (c, d, q) = (&p.c, &p.d, &p.q);
    let cd = f.mul(c, d);
    let mut pre = f.one();
    for i in 0..p.rank() {
        let aqt = f.mul(&f.mul(&p.a, q), &p.t[i]);
        let hqs = f.mul(&f.mul(&ah, q), &s[i]);
        let num = [aqt.clone(), f.div(&hqs, c)?, f.div(&hqs, d)?, f.div(&aqt, &cd)?];
        let den = [hqs.clone(), f.div(&aqt, c)?, f.div(&aqt, d)?, f.div(&hqs, &cd)?];
        let x = f.poch_ratio(&num, &den, q, p.m[i] as i64)?;
        pre = f.mul(&pre, &x);
    }
    Ok((lhs, f.mul(&base, &pre)))
}

/// The one-variable very-well-poised series
/// `sum_k theta(aq^{2k})/theta(a) (a,b,c,d,ab/c,ab/d,abq^n,q^{-n})_k /
/// (q,aq/b,aq/c,aq/d,cq/b,dq/b,q^{1-n}/b,aq^{n+1})_k (aq/b)_{2k}/(ab)_{2k} (q/b)^{2k}`.
pub fn one_variable_series<F: ThetaField>(
    f: &F,
    a: &F::V,
    b: &F::V,
    c: &F::V,
    d: &F::V,
    q: &F::V,
    n: usize,
) -> Result<F::V, NumError> {
    let ab = f.mul(a, b);
    let aq = f.mul(a, q);
    let qn = f.pow(q, n as i64)?;
    let qmn = f.inv(&qn)?;
    let num = [
        a.clone(),
        b.clone(),
        c.clone(),
        d.clone(),
        f.div(&ab, c)?,
        f.div(&ab, d)?,
        f.mul(&ab, &qn),
        qmn.clone(),
    ];
    let den = [
        q.clone(),
        f.div(&aq, b)?,
        f.div(&aq, c)?,
        f.div(&aq, d)?,
        mdv(f, c, q, b)?,
        mdv(f, d, q, b)?,
        mdv(f, &qmn, q, b)?,
        f.mul(&aq, &qn),
    ];
    let aq_b = f.div(&aq, b)?;
    let q_b = f.div(q, b)?;
    let mut total = f.int(0);
    for k in 0..=n as i64 {
        let q2k = f.pow(q, 2 * k)?;
        let vwp = f.theta_ratio(&[f.mul(a, &q2k)], &[a.clone()])?;
        let x = f.poch_ratio(&num, &den, q, k)?;
        let y = f.poch_ratio(&[aq_b.clone()], &[ab.clone()], q, 2 * k)?;
        let z = f.pow(&q_b, 2 * k)?;
        total = f.add(&total, &f.prod(&[vwp, x, y, z]));
    }
    Ok(total)
}

/// Both sides of the one-variable transformation with `a^ = q^{-n} cd/ab`.
pub fn one_variable_sides<F: ThetaField>(
    f: &F,
    a: &F::V,
    b: &F::V,
    c: &F::V,
    d: &F::V,
    q: &F::V,
    n: usize,
) -> Result<(F::V, F::V), NumError> {
    let lhs = one_variable_series(f, a, b, c, d, q, n)?;
    let qn = f.pow(q, n as i64)?;
    let ah = f.div(&f.mul(c, d), &f.prod(&[a.clone(), b.clone(), qn]))?;
    let base = one_variable_series(f, &ah, b, c, d, q, n)?;
    let aq = f.mul(a, q);
    let hq = f.mul(&ah, q);
    let cd = f.mul(c, d);
    let num = [aq.clone(), f.div(&hq, c)?, f.div(&hq, d)?, f.div(&aq, &cd)?];
    let den = [hq.clone(), f.div(&aq, c)?, f.div(&aq, d)?, f.div(&hq, &cd)?];
    let pre = f.poch_ratio(&num, &den, q, n as i64)?;
    Ok((lhs, f.mul(&base, &pre)))
}

/// Jackson's terminating very-well-poised `6W5` sum and its product, in the
/// basic case.
pub fn jackson_sides<F: ThetaField>(
    f: &F,
    a: &F::V,
    c: &F::V,
    d: &F::V,
    q: &F::V,
    n: usize,
) -> Result<(F::V, F::V), NumError> {
    let one = f.one();
    let aq = f.mul(a, q);
    let cd = f.mul(c, d);
    let qn = f.pow(q, n as i64)?;
    let qmn = f.inv(&qn)?;
    let z = f.div(&f.mul(&aq, &qn), &cd)?;
    let num = [a.clone(), c.clone(), d.clone(), qmn];
    let den = [q.clone(), f.div(&aq, c)?, f.div(&aq, d)?, f.mul(&aq, &qn)];
    let mut total = f.int(0);
    for k in 0..=n as i64 {
        let q2k = f.pow(q, 2 * k)?;
        let vwp = f.div(&f.sub(&one, &f.mul(a, &q2k)), &f.sub(&one, a))?;
        let x = f.poch_ratio(&num, &den, q, k)?;
        let zk = f.pow(&z, k)?;
        total = f.add(&total, &f.prod(&[vwp, x, zk]));
    }
    let rhs = f.poch_ratio(&[aq.clone(), f.div(&aq, &cd)?], &[f.div(&aq, c)?, f.div(&aq, d)?], q, n as i64)?;
    Ok((total, rhs))
}

/// `prod_{i<j} (t_i q^{k_i} - t_j q^{k_j})` for signed exponents.
fn vandermonde<F: ThetaField>(f: &F, t: &[F::V], q: &F::V, k: &[i64]) -> Result<F::V, NumError> {
    let mut shifted = Vec::with_capacity(t.len());
    for (ti, &ki) in t.iter().zip(k) {
        let qk = f.pow(q, ki)?;
        shifted.push(f.mul(ti, &qk));
    }
    let mut acc = f.one();
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            acc = f.mul(&acc, &f.sub(&shifted[i], &shifted[j]));
        }
    }
    Ok(acc)
}

/// `Delta(t)`, refusing coincident entries.
fn vandermonde_nonzero<F: ThetaField>(f: &F, t: &[F::V], q: &F::V) -> Result<F::V, EhsError> {
    let zeros = vec![0; t.len()];
    let v = vandermonde(f, t, q, &zeros)?;
    f.inv(&v).map_err(|_| EhsError::Vandermonde)?;
    Ok(v)
}

/// Both sides of the multiple Jackson sum
/// `sum_k Delta(tq^k)/Delta(t) ... = prod (aqt_i, aqt_i/cd)_{m_i} / (aqt_i/c, aqt_i/d)_{m_i}`
/// (basic case).
pub fn multiple_jackson_sides<F: ThetaField>(
    f: &F,
    a: &F::V,
    c: &F::V,
    d: &F::V,
    q: &F::V,
    t: &[F::V],
    m: &[usize],
) -> Result<(F::V, F::V), EhsError> {
    if t.is_empty() || t.len() != m.len() {
        return Err(EhsError::Shape("t and m must be nonempty and of equal length".into()));
    }
    let delta = vandermonde_nonzero(f, t, q)?;
    let one = f.one();
    let cd = f.mul(c, d);
    let mm = m.iter().sum::<usize>() as i64;
    let qm1 = f.pow(q, mm + 1)?;
    let mut total = f.int(0);
    for k in hyper_rectangle(m) {
        let ks: Vec<i64> = k.iter().map(|&x| x as i64).collect();
        let kk = weight(&k);
        let mut term = f.div(&vandermonde(f, t, q, &ks)?, &delta)?;
        let cdk = f.poch_ratio(&[c.clone(), d.clone()], &[], q, kk)?;
        term = f.mul(&term, &cdk);
        let e2: i64 = (0..ks.len())
            .flat_map(|i| (i + 1..ks.len()).map(move |j| (i, j)))
            .map(|(i, j)| ks[i] * ks[j])
            .sum();
        let qe = f.pow(q, -e2)?;
        term = f.mul(&term, &qe);
        for (i, ti) in t.iter().enumerate() {
            let at = f.mul(a, ti);
            let aqt = f.mul(&at, q);
            let shift = f.pow(q, ks[i] + kk)?;
            let vwp = f.div(&f.sub(&one, &f.mul(&at, &shift)), &f.sub(&one, &at))?;
            let x1 = f.poch_ratio(&[], &[f.div(&aqt, c)?, f.div(&aqt, d)?], q, ks[i])?;
            let qm = f.pow(q, m[i] as i64)?;
            let x2 = f.poch_ratio(&[at.clone()], &[f.mul(&aqt, &qm)], q, kk)?;
            let mut x3 = f.one();
            for (tj, &mj) in t.iter().zip(m) {
                let r = f.div(ti, tj)?;
                let qmj = f.pow(q, -(mj as i64))?;
                let y = f.poch_ratio(&[f.mul(&qmj, &r)], &[f.mul(q, &r)], q, ks[i])?;
                x3 = f.mul(&x3, &y);
            }
            let z = f.div(&f.mul(&at, &qm1), &cd)?;
            let zk = f.pow(&z, ks[i])?;
            term = f.prod(&[term, vwp, x1, x2, x3, zk]);
        }
        total = f.add(&total, &term);
    }
    let mut rhs = f.one();
    for (ti, &mi) in t.iter().zip(m) {
        let aqt = f.mul(&f.mul(a, q), ti);
        let x = f.poch_ratio(
            &[aqt.clone(), f.div(&aqt, &cd)?],
            &[f.div(&aqt, c)?, f.div(&aqt, d)?],
            q,
            mi as i64,
        )?;
        rhs = f.mul(&rhs, &x);
    }
    Ok((total, rhs))
}

/// Parameters of the simplex series `W_n(a; b, c, d; s, t)`.
#[derive(Debug, Clone)]
pub struct WnParams<V> {
    pub a: V,
    pub b: V,
    pub c: V,
    pub d: V,
    pub q: V,
    pub s: Vec<V>,
    pub t: Vec<V>,
    pub n: usize,
}

/// `W_n(a; b, c, d; s, t)`, summed over `k >= 0` with `|k| <= n`.
pub fn wn<F: ThetaField>(f: &F, p: &WnParams<F::V>) -> Result<F::V, EhsError> {
    if p.t.is_empty() || p.s.len() != p.t.len() {
        return Err(EhsError::Shape("s and t must be nonempty and of equal length".into()));
    }
    let (a, b, c, d, q) = (&p.a, &p.b, &p.c, &p.d, &p.q);
    let rank = p.t.len();
    let qn = f.pow(q, p.n as i64)?;
    let qmn = f.inv(&qn)?;
    let ab = f.mul(a, b);
    let aq = f.mul(a, q);
    let q_b = f.div(q, b)?;
    let mut total = f.int(0);
    for k in simplex(rank, p.n) {
        let kk = weight(&k);
        let mut term = f.one();
        for (i, ti) in p.t.iter().enumerate() {
            let ki = k[i] as i64;
            let at = f.mul(a, ti);
            let abt = f.mul(&ab, ti);
            let aqt = f.mul(&aq, ti);
            let aqt_b = f.div(&aqt, b)?;
            let shift = f.pow(q, ki + kk)?;
            let vwp = f.theta_ratio(&[f.mul(&at, &shift)], &[at.clone()])?;
            let x1 = f.poch_ratio(
                &[f.div(&abt, c)?, f.mul(&abt, &qn)],
                &[f.div(&aqt, c)?, f.mul(&aqt, &qn)],
                q,
                ki,
            )?;
            let ds = f.mul(d, &p.s[i]);
            let x2 = f.poch_ratio(&[at.clone(), f.div(&ab, &ds)?], &[aqt_b.clone(), f.div(&aq, &ds)?], q, kk)?;
            let x3 = f.poch_ratio(&[aqt_b], &[abt], q, ki + kk)?;
            term = f.prod(&[term, vwp, x1, x2, x3]);
        }
        let x4 = f.poch_ratio(&[c.clone(), qmn.clone()], &[mdv(f, c, q, b)?, mdv(f, &qmn, q, b)?], q, kk)?;
        let power = f.pow(&q_b, (rank as i64 + 1) * kk)?;
        term = f.prod(&[term, x4, power]);
        let ks: Vec<i64> = k.iter().map(|&x| x as i64).collect();
        for (i, ti) in p.t.iter().enumerate() {
            for (j, tj) in p.t.iter().enumerate() {
                let dts = f.mul(&f.mul(d, ti), &p.s[j]);
                let r = f.div(ti, tj)?;
                let x = f.poch_ratio(
                    &[dts.clone(), f.mul(b, &r)],
                    &[mdv(f, &dts, q, b)?, f.mul(q, &r)],
                    q,
                    ks[i],
                )?;
                term = f.mul(&term, &x);
            }
        }
        let wp = well_poised_pairs(f, b, q, &p.t, &ks)?;
        term = f.mul(&term, &wp);
        total = f.add(&total, &term);
    }
    Ok(total)
}

/// Both sides of the simplex transformation: `W_n(a; b,c,d; s,t)` against
/// `W_n(a^; b,c,d; t,s)` times a product, where `a^ = cd q^{-n} / ab`.
pub fn wn_sides<F: ThetaField>(f: &F, p: &WnParams<F::V>) -> Result<(F::V, F::V), EhsError> {
    let lhs = wn(f, p)?;
    let (a, b, c, d, q) = (&p.a, &p.b, &p.c, &p.d, &p.q);
    let qn = f.pow(q, p.n as i64)?;
    let ah = f.div(&f.mul(c, d), &f.prod(&[a.clone(), b.clone(), qn]))?;
    let swapped = WnParams {
        a: ah.clone(),
        s: p.t.clone(),
        t: p.s.clone(),
        ..p.clone()
    };
    let base = wn(f, &swapped)?;
    let aq = f.mul(a, q);
    let hq = f.mul(&ah, q);
    let cd = f.mul(c, d);
    let mut pre = f.one();
    for (ti, si) in p.t.iter().zip(&p.s) {
        let num = [
            f.mul(&aq, ti),
            f.div(&hq, &f.mul(d, ti))?,
            mdv(f, &hq, si, c)?,
            f.div(&aq, &f.mul(&cd, si))?,
        ];
        let den = [
            f.mul(&hq, si),
            f.div(&aq, &f.mul(d, si))?,
            mdv(f, &aq, ti, c)?,
            f.div(&hq, &f.mul(&cd, ti))?,
        ];
        let x = f.poch_ratio(&num, &den, q, p.n as i64)?;
        pre = f.mul(&pre, &x);
    }
    Ok((lhs, f.mul(&base, &pre)))
}

/// The weight `f_k(a; b, c, d; t)` of the basic `V_m` series once the
/// `m`-dependent factors are split off into [`matrix_entry`].
pub fn weight_fk<F: ThetaField>(f: &F, p: &EhsParams<F::V>, k: &[usize]) -> Result<F::V, NumError> {
    let (a, b, c, d, q) = (&p.a, &p.b, &p.c, &p.d, &p.q);
    let n = p.rank() as i64;
    let kk = weight(k);
    let qp = f.pow(q, n * kk)?;
    let bp = f.pow(b, -(n + 1) * kk)?;
    let mut acc = f.mul(&qp, &bp);
    for (i, ti) in p.t.iter().enumerate() {
        let ki = k[i] as i64;
        let at = f.mul(a, ti);
        let abt = f.mul(&at, b);
        let aqt = f.mul(&at, q);
        let aqt_b = f.div(&aqt, b)?;
        let x1 = f.poch_ratio(&[f.div(&abt, c)?, f.div(&abt, d)?], &[f.div(&aqt, c)?, f.div(&aqt, d)?], q, ki)?;
        let x2 = f.poch_ratio(&[at], &[aqt_b.clone()], q, kk)?;
        let x3 = f.poch_ratio(&[aqt_b], &[abt], q, ki + kk)?;
        acc = f.prod(&[acc, x1, x2, x3]);
    }
    let x4 = f.poch_ratio(&[c.clone(), d.clone()], &[mdv(f, c, q, b)?, mdv(f, d, q, b)?], q, kk)?;
    acc = f.mul(&acc, &x4);
    for (i, ti) in p.t.iter().enumerate() {
        for tj in &p.t {
            let r = f.div(ti, tj)?;
            let x = f.poch_ratio(&[f.mul(b, &r)], &[f.mul(q, &r)], q, k[i] as i64)?;
            acc = f.mul(&acc, &x);
        }
    }
    let ks: Vec<i64> = k.iter().map(|&x| x as i64).collect();
    let wp = well_poised_pairs(f, b, q, &p.t, &ks)?;
    Ok(f.mul(&acc, &wp))
}

/// The lower-triangular matrix `M_{mk}(a; b, c, d; t)`; the row index is
/// `p.m`.
pub fn matrix_entry<F: ThetaField>(f: &F, p: &EhsParams<F::V>, k: &[usize]) -> Result<F::V, NumError> {
    let (a, b, c, d, q) = (&p.a, &p.b, &p.c, &p.d, &p.q);
    let one = f.one();
    let kk = weight(k);
    let cd = f.mul(c, d);
    let mut acc = f.pow(q, kk)?;
    for (i, ti) in p.t.iter().enumerate() {
        let ki = k[i] as i64;
        let mi = p.m[i] as i64;
        let at = f.mul(a, ti);
        let aqt = f.mul(&at, q);
        let shift = f.pow(q, ki + kk)?;
        let vwp = f.div(&f.sub(&one, &f.mul(&at, &shift)), &f.sub(&one, &at))?;
        let qm = f.pow(q, mi)?;
        let x1 = f.poch_ratio(&[f.prod(&[at.clone(), b.clone(), qm.clone()])], &[f.mul(&aqt, &qm)], q, kk)?;
        let x2 = f.poch_ratio(
            &[f.div(&aqt, c)?, f.div(&aqt, d)?],
            &[aqt.clone(), f.div(&aqt, &cd)?],
            q,
            mi,
        )?;
        acc = f.prod(&[acc, vwp, x1, x2]);
        for (tj, &mj) in p.t.iter().zip(&p.m) {
            let r = f.div(ti, tj)?;
            let qmj = f.pow(q, -(mj as i64))?;
            let bot = mdv(f, &f.mul(&qmj, q), &r, b)?;
            let x = f.poch_ratio(&[f.mul(&qmj, &r)], &[bot], q, ki)?;
            acc = f.mul(&acc, &x);
        }
    }
    Ok(acc)
}

/// Laplace expansion; callers keep `N <= 3`.
fn determinant<F: ThetaField>(f: &F, rows: &[Vec<F::V>]) -> F::V {
    match rows.len() {
        0 => f.one(),
        1 => rows[0][0].clone(),
        n => {
            let mut acc = f.int(0);
            for col in 0..n {
                let minor: Vec<Vec<F::V>> = rows[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = f.mul(&rows[0][col], &determinant(f, &minor));
                acc = if col % 2 == 0 { f.add(&acc, &term) } else { f.sub(&acc, &term) };
            }
            acc
        }
    }
}

const MAX_DET_RANK: usize = 3;

/// `det[(t_i q^{e_i})^{N-j} (1 - b^{N-j+1} (1 - a t_i q^{e_i+|m|}) / (1 - ab t_i q^{e_i+|m|})
/// prod_r (t_i q^{e_i} - t_r q^{m_r}) / (b t_i q^{e_i} - t_r q^{m_r}))]`.
fn inversion_determinant<F: ThetaField>(f: &F, p: &EhsParams<F::V>, e: &[usize]) -> Result<F::V, EhsError> {
    let n = p.rank();
    if n > MAX_DET_RANK {
        return Err(EhsError::Shape(format!("determinants are expanded for N <= {MAX_DET_RANK}, got {n}")));
    }
    let (a, b, q) = (&p.a, &p.b, &p.q);
    let one = f.one();
    let mm = p.m.iter().sum::<usize>() as i64;
    let mut ends = Vec::with_capacity(n);
    for (tr, &mr) in p.t.iter().zip(&p.m) {
        let qm = f.pow(q, mr as i64)?;
        ends.push(f.mul(tr, &qm));
    }
    let mut rows = Vec::with_capacity(n);
    for (i, ti) in p.t.iter().enumerate() {
        let qe = f.pow(q, e[i] as i64)?;
        let x = f.mul(ti, &qe);
        let qem = f.pow(q, e[i] as i64 + mm)?;
        let axq = f.prod(&[a.clone(), ti.clone(), qem]);
        let mut ratio = f.div(&f.sub(&one, &axq), &f.sub(&one, &f.mul(b, &axq)))?;
        for end in &ends {
            let num = f.sub(&x, end);
            let den = f.sub(&f.mul(b, &x), end);
            ratio = f.mul(&ratio, &f.div(&num, &den)?);
        }
        let mut row = Vec::with_capacity(n);
        for j in 1..=n {
            let xp = f.pow(&x, (n - j) as i64)?;
            let bp = f.pow(b, (n - j + 1) as i64)?;
            row.push(f.mul(&xp, &f.sub(&one, &f.mul(&bp, &ratio))));
        }
        rows.push(row);
    }
    Ok(determinant(f, &rows))
}

/// The inverse matrix `M^{-1}_{mk}(a; b, c, d; t)`; the row index is `p.m`.
pub fn inverse_entry<F: ThetaField>(f: &F, p: &EhsParams<F::V>, k: &[usize]) -> Result<F::V, EhsError> {
    let (a, b, c, d, q) = (&p.a, &p.b, &p.c, &p.d, &p.q);
    let delta = vandermonde_nonzero(f, &p.t, q)?;
    let ms: Vec<i64> = p.m.iter().map(|&x| x as i64).collect();
    let shifted = vandermonde(f, &p.t, q, &ms)?;
    let mut acc = f.div(&shifted, &f.mul(&delta, &delta))?;
    let kk = weight(k);
    let mm = weight(&p.m);
    let cd = f.mul(c, d);
    let qp = f.pow(q, kk - mm)?;
    acc = f.mul(&acc, &qp);
    for (i, ti) in p.t.iter().enumerate() {
        let ki = k[i] as i64;
        let at = f.mul(a, ti);
        let abt = f.mul(&at, b);
        let aqt = f.mul(&at, q);
        let x1 = f.poch_ratio(&[at.clone()], &[abt.clone()], q, ki + mm)?;
        let x2 = f.poch_ratio(
            &[abt.clone(), f.div(&aqt, &cd)?],
            &[f.div(&aqt, c)?, f.div(&aqt, d)?],
            q,
            ki,
        )?;
        acc = f.prod(&[acc, x1, x2]);
        for (tj, &mj) in p.t.iter().zip(&p.m) {
            let r = f.div(ti, tj)?;
            let qmj = f.pow(q, -(mj as i64))?;
            let top = f.mul(&qmj, &r);
            let br = f.mul(b, &r);
            let qr = f.mul(q, &r);
            let y1 = f.poch_ratio(&[top.clone(), br.clone()], &[qr.clone(), f.mul(&top, b)], q, ki)?;
            let y2 = f.poch_ratio(&[f.div(&qr, b)?], &[qr], q, ms[i])?;
            acc = f.prod(&[acc, y1, y2]);
        }
    }
    let det = inversion_determinant(f, p, k)?;
    Ok(f.mul(&acc, &det))
}

/// `sum_{k <= l <= m} M_{ml} M^{-1}_{lk}` for every `k <= m`, paired with
/// `delta_{mk}`.
pub fn matrix_product_entries<F: ThetaField>(
    f: &F,
    p: &EhsParams<F::V>,
) -> Result<Vec<(Vec<usize>, F::V, F::V)>, EhsError> {
    p.check()?;
    let mut out = Vec::new();
    for k in hyper_rectangle(&p.m) {
        let mut total = f.int(0);
        for l in hyper_rectangle(&p.m) {
            if l.iter().zip(&k).any(|(li, ki)| li < ki) {
                continue;
            }
            let row_l = EhsParams { m: l.clone(), ..p.clone() };
            let x = matrix_entry(f, p, &l)?;
            let y = inverse_entry(f, &row_l, &k)?;
            total = f.add(&total, &f.mul(&x, &y));
        }
        let want = if k == p.m { f.one() } else { f.int(0) };
        out.push((k, total, want));
    }
    Ok(out)
}

/// Which pairs enter the product `prod (qt_i/bt_j)_{m_i-m_j} / (bt_i/t_j)_{m_i-m_j}`
/// on the closed side of the double multi-sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRange {
    /// `1 <= i < j <= N`.
    AllPairs,
    /// `1 <= i < j < N`, dropping every pair that involves `t_N`.
    ExcludeLast,
}

/// Both sides of the basic double multi-sum over `l_i + k_i <= m_i`.
pub fn double_sum_sides<F: ThetaField>(
    f: &F,
    p: &EhsParams<F::V>,
    pairs: PairRange,
) -> Result<(F::V, F::V), EhsError> {
    p.check()?;
    let (a, b, c, d, q) = (&p.a, &p.b, &p.c, &p.d, &p.q);
    let n = p.rank();
    let delta = vandermonde_nonzero(f, &p.t, q)?;
    let mm = weight(&p.m);
    let ms: Vec<i64> = p.m.iter().map(|&x| x as i64).collect();
    let cd = f.mul(c, d);
    let ab = f.mul(a, b);
    let b2 = f.mul(b, b);
    let qm = f.pow(q, mm)?;
    let mut total = f.int(0);
    for lk in hyper_rectangle(&p.m) {
        // lk holds l + k; split it every way
        let splits = hyper_rectangle(&lk);
        for k in splits {
            let l: Vec<i64> = lk.iter().zip(&k).map(|(s, ki)| (*s - *ki) as i64).collect();
            let ks: Vec<i64> = k.iter().map(|&x| x as i64).collect();
            let kk = weight(&k);
            let ll: i64 = l.iter().sum();
            let mut term = f.one();
            for (i, ti) in p.t.iter().enumerate() {
                let (li, ki) = (l[i], ks[i]);
                let s = li + ki;
                let at = f.mul(a, ti);
                let abt = f.mul(&ab, ti);
                let aqt = f.mul(&at, q);
                let x1 = f.poch_ratio(&[f.mul(&at, &qm)], &[f.mul(&abt, &qm)], q, s)?;
                let x2 = f.poch_ratio(&[f.div(&aqt, &cd)?], &[f.div(&abt, &cd)?], q, s - kk)?;
                let x3 = f.poch_ratio(&[f.div(&abt, c)?, f.div(&abt, d)?], &[f.div(&aqt, c)?, f.div(&aqt, d)?], q, li)?;
                let q1 = f.pow(q, kk - li)?;
                let q2 = f.pow(q, kk - li - ki)?;
                let x4 = f.div(&f.sub(&abt, &f.mul(&cd, &q1)), &f.sub(&abt, &f.mul(&cd, &q2)))?;
                let x5 = f.poch_ratio(&[f.div(&cd, &at)?], &[f.div(&f.mul(&cd, q), &abt)?], q, kk)?;
                let q3 = f.pow(q, 1 - li + kk - ki)?;
                let top = f.div(&f.mul(&cd, &q3), &f.mul(&at, &b2))?;
                let bot = f.div(&f.mul(&cd, &q2), &at)?;
                let x6 = f.poch_ratio(&[top], &[bot], q, ki)?;
                term = f.prod(&[term, x1, x2, x3, x4, x5, x6]);
                for (j, tj) in p.t.iter().enumerate() {
                    let r = f.div(ti, tj)?;
                    let qmj = f.pow(q, -ms[j])?;
                    let mr = f.mul(&qmj, &r);
                    let y1 = f.poch_ratio(&[mr.clone()], &[f.mul(b, &mr)], q, s)?;
                    let y2 = f.poch_ratio(&[f.mul(b, &r)], &[f.mul(q, &r)], q, li)?;
                    let ql = f.pow(q, li - l[j])?;
                    let lr = f.mul(&ql, &r);
                    let y3 = f.poch_ratio(&[f.mul(b, &lr)], &[f.mul(q, &lr)], q, ki)?;
                    term = f.prod(&[term, y1, y2, y3]);
                }
            }
            let x7 = f.poch_ratio(&[c.clone(), d.clone()], &[mdv(f, c, q, b)?, mdv(f, d, q, b)?], q, kk)?;
            let qp = f.pow(q, ll + n as i64 * kk)?;
            let bp = f.pow(b, (1 - n as i64) * kk)?;
            term = f.prod(&[term, x7, qp, bp]);
            term = f.div(&term, &delta)?;
            let det = inversion_determinant(f, p, &lk)?;
            term = f.mul(&term, &det);
            total = f.add(&total, &term);
        }
    }
    // q^{sum (i+1) m_i} b^{-2 sum i m_i}, with 1-based i
    let tilt: i64 = ms.iter().enumerate().map(|(i, mi)| (i as i64 + 1) * mi).sum();
    let qp = f.pow(q, tilt + mm)?;
    let bp = f.pow(b, -2 * tilt)?;
    let mut rhs = f.mul(&qp, &bp);
    for (i, ti) in p.t.iter().enumerate() {
        for (j, tj) in p.t.iter().enumerate() {
            let r = f.div(ti, tj)?;
            let qr_b = mdv(f, q, &r, b)?;
            let br = f.mul(b, &r);
            let x = f.poch_ratio(&[br.clone()], &[qr_b.clone()], q, ms[i])?;
            rhs = f.mul(&rhs, &x);
            let upper = match pairs {
                PairRange::AllPairs => n,
                PairRange::ExcludeLast => n - 1,
            };
            if i < j && j < upper {
                let y = f.poch_ratio(&[qr_b], &[br], q, ms[i] - ms[j])?;
                rhs = f.mul(&rhs, &y);
            }
        }
    }
    let x = f.poch_ratio(&[c.clone(), d.clone()], &[mdv(f, c, q, b)?, mdv(f, d, q, b)?], q, mm)?;
    rhs = f.mul(&rhs, &x);
    for (i, ti) in p.t.iter().enumerate() {
        let at = f.mul(a, ti);
        let abt = f.mul(&ab, ti);
        let aqt = f.mul(&at, q);
        let aqt_b = f.div(&aqt, b)?;
        let x1 = f.poch_ratio(&[f.div(&abt, c)?, f.div(&abt, d)?], &[f.div(&aqt, c)?, f.div(&aqt, d)?], q, ms[i])?;
        let x2 = f.poch_ratio(&[abt.clone()], &[aqt_b.clone()], q, mm)?;
        let x3 = f.poch_ratio(&[aqt_b], &[abt], q, ms[i] + mm)?;
        rhs = f.prod(&[rhs, x1, x2, x3]);
    }
    Ok((total, rhs))
}

/// Both sides of the one-variable elliptic double sum over `l + k <= m`.
pub fn elliptic_double_sum_sides<F: ThetaField>(
    f: &F,
    a: &F::V,
    b: &F::V,
    c: &F::V,
    d: &F::V,
    q: &F::V,
    m: usize,
) -> Result<(F::V, F::V), NumError> {
    let m = m as i64;
    let ab = f.mul(a, b);
    let cd = f.mul(c, d);
    let aq = f.mul(a, q);
    let qm = f.pow(q, m)?;
    let qmm = f.inv(&qm)?;
    let cd_ab = f.div(&cd, &ab)?;
    let mut total = f.int(0);
    for l in 0..=m {
        for k in 0..=m - l {
            let q2 = f.pow(q, 2 * (l + k))?;
            let vwp = f.theta_ratio(&[f.mul(&ab, &q2)], &[ab.clone()])?;
            let x1 = f.poch_ratio(
                &[f.mul(a, &qm), qmm.clone()],
                &[mdv(f, b, q, &qm)?, f.prod(&[ab.clone(), q.clone(), qm.clone()])],
                q,
                l + k,
            )?;
            let x2 = f.poch_ratio(
                &[b.clone(), f.div(&ab, c)?, f.div(&ab, d)?, f.div(&aq, &cd)?],
                &[q.clone(), f.div(&aq, c)?, f.div(&aq, d)?, f.div(&ab, &cd)?],
                q,
                l,
            )?;
            let ql = f.pow(q, l)?;
            let qkl = f.pow(q, k - l)?;
            let qml = f.pow(q, -l)?;
            let x3 = f.theta_ratio(&[f.mul(&cd_ab, &qkl)], &[f.mul(&cd_ab, &qml)])?;
            let q1l = f.pow(q, 1 - l)?;
            let top = f.div(&f.mul(&cd, &q1l), &f.mul(&ab, b))?;
            let bot = f.div(&f.mul(&cd, &qml), a)?;
            let x4 = f.poch_ratio(&[top], &[bot], q, k)?;
            let x5 = f.poch_ratio(
                &[b.clone(), c.clone(), d.clone(), f.div(&cd, a)?],
                &[q.clone(), mdv(f, c, q, b)?, mdv(f, d, q, b)?, f.mul(&cd_ab, q)],
                q,
                k,
            )?;
            let qk = f.pow(q, k)?;
            total = f.add(&total, &f.prod(&[vwp, x1, x2, ql, x3, x4, x5, qk]));
        }
    }
    let aq_b = f.div(&aq, b)?;
    let y1 = f.poch_ratio(&[aq_b.clone()], &[ab.clone()], q, 2 * m)?;
    let y2 = f.poch_ratio(
        &[f.mul(&ab, q), b.clone(), c.clone(), d.clone(), f.div(&ab, c)?, f.div(&ab, d)?],
        &[
            f.inv(b)?,
            aq_b,
            f.div(&aq, c)?,
            f.div(&aq, d)?,
            mdv(f, c, q, b)?,
            mdv(f, d, q, b)?,
        ],
        q,
        m,
    )?;
    let z = f.div(q, &f.mul(b, b))?;
    let zm = f.pow(&z, m)?;
    Ok((total, f.prod(&[y1, y2, zm])))
}

/// Principal specialisation of the main theta identity: both of its sides at
/// the ladder `x = (t'_1, t'_1 q, .., t'_1 q^{m_1-1}, ..)` with
/// `t'_i = ab q t_i / c`, `v = c`, `w = d` and nome parameter `t = b`,
/// next to the `V_m` series they reduce to.
#[derive(Debug, Clone)]
pub struct Specialised<V> {
    pub theta_lhs: V,
    pub series_lhs: V,
    pub theta_rhs: V,
    pub series_rhs: V,
}

pub fn principal_specialisation<F: ThetaField>(f: &F, p: &EhsParams<F::V>) -> Result<Specialised<F::V>, EhsError> {
    p.check()?;
    let (a, b, c, d, q) = (&p.a, &p.b, &p.c, &p.d, &p.q);
    let abq_c = f.div(&f.prod(&[a.clone(), b.clone(), q.clone()]), c)?;
    let mut x = Vec::new();
    for (ti, &mi) in p.t.iter().zip(&p.m) {
        let mut xi = f.mul(&abq_c, ti);
        for _ in 0..mi {
            x.push(xi.clone());
            xi = f.mul(&xi, q);
        }
    }
    let theta_lhs = thmrn_side(f, Side::L, &x, c, d, q, b)?;
    let theta_rhs = thmrn_side(f, Side::R, &x, c, d, q, b)?;
    let ah = p.a_hat(f)?;
    let s = p.s(f)?;
    let rhs_series = vm(f, p)?;
    let rhs_pre = ladder_prefactor(f, a, p, &p.t)?;
    let moved = p.with_at(ah.clone(), s.clone());
    let lhs_series = vm(f, &moved)?;
    let lhs_pre = ladder_prefactor(f, &ah, p, &s)?;
    Ok(Specialised {
        theta_lhs,
        series_lhs: f.mul(&lhs_series, &lhs_pre),
        theta_rhs,
        series_rhs: f.mul(&rhs_series, &rhs_pre),
    })
}

/// `prod (aqt_i/d, abt_i)_{m_i} / (aqt_i, abt_i/d)_{m_i}`.
fn ladder_prefactor<F: ThetaField>(f: &F, a: &F::V, p: &EhsParams<F::V>, t: &[F::V]) -> Result<F::V, NumError> {
    let (b, d, q) = (&p.b, &p.d, &p.q);
    let mut acc = f.one();
    for (ti, &mi) in t.iter().zip(&p.m) {
        let at = f.mul(a, ti);
        let aqt = f.mul(&at, q);
        let abt = f.mul(&at, b);
        let x = f.poch_ratio(&[f.div(&aqt, d)?, abt.clone()], &[aqt, f.div(&abt, d)?], q, mi as i64)?;
        acc = f.mul(&acc, &x);
    }
    Ok(acc)
}

/// The basic `V_m` transformation pushed through the matrix pair:
/// `sum_{k <= l <= m} M^{-1}_{ml}(a; t) M_{lk}(a^; s_l) f_k(a^; s_l)` against
/// `f_m(a; t)`, with `a^ = cd/ab` and `s_l = q^{-l_i}/t_i`.
pub fn double_sum_via_matrices<F: ThetaField>(f: &F, p: &EhsParams<F::V>) -> Result<(F::V, F::V), EhsError> {
    p.check()?;
    let ah = p.a_hat(f)?;
    let mut total = f.int(0);
    for l in hyper_rectangle(&p.m) {
        let row = EhsParams { m: l.clone(), ..p.clone() };
        let hat = row.with_at(ah.clone(), row.s(f)?);
        let outer = inverse_entry(f, p, &l)?;
        for k in hyper_rectangle(&l) {
            let x = matrix_entry(f, &hat, &k)?;
            let y = weight_fk(f, &hat, &k)?;
            total = f.add(&total, &f.prod(&[outer.clone(), x, y]));
        }
    }
    let rhs = weight_fk(f, p, &p.m)?;
    Ok((total, rhs))
}

/// Outcome of matching a double-strip Pieri sum against `V_m` summands.
#[derive(Debug, Clone, PartialEq)]
pub enum StripMatch {
    /// Every summand of both series is a fixed multiple of the matching
    /// Pieri product, and vanishes where no `lambda` contributes.
    Proportional { lhs_ratio: BigRat, rhs_ratio: BigRat },
    /// Some summand differs from the Pieri product by a varying factor.
    Mismatch { side: Side, k: Vec<usize> },
    /// The substitution puts a summand on a pole.
    Singular,
}

fn strip_params(mu: &[i64], tau: &[i64], r: i64, s: i64, q: &BigRat, t: &BigRat) -> Result<EhsParams<BigRat>, NumError> {
    let e = ExactP0;
    let n = mu.len();
    let tp = |i: usize| tau.get(i).copied().unwrap_or(0);
    let head: i64 = (0..=n).map(tp).sum();
    let mu_w: i64 = mu.iter().sum();
    let mut ts = Vec::with_capacity(n);
    for (i, &mi) in mu.iter().enumerate() {
        ts.push(e.pow(q, mi)? * e.pow(t, (n - i) as i64)?);
    }
    Ok(EhsParams {
        a: e.pow(q, -r)?,
        b: t.clone(),
        c: e.pow(q, tp(n) - r)? * t,
        d: e.pow(q, mu_w + s - head)?,
        q: q.clone(),
        t: ts,
        m: (0..n).map(|i| (tp(i) - mu[i]) as usize).collect(),
    })
}

/// Compares the two sides of the double-strip identity for `mu`, `tau` and
/// strip sizes `r` (first on the left) and `s` with the basic `V_m`
/// transformation at `a = q^{-r}`, `b = t`, `c = q^{tau_{N+1}-r} t`,
/// `d = q^{|mu|+s-(tau_1+..+tau_{N+1})}`, `t_i = q^{mu_i} t^{N+1-i}`,
/// `m_i = tau_i - mu_i`, where `N = l(mu)`, at rational `q, t`.
///
/// The summand at `k` on the left is matched with `lambda_i = mu_i + k_i`;
/// on the transformed side with `lambda_i = tau_i - k_i`. In both cases
/// `lambda_{N+1}` is fixed by `|lambda|`.
pub fn strip_correspondence(
    mu: &Partition,
    tau: &Partition,
    r: u32,
    s: u32,
    q: &BigRat,
    t: &BigRat,
) -> Result<StripMatch, EhsError> {
    if mu.is_empty() || !tau.contains(mu) || tau.weight() != mu.weight() + r + s || tau.len() > mu.len() + 2 {
        return Err(EhsError::Shape(format!("{tau} is not reachable from {mu} by strips of sizes {r} and {s}")));
    }
    let e = ExactP0;
    let mu_v: Vec<i64> = mu.parts().iter().map(|&x| x as i64).collect();
    let tau_v: Vec<i64> = tau.parts().iter().map(|&x| x as i64).collect();
    let n = mu_v.len();
    let p = strip_params(&mu_v, &tau_v, r as i64, s as i64, q, t)?;
    let hat = p.with_at(p.a_hat(&e)?, p.s(&e)?);
    let mut ratios = Vec::with_capacity(2);
    for (side, series, first) in [(Side::L, &p, r), (Side::R, &hat, s)] {
        let mut terms = Vec::new();
        for k in hyper_rectangle(&series.m) {
            match vm_term(&e, series, &k) {
                Ok(x) => terms.push((k, x)),
                Err(_) => return Ok(StripMatch::Singular),
            }
        }
        let mut ratio: Option<BigRat> = None;
        for (k, term) in terms {
            let mut lam: Vec<i64> = (0..n)
                .map(|i| match side {
                    Side::L => mu_v[i] + k[i] as i64,
                    Side::R => tau_v[i] - k[i] as i64,
                })
                .collect();
            let last = mu.weight() as i64 + first as i64 - lam.iter().sum::<i64>();
            lam.push(last);
            let pieri = pieri_pair(mu, tau, &lam, q, t)?;
            match pieri {
                None if term.is_zero() => {}
                None => return Ok(StripMatch::Mismatch { side, k }),
                Some(w) => {
                    let x = term / w;
                    match &ratio {
                        None => ratio = Some(x),
                        Some(y) if *y == x => {}
                        Some(_) => return Ok(StripMatch::Mismatch { side, k }),
                    }
                }
            }
        }
        ratios.push(ratio.unwrap_or_else(BigRat::zero));
    }
    let rhs_ratio = ratios.pop().expect("two sides");
    let lhs_ratio = ratios.pop().expect("two sides");
    Ok(StripMatch::Proportional { lhs_ratio, rhs_ratio })
}

/// `phi_{tau/lambda} phi_{lambda/mu}` at `(q, t)` when both skew shapes are
/// horizontal strips.
fn pieri_pair(mu: &Partition, tau: &Partition, lam: &[i64], q: &BigRat, t: &BigRat) -> Result<Option<BigRat>, EhsError> {
    if lam.iter().any(|&x| x < 0) || lam.windows(2).any(|w| w[0] < w[1]) {
        return Ok(None);
    }
    let parts: Vec<u32> = lam.iter().map(|&x| x as u32).collect();
    let lam = Partition::from_unsorted(&parts);
    if strip_test(&lam, mu, StripKind::Horizontal).is_none() || strip_test(tau, &lam, StripKind::Horizontal).is_none() {
        return Ok(None);
    }
    let point = [q.clone(), t.clone()];
    let mut acc = BigRat::one();
    for (outer, inner) in [(tau, &lam), (&lam, mu)] {
        let phi = pieri_phi_psi(outer, inner, PhiPsi::Phi).map_err(|e| EhsError::Shape(e.to_string()))?;
        acc *= phi.eval_rational(&point).map_err(|_| EhsError::Num(NumError::Pole))?;
    }
    Ok(Some(acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BigRat;
    use crate::thetaids::c;
    use crate::thetanum::{residual, ExactP0, Numeric, ThetaContext};
    use num_complex::Complex64;

    fn num(p: f64) -> Numeric {
        Numeric::new(ThetaContext::new(c(p, 0.05)).unwrap())
    }

    fn rat(a: i64, b: i64) -> BigRat {
        BigRat::new(a.into(), b.into())
    }

    fn point(m: &[usize]) -> EhsParams<Complex64> {
        let ts = [c(0.9, 0.4), c(-0.7, 1.1), c(1.3, -0.5)];
        EhsParams {
            a: c(0.8, -0.3),
            b: c(1.2, 0.5),
            c: c(-0.6, 0.9),
            d: c(1.1, -0.8),
            q: c(0.75, 0.45),
            t: ts[..m.len()].to_vec(),
            m: m.to_vec(),
        }
    }

    fn exact(m: &[usize]) -> EhsParams<BigRat> {
        let ts = [rat(3, 7), rat(-5, 4), rat(11, 6)];
        EhsParams {
            a: rat(2, 5),
            b: rat(-7, 3),
            c: rat(5, 9),
            d: rat(13, 4),
            q: rat(-2, 3),
            t: ts[..m.len()].to_vec(),
            m: m.to_vec(),
        }
    }

    fn close(l: Complex64, r: Complex64, tol: f64) {
        assert!(residual(l, r) < tol, "{l} vs {r}");
    }

    #[test]
    fn index_sets() {
        assert_eq!(hyper_rectangle(&[2, 1]).len(), 6);
        assert_eq!(hyper_rectangle(&[0, 0]), vec![vec![0, 0]]);
        assert_eq!(simplex(2, 2).len(), 6);
        assert_eq!(simplex(3, 1).len(), 4);
    }

    #[test]
    fn empty_bounds_give_one() {
        let f = num(0.3);
        let p = point(&[0, 0]);
        close(vm(&f, &p).unwrap(), c(1.0, 0.0), 1e-15);
        let (l, r) = thm_vst_sides(&f, &p).unwrap();
        close(l, r, 1e-14);
        let e = ExactP0;
        let p = exact(&[0]);
        assert_eq!(double_sum_sides(&e, &p, PairRange::AllPairs).unwrap(), (BigRat::one(), BigRat::one()));
        assert_eq!(weight_fk(&e, &exact(&[2, 1]), &[0, 0]).unwrap(), BigRat::one());
        assert!(vm(&f, &point(&[])).is_err());
    }

    #[test]
    fn both_forms_of_the_series_agree() {
        let f = num(0.3);
        for m in [vec![2], vec![2, 1], vec![1, 1, 1]] {
            let p = point(&m);
            close(vm(&f, &p).unwrap(), vm_succinct(&f, &p).unwrap(), 1e-12);
            let p = exact(&m);
            assert_eq!(vm(&ExactP0, &p).unwrap(), vm_succinct(&ExactP0, &p).unwrap());
        }
    }

    #[test]
    fn one_variable_case_is_the_rescaled_series() {
        let f = num(0.25);
        let p = point(&[3]);
        let direct = one_variable_series(&f, &p.a, &p.b, &p.c, &p.d, &p.q, 3).unwrap();
        let moved = p.with_at(p.a / p.t[0], p.t.clone());
        close(vm(&f, &moved).unwrap(), direct, 1e-12);
    }

    #[test]
    fn vanishing_numerator_drops_terms() {
        // c = a b t_1 makes (ab t_1 / c)_{k_1} vanish for k_1 >= 1
        let e = ExactP0;
        let mut p = exact(&[2, 1]);
        p.c = &p.a * &p.b * &p.t[0];
        let kept: BigRat = hyper_rectangle(&p.m)
            .into_iter()
            .filter(|k| k[0] == 0)
            .map(|k| vm_term(&e, &p, &k).unwrap())
            .sum();
        assert!(!vm_term(&e, &p, &[0, 1]).unwrap().is_zero());
        assert!(vm_term(&e, &p, &[1, 0]).unwrap().is_zero());
        assert_eq!(vm(&e, &p).unwrap(), kept);
    }

    #[test]
    fn transformation_numeric_and_exact() {
        let f = num(0.3);
        for m in [vec![1], vec![3], vec![2, 1], vec![1, 2]] {
            let (l, r) = thm_vst_sides(&f, &point(&m)).unwrap();
            close(l, r, 1e-10);
            let (l, r) = thm_vst_sides(&ExactP0, &exact(&m)).unwrap();
            assert_eq!(l, r);
        }
    }

    #[test]
    fn one_variable_transformation() {
        let f = num(0.3);
        let p = point(&[1]);
        for n in 0..=4 {
            let (l, r) = one_variable_sides(&f, &p.a, &p.b, &p.c, &p.d, &p.q, n).unwrap();
            close(l, r, 1e-10);
        }
        let p = exact(&[1]);
        let (l, r) = one_variable_sides(&ExactP0, &p.a, &p.b, &p.c, &p.d, &p.q, 2).unwrap();
        assert_eq!(l, r);
        let (l, r) = one_variable_sides(&f, &c(0.4, 0.1), &c(1.5, 0.3), &c(0.2, 0.9), &c(-1.1, 0.4), &c(0.6, 0.6), 0).unwrap();
        close(l, c(1.0, 0.0), 1e-15);
        close(r, c(1.0, 0.0), 1e-15);
    }

    #[test]
    fn multiple_jackson_sum() {
        let e = ExactP0;
        for m in [vec![2], vec![1, 1], vec![2, 1], vec![1, 1, 1]] {
            let p = exact(&m);
            let (l, r) = multiple_jackson_sides(&e, &p.a, &p.c, &p.d, &p.q, &p.t, &p.m).unwrap();
            assert_eq!(l, r, "{m:?}");
        }
        // one variable with t_1 = 1 is Jackson's sum itself
        let p = exact(&[3]);
        let (l, _) = multiple_jackson_sides(&e, &p.a, &p.c, &p.d, &p.q, &[BigRat::one()], &[3]).unwrap();
        let (jl, jr) = jackson_sides(&e, &p.a, &p.c, &p.d, &p.q, 3).unwrap();
        assert_eq!(jl, jr);
        assert_eq!(l, jl);
        let twins = [rat(1, 2), rat(1, 2)];
        assert_eq!(
            multiple_jackson_sides(&e, &p.a, &p.c, &p.d, &p.q, &twins, &[1, 1]),
            Err(EhsError::Vandermonde)
        );
    }

    #[test]
    fn simplex_transformation() {
        let f = num(0.3);
        let p = point(&[1, 1]);
        for n in 0..=3 {
            let w = WnParams {
                a: p.a,
                b: p.b,
                c: p.c,
                d: p.d,
                q: p.q,
                s: vec![c(0.5, 0.7), c(1.4, 0.2)],
                t: p.t.clone(),
                n,
            };
            let (l, r) = wn_sides(&f, &w).unwrap();
            close(l, r, 1e-10);
            if n == 0 {
                close(l, c(1.0, 0.0), 1e-15);
            }
        }
    }

    #[test]
    fn simplex_series_in_one_variable() {
        // W_n with N = 1 is the one-variable series at (a t, b, c, ab/(d s))
        let f = num(0.2);
        let p = point(&[1]);
        let s = c(0.6, -0.4);
        let w = WnParams { a: p.a, b: p.b, c: p.c, d: p.d, q: p.q, s: vec![s], t: p.t.clone(), n: 3 };
        let direct = one_variable_series(&f, &(p.a * p.t[0]), &p.b, &p.c, &(p.a * p.b / (p.d * s)), &p.q, 3).unwrap();
        close(wn(&f, &w).unwrap(), direct, 1e-12);
    }

    #[test]
    fn matrix_pair() {
        let e = ExactP0;
        let p = exact(&[2, 2]);
        for (k, got, want) in matrix_product_entries(&e, &p).unwrap() {
            assert_eq!(got, want, "k = {k:?}");
        }
        let p = exact(&[1, 1]);
        assert!(!matrix_entry(&e, &p, &[1, 1]).unwrap().is_zero());
        assert!(matrix_entry(&e, &p, &[2, 0]).unwrap().is_zero());
        assert!(inverse_entry(&e, &p, &[0, 2]).unwrap().is_zero());
        // the matrix and the weight rebuild the series
        let p = exact(&[2, 1]);
        let mut total = BigRat::zero();
        for k in hyper_rectangle(&p.m) {
            total += matrix_entry(&e, &p, &k).unwrap() * weight_fk(&e, &p, &k).unwrap();
        }
        let mut scale = BigRat::one();
        for (ti, &mi) in p.t.iter().zip(&p.m) {
            let aqt = &p.a * &p.q * ti;
            let cd = &p.c * &p.d;
            scale *= e.poch_ratio(&[&aqt / &p.c, &aqt / &p.d], &[aqt.clone(), &aqt / &cd], &p.q, mi as i64).unwrap();
        }
        assert_eq!(total, vm(&e, &p).unwrap() * scale);
    }

    #[test]
    fn double_multi_sum() {
        let e = ExactP0;
        for m in [vec![2], vec![1, 1], vec![2, 1], vec![1, 2], vec![2, 2]] {
            let p = exact(&m);
            let (l, r) = double_sum_sides(&e, &p, PairRange::AllPairs).unwrap();
            assert_eq!(l, r, "{m:?}");
            let (l, r) = double_sum_via_matrices(&e, &p).unwrap();
            assert_eq!(l, r, "{m:?}");
        }
        let (l, r) = double_sum_sides(&e, &exact(&[2, 1]), PairRange::ExcludeLast).unwrap();
        assert_ne!(l, r);
    }

    #[test]
    fn elliptic_double_sum() {
        let f = num(0.35);
        let p = point(&[1]);
        for m in 0..=4 {
            let (l, r) = elliptic_double_sum_sides(&f, &p.a, &p.b, &p.c, &p.d, &p.q, m).unwrap();
            close(l, r, 1e-10);
        }
    }

    #[test]
    fn principal_specialisation_of_the_theta_identity() {
        let f = num(0.3);
        for m in [vec![1], vec![1, 1], vec![2, 1]] {
            let sp = principal_specialisation(&f, &point(&m)).unwrap();
            close(sp.theta_rhs, sp.series_rhs, 1e-10);
            close(sp.theta_lhs, sp.series_lhs, 1e-10);
        }
    }

    #[test]
    fn double_strips_match_the_series() {
        let (q, t) = (rat(2, 7), rat(3, 5));
        let mu = Partition::from_unsorted(&[2, 2]);
        let tau = Partition::from_unsorted(&[3, 2, 2, 1]);
        match strip_correspondence(&mu, &tau, 2, 2, &q, &t).unwrap() {
            StripMatch::Proportional { lhs_ratio, rhs_ratio } => {
                assert!(!lhs_ratio.is_zero() && !rhs_ratio.is_zero())
            }
            other => panic!("{other:?}"),
        }
        let tau = Partition::from_unsorted(&[4, 2, 1]);
        let mu = Partition::from_unsorted(&[2, 1]);
        assert_eq!(strip_correspondence(&mu, &tau, 2, 2, &q, &t).unwrap(), StripMatch::Singular);
        assert!(strip_correspondence(&mu, &tau, 1, 2, &q, &t).is_err());
    }
}
