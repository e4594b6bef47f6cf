//! Theta-function identities: the main `(v, w, q, t)` subset-sum identity and
//! its reformulations, the classical identities it is compared against, a
//! Rosengren-type companion, and the exact rational identity used by the
//! Kawanaka check.
//!
//! Evaluators are generic over [`ThetaField`], so each identity is written
//! once and run in double precision at a nome `p` or exactly at `p = 0`.

use num_complex::Complex64;

use crate::algebra::{AlgebraError, BigRat, FactoredQT, RatFunc, VarSet, Vars};
use crate::partitions::Partition;
use crate::thetanum::{NumError, ThetaField};

/// All `r`-subsets of `0..n`, as sorted index lists, in lex order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if r <= n {
        go(0, n, r, &mut Vec::with_capacity(r), &mut out);
    }
    out
}

fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in set {
        m[i] = true;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    L,
    R,
}

/// One side of the main identity at `(x; v, w, q, t)`.
pub fn thmrn_side<F: ThetaField>(
    f: &F,
    side: Side,
    x: &[F::V],
    v: &F::V,
    w: &F::V,
    q: &F::V,
    t: &F::V,
) -> Result<F::V, NumError> {
    let n = x.len();
    let qv_t = f.div(&f.mul(q, v), t)?;
    let qw_t = f.div(&f.mul(q, w), t)?;
    let q_over_t = f.div(q, t)?;
    let mut total = f.int(0);
    for r in 0..=n {
        let pre = f.poch_ratio(&[v.clone(), w.clone()], &[qv_t.clone(), qw_t.clone()], q, r as i64)?;
        let qr = f.pow(q, r as i64)?;
        let qmr = f.inv(&qr)?;
        let mut inner = f.int(0);
        for set in subsets(n, r) {
            let inside = membership(n, &set);
            let mut term = f.one();
            for (i, xi) in x.iter().enumerate() {
                let (num, den) = match (side, inside[i]) {
                    (Side::L, true) => {
                        let a = f.div(&f.mul(v, xi), &f.mul(t, w))?;
                        let b = f.div(&f.mul(&f.mul(t, &qmr), xi), &f.mul(q, w))?;
                        let c = f.div(&f.mul(v, xi), &f.mul(q, w))?;
                        let d = f.div(&f.mul(&qmr, xi), w)?;
                        (vec![a, b], vec![c, d])
                    }
                    (Side::L, false) => {
                        let a = f.div(xi, q)?;
                        let b = f.div(&f.mul(&qmr, xi), &f.mul(t, w))?;
                        let c = f.div(xi, t)?;
                        let d = f.div(&f.mul(&qmr, xi), &f.mul(q, w))?;
                        (vec![a, b], vec![c, d])
                    }
                    (Side::R, true) => {
                        let qrvx = f.mul(&f.mul(&qr, v), xi);
                        let a = f.div(xi, q)?;
                        let b = f.div(&qrvx, &f.mul(t, t))?;
                        let c = f.div(xi, t)?;
                        let d = f.div(&qrvx, &f.mul(t, q))?;
                        (vec![a, b], vec![c, d])
                    }
                    (Side::R, false) => {
                        let qrvx = f.mul(&f.mul(&qr, v), xi);
                        let a = f.div(&f.mul(v, xi), &f.mul(t, w))?;
                        let b = f.div(&qrvx, q)?;
                        let c = f.div(&f.mul(v, xi), &f.mul(q, w))?;
                        let d = f.div(&qrvx, t)?;
                        (vec![a, b], vec![c, d])
                    }
                };
                let mut factor = f.theta_ratio(&num, &den)?;
                if inside[i] {
                    factor = f.mul(&factor, &q_over_t);
                }
                term = f.mul(&term, &factor);
            }
            for &i in &set {
                for j in (0..n).filter(|j| !inside[*j]) {
                    // side L uses x_i / x_j, side R the reciprocal
                    let z = match side {
                        Side::L => f.div(&x[i], &x[j])?,
                        Side::R => f.div(&x[j], &x[i])?,
                    };
                    let a = f.div(&f.mul(t, &z), q)?;
                    let b = f.mul(q, &z);
                    let d = f.mul(t, &z);
                    let factor = f.theta_ratio(&[a, b], &[z, d])?;
                    term = f.mul(&term, &factor);
                }
            }
            inner = f.add(&inner, &term);
        }
        total = f.add(&total, &f.mul(&pre, &inner));
    }
    Ok(total)
}

/// Parameters of the main identity.
#[derive(Debug, Clone)]
pub struct ThmrnParams<V> {
    pub x: Vec<V>,
    pub v: V,
    pub w: V,
    pub q: V,
    pub t: V,
}

pub fn eval_thmrn_side<F: ThetaField>(f: &F, side: Side, p: &ThmrnParams<F::V>) -> Result<F::V, NumError> {
    thmrn_side(f, side, &p.x, &p.v, &p.w, &p.q, &p.t)
}

/// `L` at `(x; v, w, q, t)` and `L` at `(x v / (q t w); 1/v, 1/w, 1/q, 1/t)`.
pub fn thmrn_symmetry<F: ThetaField>(f: &F, p: &ThmrnParams<F::V>) -> Result<(F::V, F::V), NumError> {
    let lhs = eval_thmrn_side(f, Side::L, p)?;
    let scale = f.div(&p.v, &f.mul(&f.mul(&p.q, &p.t), &p.w))?;
    let x: Vec<F::V> = p.x.iter().map(|xi| f.mul(&scale, xi)).collect();
    let moved = ThmrnParams {
        x,
        v: f.inv(&p.v)?,
        w: f.inv(&p.w)?,
        q: f.inv(&p.q)?,
        t: f.inv(&p.t)?,
    };
    let rhs = eval_thmrn_side(f, Side::L, &moved)?;
    Ok((lhs, rhs))
}

/// `L` at `(x; v, w, q, t)` against
/// `L(x; q^{-n} t / w, q^{-n} t / v, q, t) (v, w)_n / (qv/t, qw/t)_n (q/t)^n`.
pub fn thmrn_shift<F: ThetaField>(f: &F, p: &ThmrnParams<F::V>) -> Result<(F::V, F::V), NumError> {
    let n = p.x.len() as i64;
    let lhs = eval_thmrn_side(f, Side::L, p)?;
    let qmn = f.pow(&p.q, -n)?;
    let moved = ThmrnParams {
        x: p.x.clone(),
        v: f.div(&f.mul(&qmn, &p.t), &p.w)?,
        w: f.div(&f.mul(&qmn, &p.t), &p.v)?,
        q: p.q.clone(),
        t: p.t.clone(),
    };
    let base = eval_thmrn_side(f, Side::L, &moved)?;
    let qv_t = f.div(&f.mul(&p.q, &p.v), &p.t)?;
    let qw_t = f.div(&f.mul(&p.q, &p.w), &p.t)?;
    let pre = f.poch_ratio(&[p.v.clone(), p.w.clone()], &[qv_t, qw_t], &p.q, n)?;
    let q_over_t = f.div(&p.q, &p.t)?;
    let power = f.pow(&q_over_t, n)?;
    let rhs = f.mul(&f.mul(&base, &pre), &power);
    Ok((lhs, rhs))
}

/// `sum_i prod_j theta(x_i / y_j) / prod_{j != i} theta(x_i / x_j)`, which
/// vanishes when `prod x = prod y`.
pub fn ww_sum<F: ThetaField>(f: &F, x: &[F::V], y: &[F::V]) -> Result<F::V, NumError> {
    let mut total = f.int(0);
    for (i, xi) in x.iter().enumerate() {
        let num = y.iter().map(|yj| f.div(xi, yj)).collect::<Result<Vec<_>, _>>()?;
        let den = x
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, xj)| f.div(xi, xj))
            .collect::<Result<Vec<_>, _>>()?;
        let term = f.theta_ratio(&num, &den)?;
        total = f.add(&total, &term);
    }
    Ok(total)
}

/// `sum_i x_i prod_{j <= n-2} theta(x_i/y_j) theta(x_i y_j) /
/// prod_{j != i} theta(x_i/x_j) theta(x_i x_j)`, which vanishes for `n >= 2`.
pub fn gu_sum<F: ThetaField>(f: &F, x: &[F::V], y: &[F::V]) -> Result<F::V, NumError> {
    let mut total = f.int(0);
    for (i, xi) in x.iter().enumerate() {
        let mut num = Vec::new();
        for yj in y {
            num.push(f.div(xi, yj)?);
            num.push(f.mul(xi, yj));
        }
        let mut den = Vec::new();
        for (j, xj) in x.iter().enumerate() {
            if j != i {
                den.push(f.div(xi, xj)?);
                den.push(f.mul(xi, xj));
            }
        }
        let term = f.theta_ratio(&num, &den)?;
        total = f.add(&total, &f.mul(xi, &term));
    }
    Ok(total)
}

/// The fixed-`r` subset sum
/// `sum_{|I|=r} prod_{i in I, j} theta(x_i y_j)/theta(q x_i y_j)
/// prod_{i in I, j notin I} theta(q x_i/x_j)/theta(x_i/x_j)`.
/// The identity states that exchanging `x` and `y` leaves it unchanged.
pub fn kn_side<F: ThetaField>(f: &F, x: &[F::V], y: &[F::V], q: &F::V, r: usize) -> Result<F::V, NumError> {
    let n = x.len();
    let mut total = f.int(0);
    for set in subsets(n, r) {
        let inside = membership(n, &set);
        let mut num = Vec::new();
        let mut den = Vec::new();
        for &i in &set {
            for yj in y {
                let z = f.mul(&x[i], yj);
                num.push(z.clone());
                den.push(f.mul(q, &z));
            }
            for j in (0..n).filter(|j| !inside[*j]) {
                let z = f.div(&x[i], &x[j])?;
                num.push(f.mul(q, &z));
                den.push(z);
            }
        }
        let term = f.theta_ratio(&num, &den)?;
        total = f.add(&total, &term);
    }
    Ok(total)
}

/// Both sides of the three-term Riemann relation.
pub fn riemann_sides<F: ThetaField>(
    f: &F,
    x: &F::V,
    y: &F::V,
    z: &F::V,
    w: &F::V,
) -> Result<(F::V, F::V), NumError> {
    let four = |f: &F, a: &F::V, b: &F::V| -> Result<F::V, NumError> {
        let args = [f.mul(x, a), f.div(x, a)?, f.mul(y, b), f.div(y, b)?];
        f.theta_ratio(&args, &[])
    };
    let a = four(f, z, w)?;
    let b = four(f, w, z)?;
    let args = [f.mul(x, y), f.div(x, y)?, f.mul(z, w), f.div(z, w)?];
    let c = f.theta_ratio(&args, &[])?;
    let lhs = f.sub(&a, &b);
    let y_z = f.div(y, z)?;
    let rhs = f.mul(&y_z, &c);
    Ok((lhs, rhs))
}

/// Both sides of the four-term identity in `(v, w, t, x)`, each term a
/// product of six thetas.
pub fn four_term_sides<F: ThetaField>(
    f: &F,
    v: &F::V,
    w: &F::V,
    t: &F::V,
    x: &F::V,
) -> Result<(F::V, F::V), NumError> {
    let tv = f.mul(t, v);
    let tw = f.mul(t, w);
    let tx = f.mul(t, x);
    let vx = f.mul(v, x);
    let wx = f.mul(w, x);
    let tvx = f.mul(t, &vx);
    let twx = f.mul(t, &wx);
    let tvwx = f.mul(&tv, &wx);
    let t2 = f.mul(t, t);
    let t2vwx = f.mul(&t2, &f.mul(&vx, w));
    let t2wx = f.mul(&t2, &wx);
    let t2vx = f.mul(&t2, &vx);
    let l1 = f.theta_ratio(&[v.clone(), tx.clone(), tw.clone(), wx.clone(), tvx.clone(), t2vwx.clone()], &[])?;
    let l2 = f.theta_ratio(&[w.clone(), x.clone(), tv.clone(), tvx, t2wx, tvwx.clone()], &[])?;
    let r1 = f.theta_ratio(&[v.clone(), x.clone(), tw, twx.clone(), t2vx, tvwx], &[])?;
    let r2 = f.theta_ratio(&[w.clone(), tx, tv, vx, twx, t2vwx], &[])?;
    Ok((f.add(&l1, &l2), f.add(&r1, &r2)))
}

/// Both sides of the `n = 1` main identity after
/// `(t, v, w, x_1) -> (t q, t v, 1/w, q t x)`; they agree exactly when the
/// four-term identity holds.
pub fn four_term_from_main<F: ThetaField>(
    f: &F,
    v: &F::V,
    w: &F::V,
    t: &F::V,
    x: &F::V,
    q: &F::V,
) -> Result<(F::V, F::V), NumError> {
    let tq = f.mul(t, q);
    let tv = f.mul(t, v);
    let winv = f.inv(w)?;
    let qtx = f.mul(&tq, x);
    let l = thmrn_side(f, Side::L, std::slice::from_ref(&qtx), &tv, &winv, q, &tq)?;
    let r = thmrn_side(f, Side::R, std::slice::from_ref(&qtx), &tv, &winv, q, &tq)?;
    Ok((l, r))
}

/// The four-term identity from the `(n, r) = (2, 1)` subset sum after
/// `(x_2, y_1, y_2, q) -> (t w x x_1, v / x_1, 1 / (t x x_1), t)`.
pub fn four_term_from_kn<F: ThetaField>(
    f: &F,
    v: &F::V,
    w: &F::V,
    t: &F::V,
    x: &F::V,
    x1: &F::V,
) -> Result<(F::V, F::V), NumError> {
    let x2 = f.mul(&f.mul(&f.mul(t, w), x), x1);
    let y1 = f.div(v, x1)?;
    let y2 = f.inv(&f.mul(&f.mul(t, x), x1))?;
    let xs = [x1.clone(), x2];
    let ys = [y1, y2];
    let l = kn_side(f, &xs, &ys, t, 1)?;
    let r = kn_side(f, &ys, &xs, t, 1)?;
    Ok((l, r))
}

/// Parameters of the Rosengren-type identity; `z` is fixed by
/// `v w = q^{n-1} y z`.
#[derive(Debug, Clone)]
pub struct RosengrenParams<V> {
    pub x: Vec<V>,
    pub v: V,
    pub w: V,
    pub y: V,
    pub q: V,
}

pub fn rosengren_z<F: ThetaField>(f: &F, p: &RosengrenParams<F::V>) -> Result<F::V, NumError> {
    let n = p.x.len() as i64;
    let qn = f.pow(&p.q, n - 1)?;
    f.div(&f.mul(&p.v, &p.w), &f.mul(&qn, &p.y))
}

pub fn rosengren_sides<F: ThetaField>(f: &F, p: &RosengrenParams<F::V>) -> Result<(F::V, F::V), NumError> {
    let z = rosengren_z(f, p)?;
    rosengren_sides_with_z(f, p, &z)
}

/// Both sides with `z` supplied; the identity needs `v w = q^{n-1} y z`.
pub fn rosengren_sides_with_z<F: ThetaField>(
    f: &F,
    p: &RosengrenParams<F::V>,
    z: &F::V,
) -> Result<(F::V, F::V), NumError> {
    let n = p.x.len();
    let q = &p.q;
    let mut lhs = f.int(0);
    for r in 0..=n {
        let ri = r as i64;
        let sign = if r % 2 == 0 { f.one() } else { f.int(-1) };
        let qpow = f.pow(q, ri * (ri + 1) / 2 - n as i64 * ri)?;
        let pre = f.poch_ratio(&[p.v.clone(), p.w.clone()], &[p.y.clone(), z.clone()], q, ri)?;
        let pre = f.mul(&f.mul(&sign, &qpow), &pre);
        let q1r = f.pow(q, 1 - ri)?;
        let qmr = f.pow(q, -ri)?;
        let mut inner = f.int(0);
        for set in subsets(n, r) {
            let inside = membership(n, &set);
            let mut num = Vec::new();
            let mut den = Vec::new();
            for (i, xi) in p.x.iter().enumerate() {
                if inside[i] {
                    num.push(f.mul(&p.y, xi));
                    num.push(f.mul(z, xi));
                    den.push(f.mul(&q1r, xi));
                } else {
                    num.push(f.mul(&p.v, xi));
                    num.push(f.mul(&p.w, xi));
                    den.push(f.mul(&qmr, xi));
                }
            }
            for &i in &set {
                for j in (0..n).filter(|j| !inside[*j]) {
                    let zz = f.div(&p.x[i], &p.x[j])?;
                    num.push(f.mul(q, &zz));
                    den.push(zz);
                }
            }
            let term = f.theta_ratio(&num, &den)?;
            inner = f.add(&inner, &term);
        }
        lhs = f.add(&lhs, &f.mul(&pre, &inner));
    }
    let y_v = f.div(&p.y, &p.v)?;
    let y_w = f.div(&p.y, &p.w)?;
    let y_vw = f.div(&p.y, &f.mul(&p.v, &p.w))?;
    let pre = f.poch_ratio(&[y_v, y_w], &[p.y.clone(), y_vw], q, n as i64)?;
    let args: Vec<F::V> = p.x.iter().map(|xi| f.mul(&f.mul(&p.v, &p.w), xi)).collect();
    let prod = f.theta_ratio(&args, &[])?;
    Ok((lhs, f.mul(&pre, &prod)))
}

/// Rational functions in one variable, with `theta(x) = 1 - x`; used to
/// take the `p = 0` limits of the identities.
#[derive(Debug, Clone)]
pub struct RatFuncP0 {
    pub vars: Vars,
}

impl RatFuncP0 {
    pub fn new(var: &str) -> Self {
        RatFuncP0 {
            vars: VarSet::new([var]),
        }
    }

    pub fn constant(&self, c: &BigRat) -> RatFunc {
        RatFunc::constant(&self.vars, c.clone())
    }

    pub fn variable(&self) -> RatFunc {
        RatFunc::var(&self.vars, 0)
    }
}

impl ThetaField for RatFuncP0 {
    type V = RatFunc;

    fn int(&self, c: i64) -> RatFunc {
        RatFunc::from_int(&self.vars, c)
    }

    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a + b
    }

    fn sub(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a - b
    }

    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a * b
    }

    fn inv(&self, a: &RatFunc) -> Result<RatFunc, NumError> {
        a.recip().map_err(|_| NumError::Pole)
    }

    fn theta(&self, x: &RatFunc) -> Result<RatFunc, NumError> {
        if x.is_zero() {
            return Err(NumError::ZeroArgument);
        }
        Ok(&RatFunc::one(&self.vars) - x)
    }
}

/// Leading or trailing coefficient of a univariate polynomial together with
/// its degree.
fn extreme(p: &crate::algebra::MultiPoly, top: bool) -> (i64, BigRat) {
    let deg = if top { p.degree_in(0) } else { p.min_degree_in(0) };
    let c = p
        .terms()
        .iter()
        .find(|(m, _)| m.exps()[0] == deg)
        .map(|(_, c)| c.clone())
        .expect("nonzero polynomial");
    (deg as i64, c)
}

/// Limit of a univariate rational function at infinity (`top`) or at zero;
/// `None` when it diverges.
pub fn univariate_limit(f: &RatFunc, top: bool) -> Option<BigRat> {
    if f.is_zero() {
        return Some(BigRat::from_integer(0.into()));
    }
    let (dn, cn) = extreme(f.numerator(), top);
    let (dd, cd) = extreme(&f.denominator(), top);
    let gap = if top { dn - dd } else { dd - dn };
    match gap {
        g if g < 0 => Some(BigRat::from_integer(0.into())),
        0 => Some(cn / cd),
        _ => None,
    }
}

/// Outcome of comparing the `p = 0` degenerations of the main identity
/// (`t -> oo`) and the Rosengren-type identity (`y -> 0`, `z -> oo`).
#[derive(Debug, Clone)]
pub struct DegenerationCheck {
    /// Left side of the main identity in the limit, at `x -> w q x`.
    pub main_lhs: BigRat,
    /// Its right side in the limit; only the `r = 0` term survives.
    pub main_rhs: BigRat,
    pub rosengren_lhs: BigRat,
    pub rosengren_rhs: BigRat,
}

impl DegenerationCheck {
    /// Both limits are the same identity up to the common factor
    /// `prod (1 - v x_i)` that clears the main identity's right side.
    pub fn agrees(&self, x: &[BigRat], v: &BigRat) -> bool {
        let one = BigRat::from_integer(1.into());
        let clear: BigRat = x.iter().map(|xi| &one - v * xi).product();
        self.main_lhs == self.main_rhs
            && self.rosengren_lhs == self.rosengren_rhs
            && &self.main_lhs * &clear == self.rosengren_lhs
    }
}

/// Limits of both identities at rational `(x, v, w, q)`, computed as exact
/// limits of univariate rational functions.
pub fn degeneration_check(x: &[BigRat], v: &BigRat, w: &BigRat, q: &BigRat) -> Result<DegenerationCheck, NumError> {
    // main identity at p = 0 as a function of t, at x -> w q x
    let f = RatFuncP0::new("t");
    let t = f.variable();
    let xs: Vec<RatFunc> = x.iter().map(|xi| f.constant(&(w * q * xi))).collect();
    let (vv, ww, qq) = (f.constant(v), f.constant(w), f.constant(q));
    let l = thmrn_side(&f, Side::L, &xs, &vv, &ww, &qq, &t)?;
    let r = thmrn_side(&f, Side::R, &xs, &vv, &ww, &qq, &t)?;
    let main_lhs = univariate_limit(&l, true).ok_or(NumError::Pole)?;
    let main_rhs = univariate_limit(&r, true).ok_or(NumError::Pole)?;
    // Rosengren-type identity as a function of y, with z = q^{1-n} v w / y
    let g = RatFuncP0::new("y");
    let y = g.variable();
    let p = RosengrenParams {
        x: x.iter().map(|xi| g.constant(xi)).collect(),
        v: g.constant(v),
        w: g.constant(w),
        y,
        q: g.constant(q),
    };
    let (a, b) = rosengren_sides(&g, &p)?;
    let rosengren_lhs = univariate_limit(&a, false).ok_or(NumError::Pole)?;
    let rosengren_rhs = univariate_limit(&b, false).ok_or(NumError::Pole)?;
    Ok(DegenerationCheck {
        main_lhs,
        main_rhs,
        rosengren_lhs,
        rosengren_rhs,
    })
}

/// Product of binomials `1 - eps q^a t^b` in which factors equal to `1 - 1`
/// are counted rather than stored: the product is zero when more of them
/// sit in the numerator and has a pole when more sit in the denominator.
#[derive(Debug, Clone)]
pub struct BinomialProduct {
    value: FactoredQT,
    units: i32,
}

impl Default for BinomialProduct {
    fn default() -> Self {
        BinomialProduct {
            value: FactoredQT::one(),
            units: 0,
        }
    }
}

impl BinomialProduct {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, eps: i8, a: i32, b: i32, e: i32) {
        if eps == 1 && a == 0 && b == 0 {
            self.units += e;
        } else {
            self.value = self.value.mul(&FactoredQT::binomial(eps, a, b, e).expect("not a unit factor"));
        }
    }

    /// Multiplies by `1 - eps q^a t^b`.
    pub fn num(&mut self, eps: i8, a: i32, b: i32) {
        self.push(eps, a, b, 1);
    }

    /// Divides by `1 - eps q^a t^b`.
    pub fn den(&mut self, eps: i8, a: i32, b: i32) {
        self.push(eps, a, b, -1);
    }

    pub fn times(&mut self, f: &FactoredQT) {
        self.value = self.value.mul(f);
    }

    pub fn finish(self) -> Result<FactoredQT, AlgebraError> {
        match self.units {
            0 => Ok(self.value),
            u if u > 0 => Ok(FactoredQT::zero()),
            _ => Err(AlgebraError::DegenerateFactor),
        }
    }
}

/// `(-t; q)_s / (q; q)_s`.
fn q_binomial_weight(s: usize) -> FactoredQT {
    let s = s as i64;
    FactoredQT::qpoch(-1, 0, 1, s)
        .expect("proper")
        .div(&FactoredQT::qpoch(1, 1, 0, s).expect("proper"))
        .expect("nonzero")
}

/// Both sides of the exact `q,t` identity behind the Kawanaka check, for
/// `mu` padded with zeros to `n` parts.
pub fn final_sides(mu: &Partition, n: usize, r: usize) -> Result<(RatFunc, RatFunc), AlgebraError> {
    let m: Vec<i32> = mu.padded(n).iter().map(|&x| x as i32).collect();
    let n32 = n as i32;
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for s in 0..=r {
        let weight = q_binomial_weight(s);
        let si = s as i32;
        for set in subsets(n, r - s) {
            let inside = membership(n, &set);
            // left: indices are 1-based in the formulas, hence the i + 1
            let mut a = BinomialProduct::new();
            a.times(&weight);
            for &i in &set {
                let i1 = i as i32 + 1;
                a.num(1, n32 - i1, m[i]);
                a.den(-1, n32 - i1 + 1, m[i] - 1);
                for j in (0..n).filter(|j| !inside[*j]) {
                    let d = j as i32 - i as i32;
                    let e = m[i] - m[j];
                    a.num(-1, d + 1, e - 1);
                    a.num(1, d - 1, e);
                    a.den(1, d, e);
                    a.den(-1, d, e - 1);
                }
            }
            lhs.push(a.finish()?.to_ratfunc());
            let mut b = BinomialProduct::new();
            b.times(&weight);
            for (k, &mk) in m.iter().enumerate() {
                let k1 = k as i32 + 1;
                if inside[k] {
                    b.num(-1, n32 - k1 + si, mk + 1);
                    b.den(1, n32 - k1 + si + 1, mk);
                } else {
                    b.num(-1, n32 - k1 + si + 1, mk - 1);
                    b.num(1, n32 - k1, mk);
                    b.den(1, n32 - k1 + si, mk);
                    b.den(-1, n32 - k1 + 1, mk - 1);
                }
            }
            for &i in &set {
                for j in (0..n).filter(|j| !inside[*j]) {
                    let d = j as i32 - i as i32;
                    let e = m[i] - m[j];
                    b.num(-1, d - 1, e + 1);
                    b.num(1, d + 1, e);
                    b.den(1, d, e);
                    b.den(-1, d, e + 1);
                }
            }
            rhs.push(b.finish()?.to_ratfunc());
        }
    }
    let v = VarSet::qt();
    Ok((RatFunc::sum_in(&v, &lhs), RatFunc::sum_in(&v, &rhs)))
}

/// Result of the exact check; `padded` marks a `mu` with fewer than `n`
/// parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FinalCheck {
    pub equal: bool,
    pub padded: bool,
}

pub fn verify_final_exact(mu: &Partition, n: usize, r: usize) -> Result<FinalCheck, AlgebraError> {
    if mu.len() > n {
        return Err(AlgebraError::DegenerateFactor);
    }
    let (l, rr) = final_sides(mu, n, r)?;
    Ok(FinalCheck {
        equal: l.eq_cross(&rr),
        padded: mu.len() < n,
    })
}

/// Complex point helper for tests and callers.
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
