//! Named identities with parameter bounds, evaluated one trial at a time.
//!
//! Sampled identities draw a fresh point for every size up to the bounds in
//! [`Params`]; numeric trials report the largest residual, exact trials
//! report whether every size agreed. Symbolic identities ignore the seed and
//! sweep their whole range in one trial.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::BigRat;
use crate::ehs::{
    double_sum_sides, elliptic_double_sum_sides, hyper_rectangle, jackson_sides, matrix_product_entries,
    multiple_jackson_sides, one_variable_sides, principal_specialisation, thm_vst_sides, vm, vm_succinct, wn_sides,
    EhsParams, PairRange, WnParams,
};
use crate::kawanaka::{
    final_matches_vertical, pieri_forms_agree, verify_kawanaka, verify_md, verify_proppieri, verify_recursion,
    verify_specialised, MdVariant, PieriForm, Specialisation, TruncationSpec,
};
use crate::partitions::{partitions_up_to, sub_partitions, Partition};
use crate::sampler::{Reject, SampleError, Sampler};
use crate::thetaids::{
    degeneration_check, eval_thmrn_side, four_term_from_kn, four_term_from_main, four_term_sides, gu_sum, kn_side,
    riemann_sides, rosengren_sides, thmrn_shift, thmrn_symmetry, verify_final_exact, ww_sum, RosengrenParams, Side,
    ThmrnParams,
};
use crate::thetanum::{residual, ExactP0, ThetaField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Numeric,
    Exact,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Numeric => "numeric",
            Mode::Exact => "exact",
        }
    }
}

/// Size bounds. Every field is an inclusive maximum; which ones apply
/// depends on the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Number of variables, or the series length for single-sum identities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Rank of the index lattice.
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Bound vector for multi-indexed series, or a box of partitions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<usize>>,
    /// Truncation degree or partition weight.
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    /// Strip length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
}

impl Params {
    fn set_fields(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.n.is_some() {
            out.push("n");
        }
        if self.rank.is_some() {
            out.push("N");
        }
        if self.m.is_some() {
            out.push("m");
        }
        if self.d.is_some() {
            out.push("D");
        }
        if self.r.is_some() {
            out.push("r");
        }
        out
    }

    fn n(&self) -> usize {
        self.n.unwrap_or(0)
    }

    fn rank(&self) -> usize {
        self.rank.unwrap_or(1)
    }

    fn m(&self) -> &[usize] {
        self.m.as_deref().unwrap_or(&[])
    }

    fn d(&self) -> u32 {
        self.d.unwrap_or(0)
    }

    fn r(&self) -> u32 {
        self.r.unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PointValue {
    Int(i64),
    Complex([f64; 2]),
    Complexes(Vec<[f64; 2]>),
    Rational(String),
    Rationals(Vec<String>),
    Text(String),
}

pub type Point = BTreeMap<String, PointValue>;

#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Residual { residual: f64, point: Point },
    Exact { pass: bool, point: Point },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegistryError {
    #[error("unknown identity `{0}`")]
    UnknownId(String),
    #[error("identity `{id}` has no {mode} mode")]
    UnsupportedMode { id: String, mode: &'static str },
    #[error("identity `{id}`: {msg}")]
    BadParams { id: String, msg: String },
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error("identity `{id}`: {msg}")]
    Evaluation { id: String, msg: String },
}

#[derive(Debug, Clone)]
pub struct IdentityInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub modes: &'static [Mode],
    /// False for identities checked over a fixed symbolic range.
    pub sampled: bool,
    /// Parameter names accepted, with their defaults in `defaults`.
    pub accepts: &'static [&'static str],
    pub defaults: Params,
}

const BOTH: &[Mode] = &[Mode::Numeric, Mode::Exact];
const EXACT: &[Mode] = &[Mode::Exact];

fn p(n: Option<usize>, rank: Option<usize>, m: Option<&[usize]>, d: Option<u32>, r: Option<u32>) -> Params {
    Params {
        n,
        rank,
        m: m.map(|v| v.to_vec()),
        d,
        r,
    }
}

fn info(
    id: &'static str,
    summary: &'static str,
    modes: &'static [Mode],
    sampled: bool,
    accepts: &'static [&'static str],
    defaults: Params,
) -> IdentityInfo {
    IdentityInfo {
        id,
        summary,
        modes,
        sampled,
        accepts,
        defaults,
    }
}

/// Every registered identity, in listing order.
pub fn list() -> Vec<IdentityInfo> {
    vec![
        info("thmrn", "theta subset-sum identity in x_1..x_n with v, w, q, t", BOTH, true, &["n"], p(Some(4), None, None, None, None)),
        info("thmrn-symm", "symmetric reformulation of thmrn", BOTH, true, &["n"], p(Some(4), None, None, None, None)),
        info("thmrn-shift", "thmrn with I replaced by its complement", BOTH, true, &["n"], p(Some(4), None, None, None, None)),
        info("ww", "sum_i prod_j theta(x_i/y_j)/prod theta(x_i/x_j) = 0 when prod x = prod y", BOTH, true, &["n"], p(Some(5), None, None, None, None)),
        info("gu", "Gustafson's vanishing sum with n-2 free y", BOTH, true, &["n"], p(Some(5), None, None, None, None)),
        info("kn", "Kajihara-Noumi subset sums are symmetric under x <-> y, each r", BOTH, true, &["n"], p(Some(4), None, None, None, None)),
        info("rr", "three-term Riemann relation", BOTH, true, &[], Params::default()),
        info("nis1", "four-term identity, direct and from the n = 1 cases of thmrn and kn", BOTH, true, &[], Params::default()),
        info("thmr", "Rosengren-type identity with vw = q^(n-1) y z (alias rosengren)", BOTH, true, &["n"], p(Some(4), None, None, None, None)),
        info("thmr-limit", "p = 0 limits of thmrn (t -> oo) and thmr (y -> 0) coincide", EXACT, true, &["n"], p(Some(3), None, None, None, None)),
        info("final", "exact q,t subset-sum identity for mu inside a box, against the vertical Pieri form", EXACT, false, &["m", "r"], p(None, None, Some(&[3, 3, 3]), None, Some(4))),
        info("vm", "V_m series, direct against succinct form", BOTH, true, &["m"], p(None, None, Some(&[3, 3]), None, None)),
        info("thm-vst", "V_m transformation a -> cd/ab, t_i -> q^-m_i/t_i", BOTH, true, &["m"], p(None, None, Some(&[3, 3]), None, None)),
        info("new", "one-variable transformation, series length up to n", BOTH, true, &["n"], p(Some(5), None, None, None, None)),
        info("cornew", "multiple Jackson summation (p = 0); N = 1 against the closed 6W5 sum", EXACT, true, &["m"], p(None, None, Some(&[3, 3, 3]), None, None)),
        info("wn", "W_n simplex transformation", BOTH, true, &["n", "N"], p(Some(3), Some(2), None, None, None)),
        info("cordmsum", "basic double multi-sum closed form", EXACT, true, &["m"], p(None, None, Some(&[2, 2]), None, None)),
        info("matrix-inverse", "M M^-1 = identity on the lower-triangular matrix pair", EXACT, true, &["m"], p(None, None, Some(&[2, 2]), None, None)),
        info("elliptic-ext-n1", "one-variable elliptic double sum", BOTH, true, &["m"], p(None, None, Some(&[5]), None, None)),
        info("mps-consistency", "ladder specialisation of thmrn against the V_m transformation", BOTH, true, &["m", "D"], p(None, None, Some(&[4, 4]), Some(4), None)),
        info("kawanaka", "Kawanaka identity, truncated at degree D in n variables", EXACT, false, &["n", "D"], p(Some(3), None, None, Some(5), None)),
        info("proppieri", "horizontal Pieri-level identity, |mu| <= D, l(mu) <= n, strips up to r; also against conjugation", EXACT, false, &["n", "D", "r"], p(Some(4), None, None, Some(5), Some(4))),
        info("proppieri-prime", "vertical Pieri-level identity, |mu| <= D, l(mu) <= n, strips up to r", EXACT, false, &["n", "D", "r"], p(Some(4), None, None, Some(5), Some(4))),
        info("rec", "recursion in the number of variables, with both lemma expansions", EXACT, false, &["n", "D"], p(Some(2), None, None, Some(3), None)),
        info("md-a", "formal-b Macdonald identity weighted by columns (even legs)", EXACT, false, &["n", "D"], p(Some(2), None, None, Some(3), None)),
        info("md-b", "formal-b Macdonald identity weighted by rows (odd arms)", EXACT, false, &["n", "D"], p(Some(2), None, None, Some(3), None)),
        info("schur-qt", "Kawanaka identity at q = t (Schur case)", EXACT, false, &["n", "D"], p(Some(2), None, None, Some(3), None)),
        info("hall-littlewood", "Kawanaka identity at q = 0 against independent Hall-Littlewood polynomials", EXACT, false, &["n", "D"], p(Some(2), None, None, Some(3), None)),
    ]
}

pub fn lookup(id: &str) -> Result<IdentityInfo, RegistryError> {
    let mut want = id.to_ascii_lowercase();
    if want == "rosengren" {
        want = "thmr".into();
    }
    list()
        .into_iter()
        .find(|i| i.id == want)
        .ok_or_else(|| RegistryError::UnknownId(id.to_string()))
}

impl IdentityInfo {
    /// Fills unset bounds from the defaults and rejects fields the identity
    /// does not use.
    pub fn resolve(&self, given: &Params) -> Result<Params, RegistryError> {
        let bad = |msg: String| RegistryError::BadParams {
            id: self.id.to_string(),
            msg,
        };
        if let Some(f) = given.set_fields().into_iter().find(|f| !self.accepts.contains(f)) {
            return Err(bad(format!("does not take parameter `{f}`")));
        }
        let d = &self.defaults;
        let out = Params {
            n: given.n.or(d.n),
            rank: given.rank.or(d.rank),
            m: given.m.clone().or_else(|| d.m.clone()),
            d: given.d.or(d.d),
            r: given.r.or(d.r),
        };
        if let Some(m) = &out.m {
            if m.is_empty() {
                return Err(bad("m must be nonempty".into()));
            }
        }
        match self.id {
            "gu" if out.n() < 2 => return Err(bad("needs n >= 2".into())),
            "wn" if out.rank() == 0 => return Err(bad("needs N >= 1".into())),
            "elliptic-ext-n1" if out.m().len() != 1 => return Err(bad("m must have one entry".into())),
            "cordmsum" | "matrix-inverse" | "cornew" if out.m().len() > 3 => {
                return Err(bad("rank is capped at 3".into()))
            }
            _ => {}
        }
        Ok(out)
    }

    pub fn supports(&self, mode: Mode) -> bool {
        self.modes.contains(&mode)
    }
}

/// Values the sampler can draw in a given mode.
trait Scalar: Clone {
    fn draw(s: &mut Sampler) -> Self;
    fn record(v: &[Self]) -> PointValue;
}

impl Scalar for Complex64 {
    fn draw(s: &mut Sampler) -> Self {
        s.complex()
    }

    fn record(v: &[Self]) -> PointValue {
        match v {
            [z] => PointValue::Complex([z.re, z.im]),
            _ => PointValue::Complexes(v.iter().map(|z| [z.re, z.im]).collect()),
        }
    }
}

impl Scalar for BigRat {
    fn draw(s: &mut Sampler) -> Self {
        s.rational()
    }

    fn record(v: &[Self]) -> PointValue {
        match v {
            [z] => PointValue::Rational(z.to_string()),
            _ => PointValue::Rationals(v.iter().map(|z| z.to_string()).collect()),
        }
    }
}

fn draws<V: Scalar>(s: &mut Sampler, k: usize) -> Vec<V> {
    (0..k).map(|_| V::draw(s)).collect()
}

/// Builder for the recorded point of one evaluation.
struct Rec(Point);

impl Rec {
    fn new() -> Self {
        Rec(Point::new())
    }

    fn int(mut self, k: &str, v: usize) -> Self {
        self.0.insert(k.into(), PointValue::Int(v as i64));
        self
    }

    fn ints(mut self, k: &str, v: &[usize]) -> Self {
        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        self.0.insert(k.into(), PointValue::Text(format!("[{}]", s.join(","))));
        self
    }

    fn one<V: Scalar>(mut self, k: &str, v: &V) -> Self {
        self.0.insert(k.into(), V::record(std::slice::from_ref(v)));
        self
    }

    fn many<V: Scalar>(mut self, k: &str, v: &[V]) -> Self {
        self.0.insert(k.into(), V::record(v));
        self
    }

    fn text(mut self, k: &str, v: String) -> Self {
        self.0.insert(k.into(), PointValue::Text(v));
        self
    }
}

/// One sampled evaluation: pairs of values that must agree, and the point.
type Case<V> = (Vec<(V, V)>, Point);

/// Every size of a sampled identity, each drawing a fresh point.
fn sizes(id: &str, p: &Params) -> Vec<Vec<usize>> {
    match id {
        "thmrn" | "thmrn-symm" | "thmrn-shift" | "ww" | "kn" | "thmr" | "thmr-limit" => {
            (1..=p.n()).map(|n| vec![n]).collect()
        }
        "gu" => (2..=p.n()).map(|n| vec![n]).collect(),
        "new" => (0..=p.n()).map(|n| vec![n]).collect(),
        "rr" | "nis1" => vec![vec![]],
        "vm" | "thm-vst" | "cornew" | "cordmsum" => prefix_shapes(p.m()),
        "mps-consistency" => prefix_shapes(p.m())
            .into_iter()
            .filter(|m| m.iter().sum::<usize>() as u32 <= p.d())
            .collect(),
        "matrix-inverse" => hyper_rectangle(p.m()),
        "elliptic-ext-n1" => (0..=p.m()[0]).map(|k| vec![k]).collect(),
        "wn" => {
            let mut out = Vec::new();
            for rank in 1..=p.rank() {
                for n in 0..=p.n() {
                    out.push(vec![rank, n]);
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

/// Shapes `m'` of every rank up to `m.len()` with `m'_i <= m_i`.
fn prefix_shapes(m: &[usize]) -> Vec<Vec<usize>> {
    (1..=m.len()).flat_map(|k| hyper_rectangle(&m[..k])).collect()
}

fn ehs_params<V: Scalar>(s: &mut Sampler, m: &[usize]) -> EhsParams<V> {
    EhsParams {
        a: V::draw(s),
        b: V::draw(s),
        c: V::draw(s),
        d: V::draw(s),
        q: V::draw(s),
        t: draws(s, m.len()),
        m: m.to_vec(),
    }
}

fn record_ehs<V: Scalar>(p: &EhsParams<V>) -> Rec {
    Rec::new()
        .ints("m", &p.m)
        .one("a", &p.a)
        .one("b", &p.b)
        .one("c", &p.c)
        .one("d", &p.d)
        .one("q", &p.q)
        .many("t", &p.t)
}

/// Draws a point for `id` at `size` and evaluates both sides over `f`.
fn sampled_case<F>(id: &str, size: &[usize], s: &mut Sampler, f: &F) -> Result<Case<F::V>, Reject>
where
    F: ThetaField,
    F::V: Scalar,
{
    let zero = f.int(0);
    match id {
        "thmrn" | "thmrn-symm" | "thmrn-shift" => {
            let n = size[0];
            let p = ThmrnParams {
                x: draws(s, n),
                v: F::V::draw(s),
                w: F::V::draw(s),
                q: F::V::draw(s),
                t: F::V::draw(s),
            };
            let pair = match id {
                "thmrn" => (eval_thmrn_side(f, Side::L, &p)?, eval_thmrn_side(f, Side::R, &p)?),
                "thmrn-symm" => thmrn_symmetry(f, &p)?,
                _ => thmrn_shift(f, &p)?,
            };
            let rec = Rec::new().many("x", &p.x).one("v", &p.v).one("w", &p.w).one("q", &p.q).one("t", &p.t);
            Ok((vec![pair], rec.0))
        }
        "ww" => {
            let n = size[0];
            let x: Vec<F::V> = draws(s, n);
            let mut y: Vec<F::V> = draws(s, n - 1);
            let last = f.div(&f.prod(&x), &f.prod(&y))?;
            y.push(last);
            let l = ww_sum(f, &x, &y)?;
            Ok((vec![(l, zero)], Rec::new().many("x", &x).many("y", &y).0))
        }
        "gu" => {
            let n = size[0];
            let x: Vec<F::V> = draws(s, n);
            let y: Vec<F::V> = draws(s, n - 2);
            let l = gu_sum(f, &x, &y)?;
            Ok((vec![(l, zero)], Rec::new().many("x", &x).many("y", &y).0))
        }
        "kn" => {
            let n = size[0];
            let x: Vec<F::V> = draws(s, n);
            let y: Vec<F::V> = draws(s, n);
            let q = F::V::draw(s);
            let mut pairs = Vec::new();
            for r in 0..=n {
                pairs.push((kn_side(f, &x, &y, &q, r)?, kn_side(f, &y, &x, &q, r)?));
            }
            Ok((pairs, Rec::new().many("x", &x).many("y", &y).one("q", &q).0))
        }
        "rr" => {
            let v: Vec<F::V> = draws(s, 4);
            let pair = riemann_sides(f, &v[0], &v[1], &v[2], &v[3])?;
            let rec = Rec::new().one("x", &v[0]).one("y", &v[1]).one("z", &v[2]).one("w", &v[3]);
            Ok((vec![pair], rec.0))
        }
        "nis1" => {
            let v: Vec<F::V> = draws(s, 6);
            let (vv, w, t, x, q, x1) = (&v[0], &v[1], &v[2], &v[3], &v[4], &v[5]);
            let pairs = vec![
                four_term_sides(f, vv, w, t, x)?,
                four_term_from_main(f, vv, w, t, x, q)?,
                four_term_from_kn(f, vv, w, t, x, x1)?,
            ];
            let rec = Rec::new().one("v", vv).one("w", w).one("t", t).one("x", x).one("q", q).one("x1", x1);
            Ok((pairs, rec.0))
        }
        "thmr" => {
            let p = RosengrenParams {
                x: draws(s, size[0]),
                v: F::V::draw(s),
                w: F::V::draw(s),
                y: F::V::draw(s),
                q: F::V::draw(s),
            };
            let pair = rosengren_sides(f, &p)?;
            let rec = Rec::new().many("x", &p.x).one("v", &p.v).one("w", &p.w).one("y", &p.y).one("q", &p.q);
            Ok((vec![pair], rec.0))
        }
        "vm" | "thm-vst" | "cornew" | "cordmsum" | "mps-consistency" => {
            let p = ehs_params::<F::V>(s, size);
            let pairs = match id {
                "vm" => vec![(vm(f, &p)?, vm_succinct(f, &p)?)],
                "thm-vst" => vec![thm_vst_sides(f, &p)?],
                "cornew" => {
                    let mut v = vec![multiple_jackson_sides(f, &p.a, &p.c, &p.d, &p.q, &p.t, &p.m)?];
                    if p.m.len() == 1 {
                        // with t_1 = 1 the single sum is the closed 6W5 one
                        let one = [f.one()];
                        let (ml, _) = multiple_jackson_sides(f, &p.a, &p.c, &p.d, &p.q, &one, &p.m)?;
                        let (jl, jr) = jackson_sides(f, &p.a, &p.c, &p.d, &p.q, p.m[0])?;
                        v.push((ml, jl.clone()));
                        v.push((jl, jr));
                    }
                    v
                }
                "cordmsum" => vec![double_sum_sides(f, &p, PairRange::AllPairs)?],
                _ => {
                    let sp = principal_specialisation(f, &p)?;
                    vec![
                        (sp.theta_lhs.clone(), sp.series_lhs),
                        (sp.theta_rhs.clone(), sp.series_rhs),
                        (sp.theta_lhs, sp.theta_rhs),
                    ]
                }
            };
            Ok((pairs, record_ehs(&p).0))
        }
        "matrix-inverse" => {
            let p = ehs_params::<F::V>(s, size);
            let pairs = matrix_product_entries(f, &p)?
                .into_iter()
                .map(|(_, got, want)| (got, want))
                .collect();
            Ok((pairs, record_ehs(&p).0))
        }
        "new" => {
            let v: Vec<F::V> = draws(s, 5);
            let pair = one_variable_sides(f, &v[0], &v[1], &v[2], &v[3], &v[4], size[0])?;
            let rec = Rec::new().int("n", size[0]).one("a", &v[0]).one("b", &v[1]).one("c", &v[2]).one("d", &v[3]).one("q", &v[4]);
            Ok((vec![pair], rec.0))
        }
        "elliptic-ext-n1" => {
            let v: Vec<F::V> = draws(s, 5);
            let pair = elliptic_double_sum_sides(f, &v[0], &v[1], &v[2], &v[3], &v[4], size[0])?;
            let rec = Rec::new().int("m", size[0]).one("a", &v[0]).one("b", &v[1]).one("c", &v[2]).one("d", &v[3]).one("q", &v[4]);
            Ok((vec![pair], rec.0))
        }
        "wn" => {
            let (rank, n) = (size[0], size[1]);
            let p = WnParams {
                a: F::V::draw(s),
                b: F::V::draw(s),
                c: F::V::draw(s),
                d: F::V::draw(s),
                q: F::V::draw(s),
                s: draws(s, rank),
                t: draws(s, rank),
                n,
            };
            let pair = wn_sides(f, &p)?;
            let rec = Rec::new()
                .int("n", n)
                .one("a", &p.a)
                .one("b", &p.b)
                .one("c", &p.c)
                .one("d", &p.d)
                .one("q", &p.q)
                .many("s", &p.s)
                .many("t", &p.t);
            Ok((vec![pair], rec.0))
        }
        other => Err(Reject::Fatal(format!("`{other}` is not a sampled identity"))),
    }
}

fn worst_residual(pairs: &[(Complex64, Complex64)]) -> f64 {
    pairs
        .iter()
        .map(|(l, r)| residual(*l, *r))
        .map(|x| if x.is_nan() { f64::INFINITY } else { x })
        .fold(0.0, f64::max)
}

/// Runs trial `trial` of `id` with already resolved parameters.
pub fn run_trial(info: &IdentityInfo, mode: Mode, params: &Params, seed: u64, trial: u64) -> Result<TrialOutcome, RegistryError> {
    if !info.supports(mode) {
        return Err(RegistryError::UnsupportedMode {
            id: info.id.to_string(),
            mode: mode.as_str(),
        });
    }
    if !info.sampled {
        return run_symbolic(info.id, params);
    }
    if info.id == "thmr-limit" {
        return run_limit(info.id, params, seed, trial);
    }
    let mut s = Sampler::for_trial(seed, info.id, trial);
    match mode {
        Mode::Numeric => {
            let mut worst = (-1.0, Point::new());
            for size in sizes(info.id, params) {
                let (res, mut point) = s.numeric(|s, f| {
                    let (pairs, mut point) = sampled_case(info.id, &size, s, f)?;
                    let nome = f.ctx().p();
                    point.insert("p".into(), PointValue::Complex([nome.re, nome.im]));
                    Ok((worst_residual(&pairs), point))
                })?;
                if res > worst.0 {
                    point.insert("size".into(), PointValue::Text(format!("{size:?}")));
                    worst = (res, point);
                }
            }
            Ok(TrialOutcome::Residual {
                residual: worst.0.max(0.0),
                point: worst.1,
            })
        }
        Mode::Exact => {
            let mut last = Point::new();
            for size in sizes(info.id, params) {
                let (pass, mut point) = s.exact(|s| {
                    let (pairs, point) = sampled_case(info.id, &size, s, &ExactP0)?;
                    Ok((pairs.iter().all(|(l, r)| l == r), point))
                })?;
                point.insert("size".into(), PointValue::Text(format!("{size:?}")));
                if !pass {
                    return Ok(TrialOutcome::Exact { pass, point });
                }
                last = point;
            }
            Ok(TrialOutcome::Exact { pass: true, point: last })
        }
    }
}

fn run_limit(id: &str, params: &Params, seed: u64, trial: u64) -> Result<TrialOutcome, RegistryError> {
    let mut s = Sampler::for_trial(seed, id, trial);
    let mut last = Point::new();
    for n in 1..=params.n() {
        let (pass, point) = s.exact(|s| {
            let x: Vec<BigRat> = draws(s, n);
            let (v, w, q) = (BigRat::draw(s), BigRat::draw(s), BigRat::draw(s));
            let chk = degeneration_check(&x, &v, &w, &q)?;
            let rec = Rec::new().many("x", &x).one("v", &v).one("w", &w).one("q", &q);
            Ok((chk.agrees(&x, &v), rec.0))
        })?;
        if !pass {
            return Ok(TrialOutcome::Exact { pass, point });
        }
        last = point;
    }
    Ok(TrialOutcome::Exact { pass: true, point: last })
}

fn run_symbolic(id: &str, p: &Params) -> Result<TrialOutcome, RegistryError> {
    let fail = |e: String| RegistryError::Evaluation {
        id: id.to_string(),
        msg: e,
    };
    let spec = TruncationSpec::new(p.n(), p.d());
    let whole = |pass: bool| {
        let point = Rec::new().int("n", p.n()).int("D", p.d() as usize).0;
        TrialOutcome::Exact { pass, point }
    };
    let out = match id {
        "kawanaka" => whole(verify_kawanaka(spec).map_err(|e| fail(e.to_string()))?),
        "rec" => whole(verify_recursion(p.n(), p.d()).map_err(|e| fail(e.to_string()))?.passed()),
        "md-a" | "md-b" => {
            let v = if id == "md-a" {
                MdVariant::ColumnsEvenLegs
            } else {
                MdVariant::RowsOddArms
            };
            whole(verify_md(v, spec).map_err(|e| fail(e.to_string()))?.passed())
        }
        "schur-qt" | "hall-littlewood" => {
            let case = if id == "schur-qt" {
                Specialisation::Schur
            } else {
                Specialisation::HallLittlewood
            };
            whole(verify_specialised(case, spec).map_err(|e| fail(e.to_string()))?.passed())
        }
        "proppieri" | "proppieri-prime" => {
            let form = if id == "proppieri" {
                PieriForm::Horizontal
            } else {
                PieriForm::Vertical
            };
            let mut cases = 0;
            for mu in partitions_up_to(p.d(), p.n()) {
                for r in 0..=p.r() {
                    cases += 1;
                    let mut ok = verify_proppieri(&mu, r, form).map_err(|e| fail(e.to_string()))?;
                    if form == PieriForm::Horizontal {
                        ok &= pieri_forms_agree(&mu.conjugate(), r).map_err(|e| fail(e.to_string()))?;
                    }
                    if !ok {
                        return Ok(failing_partition(&mu, r));
                    }
                }
            }
            let point = Rec::new().int("cases", cases).0;
            TrialOutcome::Exact { pass: true, point }
        }
        "final" => {
            let bx = Partition::from_unsorted(&p.m().iter().map(|&x| x as u32).collect::<Vec<_>>());
            let n = p.m().len();
            let mut cases = 0;
            for mu in sub_partitions(&bx) {
                for r in 0..=p.r() {
                    cases += 1;
                    let mut ok = verify_final_exact(&mu, n, r as usize).map_err(|e| fail(e.to_string()))?.equal;
                    ok &= final_matches_vertical(&mu, r).map_err(|e| fail(e.to_string()))?;
                    if !ok {
                        return Ok(failing_partition(&mu, r));
                    }
                }
            }
            let point = Rec::new().int("cases", cases).0;
            TrialOutcome::Exact { pass: true, point }
        }
        other => return Err(fail(format!("`{other}` is not a symbolic identity"))),
    };
    Ok(out)
}

fn failing_partition(mu: &Partition, r: u32) -> TrialOutcome {
    let point = Rec::new().text("mu", mu.to_string()).int("r", r as usize).0;
    TrialOutcome::Exact { pass: false, point }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numeric(id: &str, trials: u64) -> f64 {
        let info = lookup(id).unwrap();
        let p = info.resolve(&Params::default()).unwrap();
        (0..trials)
            .map(|k| match run_trial(&info, Mode::Numeric, &p, 42, k).unwrap() {
                TrialOutcome::Residual { residual, .. } => residual,
                other => panic!("{other:?}"),
            })
            .fold(0.0, f64::max)
    }

    fn exact(id: &str, params: Params) -> bool {
        let info = lookup(id).unwrap();
        let p = info.resolve(&params).unwrap();
        match run_trial(&info, Mode::Exact, &p, 7, 0).unwrap() {
            TrialOutcome::Exact { pass, .. } => pass,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ids_are_unique_and_resolvable() {
        let all = list();
        let mut ids: Vec<_> = all.iter().map(|i| i.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
        for i in &all {
            i.resolve(&Params::default()).unwrap();
        }
        assert!(lookup("ThmR").is_ok());
        assert_eq!(lookup("rosengren").unwrap().id, "thmr");
        assert!(matches!(lookup("nope"), Err(RegistryError::UnknownId(_))));
    }

    #[test]
    fn foreign_parameters_are_rejected() {
        let info = lookup("rr").unwrap();
        let r = info.resolve(&Params {
            n: Some(3),
            ..Params::default()
        });
        assert!(matches!(r, Err(RegistryError::BadParams { .. })));
    }

    #[test]
    fn theta_identities_numeric() {
        for id in ["rr", "nis1", "ww", "gu", "kn", "thmrn", "thmr"] {
            let r = numeric(id, 3);
            assert!(r < 1e-8, "{id}: {r}");
        }
    }

    #[test]
    fn series_identities_numeric() {
        for id in ["vm", "thm-vst", "new", "wn", "elliptic-ext-n1", "mps-consistency"] {
            let r = numeric(id, 2);
            assert!(r < 1e-7, "{id}: {r}");
        }
    }

    #[test]
    fn exact_modes() {
        for id in ["thmrn", "ww", "nis1", "thmr-limit", "new", "matrix-inverse"] {
            assert!(exact(id, Params::default()), "{id}");
        }
        let small = Params {
            m: Some(vec![2, 1]),
            ..Params::default()
        };
        for id in ["cornew", "cordmsum", "thm-vst"] {
            assert!(exact(id, small.clone()), "{id}");
        }
    }

    #[test]
    fn symbolic_small_ranges() {
        let p = Params {
            n: Some(2),
            d: Some(2),
            ..Params::default()
        };
        assert!(exact("kawanaka", p.clone()));
        assert!(exact("proppieri", Params { r: Some(2), ..p.clone() }));
        let boxed = Params {
            m: Some(vec![2, 2]),
            r: Some(2),
            ..Params::default()
        };
        assert!(exact("final", boxed));
    }

    #[test]
    fn trials_are_reproducible() {
        let info = lookup("thmrn").unwrap();
        let p = info.resolve(&Params::default()).unwrap();
        let a = run_trial(&info, Mode::Numeric, &p, 9, 3).unwrap();
        let b = run_trial(&info, Mode::Numeric, &p, 9, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unsupported_mode() {
        let info = lookup("cordmsum").unwrap();
        let p = info.resolve(&Params::default()).unwrap();
        assert!(matches!(
            run_trial(&info, Mode::Numeric, &p, 1, 0),
            Err(RegistryError::UnsupportedMode { .. })
        ));
    }
}
