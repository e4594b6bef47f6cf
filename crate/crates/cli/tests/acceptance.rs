//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Run alone with `cargo test -p theta-forge-cli --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use theta_forge::algebra::{RatFunc, VarSet};
use theta_forge::kawanaka::{
    final_matches_vertical, pieri_forms_agree, verify_kawanaka, verify_md, verify_proppieri, verify_recursion,
    verify_specialised, MdVariant, PieriForm, Specialisation, TruncationSpec,
};
use theta_forge::macdonald::{
    b_minus_forms, b_pm, check_operator_eigen, macdonald_P, macdonald_Q, pieri_extract,
    pieri_phi_psi, pieri_psi_prime, scalar_product, verify_lr_symmetries, MacdonaldCache, PhiPsi, PieriKind, Sign,
};
use theta_forge::partitions::{add_strips, partitions_of, partitions_up_to, sub_partitions, Partition, StripKind};
use theta_forge::registry::{self, Mode, Params, TrialOutcome};
use theta_forge::sampler::{Reject, Sampler};
use theta_forge::thetaids::{eval_thmrn_side, thmrn_shift, thmrn_symmetry, verify_final_exact, Side, ThmrnParams};
use theta_forge::thetanum::{residual, Numeric, ThetaContext, ThetaField};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn all_pass(cases: usize, failures: Vec<String>) -> Check {
    match failures.first() {
        None => Ok(format!("{cases} cases")),
        Some(f) => Err(format!("{} of {cases} failed, first {f}", failures.len())),
    }
}

// ---- criteria 1-4, 6, 7: Kawanaka side ----

fn kawanaka_identity() -> Check {
    let mut failed = Vec::new();
    for (n, d) in [(1, 6), (2, 5), (3, 5)] {
        if !verify_kawanaka(TruncationSpec::new(n, d)).map_err(|e| e.to_string())? {
            failed.push(format!("(n={n}, D={d})"));
        }
    }
    all_pass(3, failed)
}

fn pieri_level() -> Check {
    let mut cases = Vec::new();
    for mu in partitions_up_to(5, 4) {
        for r in 0..=4 {
            cases.push((mu.clone(), r));
        }
    }
    let failed: Vec<String> = cases
        .par_iter()
        .filter_map(|(mu, r)| {
            let ok = verify_proppieri(mu, *r, PieriForm::Horizontal).unwrap_or(false)
                && verify_proppieri(mu, *r, PieriForm::Vertical).unwrap_or(false)
                && pieri_forms_agree(mu, *r).unwrap_or(false);
            (!ok).then(|| format!("mu={mu} r={r}"))
        })
        .collect();
    all_pass(cases.len(), failed)
}

fn final_identity() -> Check {
    let mut cases = Vec::new();
    for mu in sub_partitions(&Partition::from_unsorted(&[3, 3, 3])) {
        for r in 0..=4u32 {
            cases.push((mu.clone(), r));
        }
    }
    let failed: Vec<String> = cases
        .par_iter()
        .filter_map(|(mu, r)| {
            let exact = verify_final_exact(mu, 3, *r as usize).map(|c| c.equal).unwrap_or(false);
            let vertical = final_matches_vertical(mu, *r).unwrap_or(false);
            (!(exact && vertical)).then(|| format!("mu={mu} r={r} exact={exact} vertical={vertical}"))
        })
        .collect();
    all_pass(cases.len(), failed)
}

fn recursion() -> Check {
    let mut failed = Vec::new();
    for n in [1, 2] {
        let c = verify_recursion(n, 3).map_err(|e| e.to_string())?;
        if !c.passed() {
            failed.push(format!("n={n}: {c:?}"));
        }
    }
    all_pass(2, failed)
}

fn md_pair() -> Check {
    let mut failed = Vec::new();
    for v in [MdVariant::ColumnsEvenLegs, MdVariant::RowsOddArms] {
        let c = verify_md(v, TruncationSpec::new(2, 3)).map_err(|e| e.to_string())?;
        if !c.passed() {
            failed.push(format!("{v:?}: {c:?}"));
        }
    }
    all_pass(2, failed)
}

fn specialisations() -> Check {
    let mut failed = Vec::new();
    for case in [Specialisation::Schur, Specialisation::HallLittlewood] {
        let c = verify_specialised(case, TruncationSpec::new(2, 3)).map_err(|e| e.to_string())?;
        if !c.passed() {
            failed.push(format!("{case:?}: {c:?}"));
        }
    }
    all_pass(2, failed)
}

// ---- criterion 5: Macdonald engine ----

fn macdonald_engine() -> Check {
    let cache = MacdonaldCache::global();
    let v = VarSet::qt();
    let n = 5;
    let parts = partitions_up_to(5, n);
    let mut failed = Vec::new();
    let mut count = 0;
    // orthogonality and normalisation
    for d in 0..=5 {
        let deg = partitions_of(d, n);
        let ps: Vec<_> = deg.iter().map(|l| macdonald_P(l, n, cache)).collect();
        let qs: Vec<_> = deg.iter().map(|l| macdonald_Q(l, n, cache)).collect();
        for (i, a) in deg.iter().enumerate() {
            for (j, b) in deg.iter().enumerate() {
                count += 1;
                let ip = scalar_product(&ps[i], &qs[j]).map_err(|e| e.to_string())?;
                let want = if i == j { RatFunc::one(&v) } else { RatFunc::zero(&v) };
                if !ip.eq_cross(&want) {
                    failed.push(format!("<P{a}, Q{b}>"));
                }
            }
        }
    }
    // unitriangularity in dominance order, stability, difference operator
    for l in &parts {
        count += 1;
        let p = macdonald_P(l, n, cache);
        let lead = p.coeff(l).eq_cross(&RatFunc::one(&v));
        let lower = p.terms().all(|(mu, c)| c.is_zero() || mu.dominated_by(l));
        if !(lead && lower) {
            failed.push(format!("triangularity of P{l}"));
        }
        for k in l.len()..n {
            count += 1;
            if !p.restrict(k, l.weight()).eq_exact(&macdonald_P(l, k, cache)) {
                failed.push(format!("restriction of P{l} to {k} variables"));
            }
        }
    }
    let eigen: Vec<String> = parts
        .par_iter()
        .filter(|l| l.weight() <= 4)
        .flat_map_iter(|l| (l.len().max(1)..=4).map(move |k| (l.clone(), k)))
        .filter_map(|(l, k)| (!check_operator_eigen(&l, k, cache)).then(|| format!("operator eigen P{l} n={k}")))
        .collect();
    failed.extend(eigen);
    // Pieri formulas against coefficient extraction in 7 variables
    let mut pieri_cases = Vec::new();
    for nu in partitions_up_to(4, 4) {
        for r in 0..=3 {
            pieri_cases.push((nu.clone(), r));
        }
    }
    count += pieri_cases.len();
    let pieri: Vec<String> = pieri_cases
        .par_iter()
        .filter_map(|(nu, r)| match pieri_matches(nu, *r, 7, cache) {
            Ok(true) => None,
            Ok(false) => Some(format!("Pieri over {nu} r={r}")),
            Err(e) => Some(format!("Pieri over {nu} r={r}: {e}")),
        })
        .collect();
    failed.extend(pieri);
    // b^- from its cell definition against both product forms and conjugation
    for l in partitions_up_to(8, 8) {
        for k in [l.len(), l.len() + 2] {
            count += 1;
            let f = b_minus_forms(&l, k).map_err(|e| e.to_string())?;
            let conj = b_pm(&l.conjugate(), Sign::Minus);
            if f.via_rows != b_pm(&l, Sign::Minus) || f.conj_via_rows != conj || f.conj_via_swap != conj {
                failed.push(format!("b-forms {l} n={k}"));
            }
        }
    }
    all_pass(count, failed)
}

fn pieri_matches(nu: &Partition, r: u32, n: usize, cache: &MacdonaldCache) -> Result<bool, String> {
    let e = |x: theta_forge::macdonald::MacdonaldError| x.to_string();
    let horiz = add_strips(nu, r, StripKind::Horizontal);
    let vert = add_strips(nu, r, StripKind::Vertical);
    let phi = pieri_extract(nu, r, n, PieriKind::Phi, cache).map_err(e)?;
    let psi = pieri_extract(nu, r, n, PieriKind::Psi, cache).map_err(e)?;
    let pp = pieri_extract(nu, r, n, PieriKind::PsiPrime, cache).map_err(e)?;
    if phi.len() != horiz.len() || psi.len() != horiz.len() || pp.len() != vert.len() {
        return Ok(false);
    }
    for l in &horiz {
        let (Some(a), Some(b)) = (phi.get(l), psi.get(l)) else {
            return Ok(false);
        };
        if !a.eq_cross(&pieri_phi_psi(l, nu, PhiPsi::Phi).map_err(e)?)
            || !b.eq_cross(&pieri_phi_psi(l, nu, PhiPsi::Psi).map_err(e)?)
        {
            return Ok(false);
        }
    }
    for l in &vert {
        let Some(c) = pp.get(l) else {
            return Ok(false);
        };
        if !c.eq_cross(&pieri_psi_prime(l, nu).map_err(e)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---- criterion 8: theta function ----

/// `theta(x; p)` from the triple-product series, as an independent oracle.
fn theta_series(x: Complex64, p: Complex64) -> Complex64 {
    let mut pp = Complex64::new(1.0, 0.0);
    let mut pk = p;
    for _ in 0..200 {
        pp *= Complex64::new(1.0, 0.0) - pk;
        pk *= p;
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -60i32..=60 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let e = k * (k - 1) / 2;
        sum += sign * p.powi(e) * x.powi(k);
    }
    sum / pp
}

fn theta_suite() -> Check {
    let mut worst = [0.0f64; 5];
    for k in 0..1000 {
        let mut s = Sampler::for_trial(8, "theta-suite", k);
        let r = s
            .numeric(|s, f| {
                let x = s.complex();
                let a = s.complex();
                let q = s.complex();
                let n = s.int(0, 6);
                let p = f.ctx().p();
                let th = f.theta(&x)?;
                let inv = residual(f.theta(&f.inv(&x)?)?, -th / x);
                let quasi = residual(f.theta(&(p * x))?, -th / x);
                let series = residual(th, theta_series(x, p));
                let small = ThetaContext::new(p * 1e-12).map_err(|e| Reject::Fatal(e.to_string()))?;
                let trivial = Numeric::new(ThetaContext::trivial());
                let one = Complex64::new(1.0, 0.0);
                let degen = residual(Numeric::new(small).theta(&x)?, one - x).max(residual(trivial.theta(&x)?, one - x));
                let up = f.poch(&a, &q, n + 1)?;
                let qn = f.pow(&q, n)?;
                let shift = residual(up, f.poch(&a, &q, n)? * f.theta(&(a * qn))?);
                let down = residual(f.poch(&a, &q, -n)?, f.inv(&f.poch(&(a / qn), &q, n)?)?);
                Ok([inv, quasi, degen, shift.max(down), series])
            })
            .map_err(|e| e.to_string())?;
        for (w, x) in worst.iter_mut().zip(r) {
            *w = w.max(x);
        }
    }
    let detail = format!(
        "1000 points; inversion {:.1e}, quasi-periodicity {:.1e}, p=0 {:.1e}, Pochhammer shift {:.1e}, series oracle {:.1e}",
        worst[0], worst[1], worst[2], worst[3], worst[4]
    );
    ensure(worst.iter().all(|w| *w < 1e-10), detail)
}

// ---- criteria 9-17: sampled identities ----

fn main_identity() -> Check {
    let mut worst = [0.0f64; 3];
    for n in 1..=4 {
        for k in 0..50 {
            let mut s = Sampler::for_trial(9, "main-identity", (n as u64) << 32 | k);
            let r = s
                .numeric(|s, f| {
                    let p = ThmrnParams {
                        x: s.complexes(n),
                        v: s.complex(),
                        w: s.complex(),
                        q: s.complex(),
                        t: s.complex(),
                    };
                    let main = residual(eval_thmrn_side(f, Side::L, &p)?, eval_thmrn_side(f, Side::R, &p)?);
                    let (a, b) = thmrn_symmetry(f, &p)?;
                    let (c, d) = thmrn_shift(f, &p)?;
                    Ok([main, residual(a, b), residual(c, d)])
                })
                .map_err(|e| e.to_string())?;
            for (w, x) in worst.iter_mut().zip(r) {
                *w = w.max(x);
            }
        }
    }
    let detail = format!(
        "n=1..4, 50 points each; identity {:.1e}, symmetry {:.1e}, shift {:.1e}",
        worst[0], worst[1], worst[2]
    );
    ensure(worst.iter().all(|w| *w < 1e-8), detail)
}

/// Runs registry trials; numeric runs return the largest residual, exact
/// runs `0` or `1` for pass or fail.
fn registry_run(id: &str, mode: Mode, params: Params, trials: u64, seed: u64) -> Result<f64, String> {
    let info = registry::lookup(id).map_err(|e| e.to_string())?;
    let p = info.resolve(&params).map_err(|e| e.to_string())?;
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|k| registry::run_trial(&info, mode, &p, seed, k))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok(outcomes
        .iter()
        .map(|o| match o {
            TrialOutcome::Residual { residual, .. } => *residual,
            TrialOutcome::Exact { pass, .. } => f64::from(u8::from(!pass)),
        })
        .fold(0.0, f64::max))
}

fn n(n: usize) -> Params {
    Params {
        n: Some(n),
        ..Params::default()
    }
}

fn m(m: &[usize]) -> Params {
    Params {
        m: Some(m.to_vec()),
        ..Params::default()
    }
}

/// Each entry is (label, id, mode, params, trials, tolerance).
fn registry_suite(seed: u64, runs: Vec<(&str, &str, Mode, Params, u64, f64)>) -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for (label, id, mode, params, trials, tol) in runs {
        let r = registry_run(id, mode, params, trials, seed)?;
        match mode {
            Mode::Numeric => {
                ok &= r < tol;
                parts.push(format!("{label} {r:.1e}"));
            }
            Mode::Exact => {
                ok &= r == 0.0;
                parts.push(format!("{label} {}", if r == 0.0 { "exact" } else { "FAILED" }));
            }
        }
    }
    ensure(ok, parts.join(", "))
}

fn classical() -> Check {
    registry_suite(
        10,
        vec![
            ("ww n<=5", "ww", Mode::Numeric, n(5), 50, 1e-9),
            ("gu 2<=n<=5", "gu", Mode::Numeric, n(5), 50, 1e-9),
            ("kn n<=4", "kn", Mode::Numeric, n(4), 50, 1e-9),
            ("rr", "rr", Mode::Numeric, Params::default(), 50, 1e-9),
            ("nis1", "nis1", Mode::Numeric, Params::default(), 50, 1e-9),
            ("thmr n<=4", "thmr", Mode::Numeric, n(4), 50, 1e-8),
        ],
    )
}

fn transformation() -> Check {
    registry_suite(
        11,
        vec![
            ("numeric N<=2 m<=3", "thm-vst", Mode::Numeric, m(&[3, 3]), 25, 1e-7),
            ("p=0 N<=2 m<=3", "thm-vst", Mode::Exact, m(&[3, 3]), 10, 0.0),
        ],
    )
}

fn one_variable() -> Check {
    registry_suite(
        12,
        vec![
            ("numeric n<=5", "new", Mode::Numeric, n(5), 50, 1e-8),
            ("p=0 n<=4", "new", Mode::Exact, n(4), 10, 0.0),
        ],
    )
}

fn multiple_jackson() -> Check {
    registry_suite(13, vec![("N<=3 m<=3 with N=1 closed form", "cornew", Mode::Exact, m(&[3, 3, 3]), 10, 0.0)])
}

fn simplex() -> Check {
    let p = Params {
        n: Some(3),
        rank: Some(2),
        ..Params::default()
    };
    registry_suite(14, vec![("N<=2 n<=3", "wn", Mode::Numeric, p, 25, 1e-7)])
}

fn matrices() -> Check {
    registry_suite(
        15,
        vec![
            ("M M^-1 N=2 m<=(2,2)", "matrix-inverse", Mode::Exact, m(&[2, 2]), 5, 0.0),
            ("double sum N<=2 m<=2", "cordmsum", Mode::Exact, m(&[2, 2]), 10, 0.0),
        ],
    )
}

fn elliptic_extension() -> Check {
    registry_suite(16, vec![("m<=5", "elliptic-ext-n1", Mode::Numeric, m(&[5]), 25, 1e-8)])
}

fn principal_specialisation() -> Check {
    let p = Params {
        m: Some(vec![4, 4, 4]),
        d: Some(4),
        ..Params::default()
    };
    registry_suite(17, vec![("|m|<=4, N<=3", "mps-consistency", Mode::Numeric, p, 25, 1e-7)])
}

// ---- criteria 18, 19 ----

fn lr_symmetries() -> Check {
    let report = verify_lr_symmetries(3, MacdonaldCache::global()).map_err(|e| e.to_string())?;
    let detail = format!("{} triple products, {} double strips", report.ffff_checked, report.pppp_checked);
    match report.failures.first() {
        None => Ok(detail),
        Some(f) => Err(format!("{detail}; first failure {} {}", f.identity, f.case)),
    }
}

fn cli_determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("theta-forge-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cfg = dir.join("campaign.json");
    std::fs::write(
        &cfg,
        r#"{"seed": 19, "trials": 20, "identities": [
            {"id": "thmrn", "params": {"n": 3}},
            {"id": "ww"}, {"id": "rr"}, {"id": "cornew", "params": {"m": [2, 1]}},
            {"id": "proppieri", "params": {"n": 2, "D": 3, "r": 2}}
        ]}"#,
    )
    .map_err(|e| e.to_string())?;
    let run = || -> Result<Vec<String>, String> {
        let o = Command::new(env!("CARGO_BIN_EXE_theta-forge"))
            .args(["verify", "--config", cfg.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!("exit {:?}", o.status.code()));
        }
        let text = String::from_utf8(o.stdout).map_err(|e| e.to_string())?;
        Ok(text.lines().map(|l| l.split(",\"ms\":").next().unwrap_or(l).to_string()).collect())
    };
    let (a, b) = (run()?, run()?);
    let _ = std::fs::remove_dir_all(&dir);
    let diff = (1..=3).map(|k| common::main_lhs_differential(10, k)).fold(0.0, f64::max);
    ensure(
        a == b && !a.is_empty() && diff < 1e-10,
        format!("{} report lines identical: {}; expression vs native {diff:.1e}", a.len(), a == b),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(u8, &str, fn() -> Check)> = vec![
        (1, "Kawanaka identity, truncated", kawanaka_identity),
        (2, "Pieri-level identities, both forms and conjugation", pieri_level),
        (3, "exact q,t subset identity and vertical form", final_identity),
        (4, "recursion in the number of variables", recursion),
        (5, "Macdonald engine", macdonald_engine),
        (6, "formal-b Macdonald pair", md_pair),
        (7, "Schur and Hall-Littlewood cases", specialisations),
        (8, "theta function suite", theta_suite),
        (9, "main theta identity and reformulations", main_identity),
        (10, "classical theta identities", classical),
        (11, "V_m transformation", transformation),
        (12, "one-variable transformation", one_variable),
        (13, "multiple Jackson summation", multiple_jackson),
        (14, "W_n transformation", simplex),
        (15, "matrix inversion and double sum", matrices),
        (16, "one-variable elliptic double sum", elliptic_extension),
        (17, "principal specialisation consistency", principal_specialisation),
        (18, "q,t Littlewood-Richardson symmetries", lr_symmetries),
        (19, "CLI determinism and expression evaluator", cli_determinism),
    ];
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let total = Instant::now();
    let mut failures = 0;
    for (k, name, check) in criteria {
        if !only.is_empty() && !only.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {k:>2} {tag} {name}: {detail} [{secs:.1}s]");
    }
    println!("acceptance: {failures} failing, {:.1}s total", total.elapsed().as_secs_f64());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
