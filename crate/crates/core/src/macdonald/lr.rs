//! `q,t` Littlewood–Richardson coefficients `P_mu P_nu = sum f^lambda_{mu nu} P_lambda`
//! and the two associativity identities they satisfy.

use std::collections::{BTreeMap, HashMap};

use crate::algebra::{RatFunc, VarSet};
use crate::partitions::{add_strips, partitions_up_to, sub_partitions, Partition, StripKind};

use super::pieri::{pieri_phi_psi, PhiPsi};
use super::{expand_in_p, macdonald_P, msym_product, MacdonaldCache, MacdonaldError};

/// `f^lambda_{mu nu}` for every `lambda`, by expanding the product in the `P`
/// basis. Needs `n >= l(mu) + l(nu)` so that no term is lost to truncation.
pub fn qt_lr(
    mu: &Partition,
    nu: &Partition,
    n: usize,
    cache: &MacdonaldCache,
) -> Result<BTreeMap<Partition, RatFunc>, MacdonaldError> {
    if n < mu.len() + nu.len() {
        return Err(MacdonaldError::Precondition(format!(
            "{n} variables cannot hold the product of {mu} and {nu}"
        )));
    }
    let d = mu.weight() + nu.weight();
    let pm = macdonald_P(mu, n, cache).with_maxdeg(d);
    let pn = macdonald_P(nu, n, cache).with_maxdeg(d);
    expand_in_p(&msym_product(&pm, &pn)?, cache)
}

/// One failed equality.
#[derive(Debug, Clone)]
pub struct LrFailure {
    pub identity: &'static str,
    pub case: String,
}

#[derive(Debug, Clone, Default)]
pub struct LrReport {
    pub ffff_checked: usize,
    pub pppp_checked: usize,
    pub failures: Vec<LrFailure>,
}

impl LrReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct LrTable<'a> {
    cache: &'a MacdonaldCache,
    memo: HashMap<(Partition, Partition), BTreeMap<Partition, RatFunc>>,
}

impl LrTable<'_> {
    fn get(&mut self, a: &Partition, b: &Partition) -> Result<&BTreeMap<Partition, RatFunc>, MacdonaldError> {
        // commutativity lets one entry serve both orders
        let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        if !self.memo.contains_key(&key) {
            let n = (key.0.weight() + key.1.weight()).max(1) as usize;
            let row = qt_lr(&key.0, &key.1, n, self.cache)?;
            self.memo.insert(key.clone(), row);
        }
        Ok(&self.memo[&key])
    }

    /// `sum_lambda f^lambda_{mu nu} f^tau_{lambda rho}` for every `tau`.
    fn triple(
        &mut self,
        mu: &Partition,
        nu: &Partition,
        rho: &Partition,
    ) -> Result<BTreeMap<Partition, RatFunc>, MacdonaldError> {
        let first = self.get(mu, nu)?.clone();
        let mut acc: BTreeMap<Partition, Vec<RatFunc>> = BTreeMap::new();
        for (lambda, c) in &first {
            for (tau, d) in self.get(lambda, rho)? {
                acc.entry(tau.clone()).or_default().push(c * d);
            }
        }
        let vars = VarSet::qt();
        Ok(acc
            .into_iter()
            .map(|(tau, items)| (tau, RatFunc::sum_in(&vars, &items)))
            .filter(|(_, v)| !v.is_zero())
            .collect())
    }
}

fn same_rows(a: &BTreeMap<Partition, RatFunc>, b: &BTreeMap<Partition, RatFunc>) -> bool {
    let zero = RatFunc::zero(&VarSet::qt());
    a.keys()
        .chain(b.keys())
        .all(|k| a.get(k).unwrap_or(&zero).eq_cross(b.get(k).unwrap_or(&zero)))
}

/// Exchanging the second and third factor of a triple product:
/// `sum_lambda f^lambda_{mu nu} f^tau_{lambda rho} = sum_lambda f^lambda_{mu rho} f^tau_{lambda nu}`
/// for all `|mu|, |nu|, |rho| <= bound`.
pub fn verify_triple_products(bound: u32, cache: &MacdonaldCache, report: &mut LrReport) -> Result<(), MacdonaldError> {
    let parts = partitions_up_to(bound, bound as usize);
    let mut table = LrTable {
        cache,
        memo: HashMap::new(),
    };
    for mu in &parts {
        for (i, nu) in parts.iter().enumerate() {
            for rho in &parts[i + 1..] {
                let lhs = table.triple(mu, nu, rho)?;
                let rhs = table.triple(mu, rho, nu)?;
                report.ffff_checked += 1;
                if !same_rows(&lhs, &rhs) {
                    report.failures.push(LrFailure {
                        identity: "triple product",
                        case: format!("mu={mu} nu={nu} rho={rho}"),
                    });
                }
            }
        }
    }
    Ok(())
}

fn phi(lambda: &Partition, mu: &Partition) -> Result<RatFunc, MacdonaldError> {
    pieri_phi_psi(lambda, mu, PhiPsi::Phi)
}

/// `sum phi_{tau/lambda} phi_{lambda/mu}` over `lambda` with `lambda - mu` a
/// horizontal `r`-strip and `tau - lambda` a horizontal `s`-strip.
pub fn double_strip_sum(mu: &Partition, tau: &Partition, r: u32, s: u32) -> Result<RatFunc, MacdonaldError> {
    let vars = VarSet::qt();
    let mut items = Vec::new();
    for lambda in add_strips(mu, r, StripKind::Horizontal) {
        if add_strips(&lambda, s, StripKind::Horizontal).contains(tau) {
            items.push(phi(tau, &lambda)? * phi(&lambda, mu)?);
        }
    }
    Ok(RatFunc::sum_in(&vars, &items))
}

/// Commuting two horizontal-strip Pieri steps, for `mu` inside `outer` and
/// strip sizes up to `rmax`.
pub fn verify_double_strips(
    outer: &Partition,
    rmax: u32,
    report: &mut LrReport,
) -> Result<(), MacdonaldError> {
    for mu in sub_partitions(outer) {
        for r in 0..=rmax {
            for s in r..=rmax {
                let mut taus: Vec<Partition> = add_strips(&mu, r, StripKind::Horizontal)
                    .iter()
                    .flat_map(|l| add_strips(l, s, StripKind::Horizontal))
                    .collect();
                taus.sort();
                taus.dedup();
                for tau in taus {
                    let lhs = double_strip_sum(&mu, &tau, r, s)?;
                    let rhs = double_strip_sum(&mu, &tau, s, r)?;
                    report.pppp_checked += 1;
                    if !lhs.eq_cross(&rhs) {
                        report.failures.push(LrFailure {
                            identity: "double strip",
                            case: format!("mu={mu} tau={tau} r={r} s={s}"),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Both identities: triple products up to `bound`, double strips for `mu`
/// inside `(3,3)` with strips up to 3.
pub fn verify_lr_symmetries(bound: u32, cache: &MacdonaldCache) -> Result<LrReport, MacdonaldError> {
    let mut report = LrReport::default();
    verify_triple_products(bound, cache, &mut report)?;
    verify_double_strips(&Partition::from_unsorted(&[3, 3]), 3, &mut report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition;

    #[test]
    fn single_cells() {
        let cache = MacdonaldCache::new();
        let v = VarSet::qt();
        let row = qt_lr(&partition![1], &partition![1], 2, &cache).unwrap();
        assert_eq!(row.len(), 2);
        assert_eq!(row[&partition![2]], RatFunc::one(&v));
        let q = RatFunc::named(&v, "q");
        let t = RatFunc::named(&v, "t");
        let one = RatFunc::one(&v);
        let want = &(&(&one - &q) * &(&one + &t)) / &(&one - &(&q * &t));
        assert_eq!(row[&partition![1, 1]], want);
    }

    #[test]
    fn unit_and_commutativity() {
        let cache = MacdonaldCache::new();
        let v = VarSet::qt();
        let nu = partition![2, 1];
        let row = qt_lr(&Partition::empty(), &nu, 3, &cache).unwrap();
        assert_eq!(row.len(), 1);
        assert_eq!(row[&nu], RatFunc::one(&v));
        let a = qt_lr(&partition![2], &partition![1, 1], 4, &cache).unwrap();
        let b = qt_lr(&partition![1, 1], &partition![2], 4, &cache).unwrap();
        assert!(same_rows(&a, &b));
        assert!(qt_lr(&partition![2, 1], &partition![1, 1], 3, &cache).is_err());
    }

    #[test]
    fn strips_of_size_zero() {
        let mu = partition![2, 1];
        for tau in add_strips(&mu, 2, StripKind::Horizontal) {
            let both = double_strip_sum(&mu, &tau, 0, 2).unwrap();
            assert_eq!(both, phi(&tau, &mu).unwrap());
        }
    }

    #[test]
    fn bound_one_passes() {
        let report = verify_lr_symmetries(1, &MacdonaldCache::new()).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.ffff_checked > 0 && report.pppp_checked > 0);
    }
}
