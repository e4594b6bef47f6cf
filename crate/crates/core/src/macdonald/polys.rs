//! Macdonald polynomials by Gram–Schmidt in the monomial basis.
//!
//! Expansions are computed once per degree in the ring of symmetric
//! functions and restricted to `n` variables on demand; the restriction is
//! exact because `P_lambda` is stable under setting trailing variables to 0.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;
#[cfg(test)]
use rayon::prelude::*;

use crate::algebra::{RatFunc, VarSet, Vars};
use crate::partitions::Partition;

use super::modular::build_degree_modular;
use super::pieri::{b_pm_factored, Sign};
#[cfg(test)]
use super::scalar::{degree_basis, power_sum_norm, to_power_sums};
use super::{qt_indices, MacdonaldError, SymSeries};

struct DegreeTable {
    /// `u[lambda]` holds the monomial coordinates of `P_lambda`.
    u: HashMap<Partition, Arc<BTreeMap<Partition, RatFunc>>>,
}

/// Process-wide store of Macdonald expansions, filled one degree at a time.
/// Concurrent readers share finished degrees; a degree computed twice by
/// racing writers yields identical values.
#[derive(Default)]
pub struct MacdonaldCache {
    tables: RwLock<HashMap<u32, Arc<DegreeTable>>>,
}

static GLOBAL: LazyLock<MacdonaldCache> = LazyLock::new(MacdonaldCache::default);

impl MacdonaldCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static MacdonaldCache {
        &GLOBAL
    }

    fn table(&self, d: u32) -> Arc<DegreeTable> {
        if let Some(t) = self.tables.read().get(&d) {
            return t.clone();
        }
        let t = Arc::new(DegreeTable {
            u: build_degree_modular(d).into_iter().map(|(k, v)| (k, Arc::new(v))).collect(),
        });
        self.tables.write().entry(d).or_insert(t).clone()
    }

    /// Coordinates `u_{lambda mu}(q,t)` of `P_lambda` in the monomial basis of
    /// the full ring of symmetric functions, over `Q(q,t)`.
    pub fn expansion(&self, lambda: &Partition) -> Arc<BTreeMap<Partition, RatFunc>> {
        self.table(lambda.weight()).u[lambda].clone()
    }

    /// Number of degrees currently held.
    pub fn degrees_cached(&self) -> usize {
        self.tables.read().len()
    }
}

/// Direct Gram–Schmidt over `Q(q,t)`. Too slow beyond degree 6 but kept as
/// an independent route for the prime-field construction.
#[cfg(test)]
fn build_degree_symbolic(d: u32) -> DegreeTable {
    let vars = VarSet::qt();
    let basis = degree_basis(d);
    let norms: Vec<RatFunc> = basis.parts.iter().map(|r| power_sum_norm(r).to_ratfunc()).collect();
    let mut u: HashMap<Partition, Arc<BTreeMap<Partition, RatFunc>>> = HashMap::new();
    // sigma[mu][rho] = <p_rho, p_rho> * (P_mu in power sums)[rho]
    let mut sigma: HashMap<Partition, Vec<RatFunc>> = HashMap::new();
    for lambda in &basis.parts {
        let lower: Vec<&Partition> = basis
            .parts
            .iter()
            .take_while(|m| *m != lambda)
            .filter(|m| m.dominated_by(lambda))
            .collect();
        let row = &basis.m_to_p[basis.index[lambda]];
        // c_mu = <m_lambda, P_mu> / <P_mu, P_mu> with <P_mu, P_mu> = 1 / b_mu.
        let coeffs: Vec<(&Partition, RatFunc)> = lower
            .par_iter()
            .map(|mu| {
                let s = &sigma[*mu];
                let terms: Vec<RatFunc> = row.iter().map(|(rho, x)| s[*rho].scale(x)).collect();
                let ip = RatFunc::sum_in(&vars, &terms);
                let b = b_pm_factored(mu, Sign::Plus).to_ratfunc();
                (*mu, &ip * &b)
            })
            .collect();
        let targets: Vec<&Partition> = lower.clone();
        let entries: Vec<(Partition, RatFunc)> = targets
            .par_iter()
            .map(|nu| {
                let terms: Vec<RatFunc> = coeffs
                    .iter()
                    .filter(|(_, c)| !c.is_zero())
                    .filter_map(|(mu, c)| u[*mu].get(*nu).map(|x| -(c * x)))
                    .collect();
                ((*nu).clone(), RatFunc::sum_in(&vars, &terms))
            })
            .collect();
        let mut row_u: BTreeMap<Partition, RatFunc> = BTreeMap::new();
        row_u.insert(lambda.clone(), RatFunc::one(&vars));
        for (nu, c) in entries {
            if !c.is_zero() {
                row_u.insert(nu, c);
            }
        }
        let coords: BTreeMap<&Partition, &RatFunc> = row_u.iter().collect();
        let pcoords = to_power_sums(&vars, &coords, &basis);
        let s: Vec<RatFunc> = pcoords.iter().zip(&norms).map(|(p, w)| p * w).collect();
        sigma.insert(lambda.clone(), s);
        u.insert(lambda.clone(), Arc::new(row_u));
    }
    DegreeTable { u }
}

fn in_universe(c: &RatFunc, vars: &Vars) -> RatFunc {
    c.embed(vars).expect("target universe contains q and t in order")
}

/// `P_lambda(x_1..x_n; q, t)` in the monomial basis; zero when `l(lambda) > n`.
#[allow(non_snake_case)]
pub fn macdonald_P(lambda: &Partition, n: usize, cache: &MacdonaldCache) -> SymSeries {
    macdonald_P_in(&VarSet::qt(), lambda, n, cache)
}

#[allow(non_snake_case)]
pub(crate) fn macdonald_P_in(vars: &Vars, lambda: &Partition, n: usize, cache: &MacdonaldCache) -> SymSeries {
    let d = lambda.weight();
    let mut s = SymSeries::zero(vars, n, d);
    if lambda.len() > n {
        return s;
    }
    for (mu, c) in cache.expansion(lambda).iter() {
        s.insert(mu.clone(), in_universe(c, vars));
    }
    s
}

/// `Q_lambda = b_lambda P_lambda`.
#[allow(non_snake_case)]
pub fn macdonald_Q(lambda: &Partition, n: usize, cache: &MacdonaldCache) -> SymSeries {
    let p = macdonald_P(lambda, n, cache);
    p.scale(&b_pm_factored(lambda, Sign::Plus).to_ratfunc())
        .expect("same universe")
}

/// Coordinates of `f` in the `P` basis (of `f.nvars()` variables), by
/// repeatedly stripping the lex-largest monomial.
pub fn expand_in_p(f: &SymSeries, cache: &MacdonaldCache) -> Result<BTreeMap<Partition, RatFunc>, MacdonaldError> {
    let vars = f.vars().clone();
    qt_indices(&vars)?;
    let mut rest = f.clone();
    let mut out = BTreeMap::new();
    loop {
        let Some((top, c)) = rest.terms().next_back().map(|(k, c)| (k.clone(), c.clone())) else {
            break;
        };
        let p = macdonald_P_in(&vars, &top, f.nvars(), cache);
        rest = rest.try_sub(&p.scale(&c)?.with_maxdeg(f.maxdeg()))?;
        debug_assert!(rest.coeff(&top).is_zero());
        out.insert(top, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macdonald::scalar_product;
    use crate::partition;
    use crate::partitions::partitions_up_to;

    fn one_minus(v: &Vars, name: &str) -> RatFunc {
        RatFunc::one(v) - RatFunc::named(v, name)
    }

    #[test]
    fn small_polynomials() {
        let cache = MacdonaldCache::new();
        let v = VarSet::qt();
        let p1 = macdonald_P(&partition![1], 3, &cache);
        assert!(p1.eq_exact(&SymSeries::monomial(&v, 3, 1, partition![1])));
        let p11 = macdonald_P(&partition![1, 1], 3, &cache);
        assert!(p11.eq_exact(&SymSeries::monomial(&v, 3, 2, partition![1, 1])));
        // Orthogonality of m_2 + c m_11 to m_11 fixes c by hand.
        let q = RatFunc::named(&v, "q");
        let t = RatFunc::named(&v, "t");
        let one = RatFunc::one(&v);
        let c = &(&(&one + &q) * &one_minus(&v, "t")) / &(&one - &(&q * &t));
        let p2 = macdonald_P(&partition![2], 3, &cache);
        assert_eq!(p2.coeff(&partition![2]), one);
        assert_eq!(p2.coeff(&partition![1, 1]), c);
        assert!(macdonald_P(&partition![1, 1, 1], 2, &cache).is_zero());
    }

    #[test]
    fn q_normalisation() {
        let cache = MacdonaldCache::new();
        let v = VarSet::qt();
        let q1 = macdonald_Q(&partition![1], 2, &cache);
        assert_eq!(q1.coeff(&partition![1]), one_minus(&v, "t") / one_minus(&v, "q"));
        assert!(macdonald_Q(&Partition::empty(), 2, &cache).eq_exact(&SymSeries::one(&v, 2, 0)));
        let l = partition![2];
        let ip = scalar_product(&macdonald_P(&l, 2, &cache), &macdonald_Q(&l, 2, &cache)).unwrap();
        assert_eq!(ip, RatFunc::one(&v));
    }

    #[test]
    fn orthogonal_up_to_degree_four() {
        let cache = MacdonaldCache::new();
        let v = VarSet::qt();
        let parts = partitions_up_to(4, 4);
        for a in &parts {
            for b in &parts {
                if a.weight() != b.weight() || a > b {
                    continue;
                }
                let pa = macdonald_P(a, 4, &cache);
                let ip = scalar_product(&pa, &macdonald_Q(b, 4, &cache)).unwrap();
                let want = if a == b { RatFunc::one(&v) } else { RatFunc::zero(&v) };
                assert_eq!(ip, want, "<P{a}, Q{b}>");
            }
        }
    }

    #[test]
    fn prime_field_route_matches_symbolic() {
        for d in 0..=5 {
            let sym = build_degree_symbolic(d);
            let fast = build_degree_modular(d);
            assert_eq!(sym.u.len(), fast.len());
            for (l, row) in &fast {
                assert_eq!(**sym.u.get(l).unwrap(), *row, "P{l}");
            }
        }
    }

    #[test]
    fn triangular_expansion_round_trip() {
        let cache = MacdonaldCache::new();
        let v = VarSet::qt();
        let m = SymSeries::monomial(&v, 3, 3, partition![2, 1]);
        let coords = expand_in_p(&m, &cache).unwrap();
        let mut back = SymSeries::zero(&v, 3, 3);
        for (l, c) in &coords {
            back = back.try_add(&macdonald_P(l, 3, &cache).scale(c).unwrap()).unwrap();
        }
        assert!(back.eq_exact(&m));
    }

    #[test]
    fn equal_parameters_give_schur_polynomials() {
        let cache = MacdonaldCache::global();
        let v = VarSet::qt();
        let q = RatFunc::named(&v, "q");
        for lambda in partitions_up_to(5, 5) {
            let p = macdonald_P(&lambda, 4, cache)
                .map_coeffs(&v, |c| c.specialize(&[(1, q.clone())]))
                .unwrap();
            assert!(p.eq_exact(&super::super::schur(&lambda, 4, &v)), "{lambda}");
        }
    }

    #[test]
    fn restriction_is_stable() {
        let cache = MacdonaldCache::global();
        for lambda in partitions_up_to(4, 4) {
            for n in lambda.len()..4 {
                let big = macdonald_P(&lambda, 4, cache).restrict(n, lambda.weight());
                assert!(big.eq_exact(&macdonald_P(&lambda, n, cache)), "{lambda} n={n}");
            }
        }
    }
}
