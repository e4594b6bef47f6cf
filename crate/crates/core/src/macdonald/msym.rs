//! Products in the monomial basis.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock};

use parking_lot::RwLock;

use crate::algebra::{BigRat, RatFunc};
use crate::partitions::Partition;

use super::{MacdonaldError, SymSeries};

type Key = (Partition, Partition, usize);
type Table = Arc<Vec<(Partition, u64)>>;

static STRUCTURE: LazyLock<RwLock<HashMap<Key, Table>>> = LazyLock::new(|| RwLock::new(HashMap::new()));

/// Steps `v` to the next distinct permutation in lex order.
fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Counts pairs `(a, b)` of distinct rearrangements of `alpha` and `beta`
/// (padded to `len`) whose sum is weakly decreasing, grouped by the sum.
fn count_pairs(alpha: &Partition, beta: &Partition, len: usize) -> Vec<(Partition, u64)> {
    let mut a = alpha.padded(len);
    a.sort_unstable();
    // distinct values of beta with multiplicities
    let mut bvals: Vec<(u32, usize)> = Vec::new();
    for v in beta.padded(len) {
        match bvals.iter_mut().find(|(x, _)| *x == v) {
            Some(slot) => slot.1 += 1,
            None => bvals.push((v, 1)),
        }
    }
    let mut counts: BTreeMap<Partition, u64> = BTreeMap::new();
    let mut sum = vec![0u32; len];
    fn fill(
        a: &[u32],
        i: usize,
        bvals: &mut [(u32, usize)],
        sum: &mut Vec<u32>,
        counts: &mut BTreeMap<Partition, u64>,
    ) {
        if i == a.len() {
            *counts
                .entry(Partition::new(sum).expect("sum is decreasing"))
                .or_insert(0) += 1;
            return;
        }
        for k in 0..bvals.len() {
            if bvals[k].1 == 0 {
                continue;
            }
            let s = a[i] + bvals[k].0;
            if i > 0 && s > sum[i - 1] {
                continue;
            }
            bvals[k].1 -= 1;
            sum[i] = s;
            fill(a, i + 1, bvals, sum, counts);
            bvals[k].1 += 1;
        }
    }
    loop {
        fill(&a, 0, &mut bvals, &mut sum, &mut counts);
        if !next_permutation(&mut a) {
            break;
        }
    }
    counts.into_iter().collect()
}

/// Structure constants `m_alpha m_beta = sum c_gamma m_gamma` in `nvars`
/// variables.
pub fn structure_constants(alpha: &Partition, beta: &Partition, nvars: usize) -> Table {
    let len = nvars.min(alpha.len() + beta.len());
    if alpha.len() > len || beta.len() > len {
        return Arc::new(Vec::new());
    }
    let (x, y) = if alpha <= beta { (alpha, beta) } else { (beta, alpha) };
    let key = (x.clone(), y.clone(), len);
    if let Some(t) = STRUCTURE.read().get(&key) {
        return t.clone();
    }
    let t = Arc::new(count_pairs(x, y, len));
    STRUCTURE.write().insert(key, t.clone());
    t
}

/// Product of two symmetric series, expanded in the monomial basis and
/// truncated at the smaller degree bound.
pub fn msym_product(f: &SymSeries, g: &SymSeries) -> Result<SymSeries, MacdonaldError> {
    f.check(g)?;
    let maxdeg = f.maxdeg.min(g.maxdeg);
    let vars = f.vars.clone();
    let mut acc: BTreeMap<Partition, Vec<RatFunc>> = BTreeMap::new();
    for (a, ca) in &f.coeffs {
        for (b, cb) in &g.coeffs {
            if a.weight() + b.weight() > maxdeg {
                continue;
            }
            let prod = ca.try_mul(cb)?;
            for (gamma, c) in structure_constants(a, b, f.nvars).iter() {
                acc.entry(gamma.clone())
                    .or_default()
                    .push(prod.scale(&BigRat::from_integer((*c).into())));
            }
        }
    }
    let mut out = SymSeries::zero(&vars, f.nvars, maxdeg);
    for (gamma, items) in acc {
        out.insert(gamma, RatFunc::sum_in(&vars, &items));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VarSet;
    use crate::partition;

    fn count_by_expansion(alpha: &Partition, beta: &Partition, n: usize) -> BTreeMap<Partition, u64> {
        // Brute force: expand both monomial functions as exponent vectors.
        fn perms(p: &Partition, n: usize) -> Vec<Vec<u32>> {
            let mut v = p.padded(n);
            v.sort_unstable();
            let mut out = vec![v.clone()];
            while next_permutation(&mut v) {
                out.push(v.clone());
            }
            out
        }
        let mut out = BTreeMap::new();
        if alpha.len() > n || beta.len() > n {
            return out;
        }
        for a in perms(alpha, n) {
            for b in perms(beta, n) {
                let s: Vec<u32> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                if s.windows(2).all(|w| w[0] >= w[1]) {
                    *out.entry(Partition::new(&s).unwrap()).or_insert(0) += 1;
                }
            }
        }
        out
    }

    #[test]
    fn square_of_e1() {
        let v = VarSet::qt();
        let m1 = SymSeries::monomial(&v, 3, 4, partition![1]);
        let sq = msym_product(&m1, &m1).unwrap();
        assert_eq!(sq.coeff(&partition![2]), RatFunc::one(&v));
        assert_eq!(sq.coeff(&partition![1, 1]), RatFunc::from_int(&v, 2));
        assert_eq!(sq.nterms(), 2);
        let m1 = SymSeries::monomial(&v, 1, 4, partition![1]);
        let sq = msym_product(&m1, &m1).unwrap();
        assert_eq!(sq.nterms(), 1);
        assert_eq!(sq.coeff(&partition![2]), RatFunc::one(&v));
    }

    #[test]
    fn unit_is_neutral() {
        let v = VarSet::qt();
        let f = SymSeries::from_coeffs(
            &v,
            3,
            5,
            [(partition![2, 1], RatFunc::named(&v, "q")), (partition![3], RatFunc::from_int(&v, 4))],
        );
        let one = SymSeries::one(&v, 3, 5);
        assert!(msym_product(&f, &one).unwrap().eq_exact(&f));
    }

    #[test]
    fn structure_constants_match_brute_force() {
        let shapes = [partition![1], partition![2], partition![1, 1], partition![2, 1], partition![3, 1, 1]];
        for a in &shapes {
            for b in &shapes {
                for n in 1..=5 {
                    let fast: BTreeMap<Partition, u64> = structure_constants(a, b, n).iter().cloned().collect();
                    assert_eq!(fast, count_by_expansion(a, b, n), "{a} * {b} in {n} variables");
                }
            }
        }
    }
}
