//! Power-sum change of basis and the `(q,t)` scalar product.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::RwLock;

use crate::algebra::{BigRat, FactoredQT, RatFunc, Vars};
use crate::partitions::{partitions_of, Partition};

use super::msym::structure_constants;
use super::{qt_indices, MacdonaldError, SymSeries};

/// Partitions of one degree with both transition matrices between the
/// monomial and power-sum bases.
pub(crate) struct DegreeBasis {
    /// Ascending lex order, which refines dominance.
    pub parts: Vec<Partition>,
    pub index: HashMap<Partition, usize>,
    /// `p_rho = sum_nu p_to_m[rho][nu] m_nu`.
    pub p_to_m: Vec<Vec<BigInt>>,
    /// `m_nu = sum_rho m_to_p[nu] (rho, c) p_rho`, sparse.
    pub m_to_p: Vec<Vec<(usize, BigRat)>>,
}

static BASES: LazyLock<RwLock<HashMap<u32, Arc<DegreeBasis>>>> = LazyLock::new(|| RwLock::new(HashMap::new()));

/// `z_lambda = prod_i i^{m_i} m_i!`.
pub fn z_lambda(lambda: &Partition) -> BigInt {
    let mut z = BigInt::one();
    for (part, mult) in lambda.multiplicities() {
        for k in 1..=mult {
            z *= BigInt::from(part) * BigInt::from(k);
        }
    }
    z
}

fn power_sum_in_m(rho: &Partition, d: u32) -> BTreeMap<Partition, BigInt> {
    let mut cur: BTreeMap<Partition, BigInt> = BTreeMap::new();
    cur.insert(Partition::empty(), BigInt::one());
    for &k in rho.parts() {
        let pk = Partition::from_unsorted(&[k]);
        let mut next = BTreeMap::new();
        for (a, c) in &cur {
            for (g, n) in structure_constants(a, &pk, d as usize).iter() {
                *next.entry(g.clone()).or_insert_with(BigInt::zero) += c * BigInt::from(*n);
            }
        }
        cur = next;
    }
    cur
}

fn invert(m: &[Vec<BigInt>]) -> Vec<Vec<BigRat>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRat>> = m
        .iter()
        .map(|row| row.iter().map(|x| BigRat::from_integer(x.clone())).collect())
        .collect();
    let mut inv: Vec<Vec<BigRat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRat::one() } else { BigRat::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("power sums form a basis");
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let x = &f * &a[col][j];
                a[r][j] -= x;
                let y = &f * &inv[col][j];
                inv[r][j] -= y;
            }
        }
    }
    inv
}

pub(crate) fn degree_basis(d: u32) -> Arc<DegreeBasis> {
    if let Some(b) = BASES.read().get(&d) {
        return b.clone();
    }
    let mut parts = partitions_of(d, d as usize);
    parts.reverse();
    let index: HashMap<Partition, usize> = parts.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let n = parts.len();
    let mut p_to_m = vec![vec![BigInt::zero(); n]; n];
    for (i, rho) in parts.iter().enumerate() {
        for (nu, c) in power_sum_in_m(rho, d) {
            p_to_m[i][index[&nu]] = c;
        }
    }
    // row nu of the inverse reads m_nu in terms of the p_rho
    let inv = invert(&p_to_m);
    let m_to_p = inv
        .into_iter()
        .map(|row| row.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
        .collect();
    let b = Arc::new(DegreeBasis {
        parts,
        index,
        p_to_m,
        m_to_p,
    });
    BASES.write().insert(d, b.clone());
    b
}

/// Partitions of `d` in ascending lex order with the integer matrix
/// expressing each `p_rho` in the monomial basis.
pub fn power_sum_matrix(d: u32) -> (Vec<Partition>, Vec<Vec<BigInt>>) {
    let b = degree_basis(d);
    (b.parts.clone(), b.p_to_m.clone())
}

/// `<p_rho, p_rho> = z_rho prod (1 - q^rho_i)/(1 - t^rho_i)`.
pub(crate) fn power_sum_norm(rho: &Partition) -> FactoredQT {
    let mut f = FactoredQT::constant(BigRat::from_integer(z_lambda(rho)));
    for &k in rho.parts() {
        let k = k as i32;
        f = f.mul(&FactoredQT::from_factors([(1, k, 0, 1), (1, 0, k, -1)]).expect("k > 0"));
    }
    f
}

/// Power-sum coordinates of the degree-`d` part of `f`.
pub(crate) fn to_power_sums(vars: &Vars, coords: &BTreeMap<&Partition, &RatFunc>, basis: &DegreeBasis) -> Vec<RatFunc> {
    let mut acc: Vec<Vec<RatFunc>> = vec![Vec::new(); basis.parts.len()];
    for (nu, c) in coords {
        for (rho, x) in &basis.m_to_p[basis.index[*nu]] {
            acc[*rho].push(c.scale(x));
        }
    }
    acc.iter().map(|items| RatFunc::sum_in(vars, items)).collect()
}

/// Exact `<f, g>_{q,t}`. Coordinates are read as elements of the ring of
/// symmetric functions, so the result is meaningful when `nvars` is at
/// least the degree.
pub fn scalar_product(f: &SymSeries, g: &SymSeries) -> Result<RatFunc, MacdonaldError> {
    f.check(g)?;
    let vars = f.vars.clone();
    let (qi, ti) = qt_indices(&vars)?;
    let maxdeg = f.maxdeg.min(g.maxdeg);
    let mut terms = Vec::new();
    for d in 0..=maxdeg {
        let fd: BTreeMap<&Partition, &RatFunc> = f.coeffs.iter().filter(|(k, _)| k.weight() == d).collect();
        let gd: BTreeMap<&Partition, &RatFunc> = g.coeffs.iter().filter(|(k, _)| k.weight() == d).collect();
        if fd.is_empty() || gd.is_empty() {
            continue;
        }
        let basis = degree_basis(d);
        let fp = to_power_sums(&vars, &fd, &basis);
        let gp = to_power_sums(&vars, &gd, &basis);
        for (i, rho) in basis.parts.iter().enumerate() {
            if fp[i].is_zero() || gp[i].is_zero() {
                continue;
            }
            let w = power_sum_norm(rho).to_ratfunc_in(&vars, qi, ti);
            terms.push(fp[i].try_mul(&gp[i])?.try_mul(&w)?);
        }
    }
    Ok(RatFunc::sum_in(&vars, &terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VarSet;
    use crate::partition;

    fn p_series(rho: &Partition, n: usize) -> SymSeries {
        let v = VarSet::qt();
        let d = rho.weight();
        let items = power_sum_in_m(rho, d)
            .into_iter()
            .map(|(k, c)| (k, RatFunc::constant(&v, BigRat::from_integer(c))));
        SymSeries::from_coeffs(&v, n, d, items)
    }

    fn one_minus(v: &Vars, name: &str) -> RatFunc {
        RatFunc::one(v) - RatFunc::named(v, name)
    }

    #[test]
    fn z_values() {
        assert_eq!(z_lambda(&partition![1]), BigInt::from(1));
        assert_eq!(z_lambda(&partition![1, 1]), BigInt::from(2));
        assert_eq!(z_lambda(&partition![2, 2, 1]), BigInt::from(8));
    }

    #[test]
    fn power_sum_products() {
        let v = VarSet::qt();
        let p1 = p_series(&partition![1], 3);
        let p11 = p_series(&partition![1, 1], 3);
        let p2 = p_series(&partition![2], 3);
        let ratio = one_minus(&v, "q") / one_minus(&v, "t");
        assert_eq!(scalar_product(&p1, &p1).unwrap(), ratio);
        assert!(scalar_product(&p2, &p11).unwrap().is_zero());
        let expect = (&ratio * &ratio).scale(&BigRat::from_integer(2.into()));
        assert_eq!(scalar_product(&p11, &p11).unwrap(), expect);
    }

    #[test]
    fn transition_round_trip() {
        for d in 1..=6 {
            let b = degree_basis(d);
            let n = b.parts.len();
            for i in 0..n {
                for j in 0..n {
                    let mut s = BigRat::zero();
                    for (rho, x) in &b.m_to_p[i] {
                        s += x * BigRat::from_integer(b.p_to_m[*rho][j].clone());
                    }
                    let want = if i == j { BigRat::one() } else { BigRat::zero() };
                    assert_eq!(s, want);
                }
            }
        }
    }

    #[test]
    fn p2_in_monomials() {
        let (parts, m) = power_sum_matrix(2);
        assert_eq!(parts, vec![partition![1, 1], partition![2]]);
        // p_11 = m_2 + 2 m_11, p_2 = m_2
        assert_eq!(m[0], vec![BigInt::from(2), BigInt::from(1)]);
        assert_eq!(m[1], vec![BigInt::from(0), BigInt::from(1)]);
    }
}
