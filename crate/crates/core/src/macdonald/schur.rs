//! Schur polynomials from Kostka numbers, an oracle independent of the
//! Gram–Schmidt construction.

use crate::algebra::{RatFunc, Vars};
use crate::partitions::{partitions_of, sub_strips, Partition, StripKind};

use super::SymSeries;

/// Kostka number: semistandard tableaux of shape `lambda` and content `mu`,
/// peeling off the largest letter as a horizontal strip.
pub fn kostka(lambda: &Partition, content: &[u32]) -> u64 {
    match content.split_last() {
        None => lambda.is_empty() as u64,
        Some((&last, rest)) => sub_strips(lambda, last, StripKind::Horizontal)
            .iter()
            .map(|nu| kostka(nu, rest))
            .sum(),
    }
}

/// `s_lambda` in the monomial basis through Kostka numbers.
pub fn schur(lambda: &Partition, n: usize, vars: &Vars) -> SymSeries {
    let mut s = SymSeries::zero(vars, n, lambda.weight());
    for mu in partitions_of(lambda.weight(), n) {
        let k = kostka(lambda, mu.parts());
        if k > 0 {
            s.insert(mu, RatFunc::from_int(vars, k as i64));
        }
    }
    s
}
