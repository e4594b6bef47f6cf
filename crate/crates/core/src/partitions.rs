//! Integer partitions and their diagram combinatorics.
//!
//! Cells are addressed 1-indexed as `(row, column)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("parts must be weakly decreasing and nonnegative: {0:?}")]
    NotAPartition(Vec<i64>),
    #[error("cell ({0},{1}) lies outside the diagram")]
    OutOfDiagram(usize, usize),
    #[error("{0} - {1} is not a {2} strip")]
    NotAStrip(Partition, Partition, StripKind),
    #[error("cannot parse partition from {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StripKind {
    Horizontal,
    Vertical,
}

impl fmt::Display for StripKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StripKind::Horizontal => "horizontal",
            StripKind::Vertical => "vertical",
        })
    }
}

/// Weakly decreasing list of positive parts; trailing zeros are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: SmallVec<[u32; 8]>,
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = PartitionError;
    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        Partition::new(&v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.parts.to_vec()
    }
}

impl Partition {
    /// Accepts weakly decreasing parts, dropping trailing zeros.
    pub fn new(parts: &[u32]) -> Result<Self, PartitionError> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(PartitionError::NotAPartition(parts.iter().map(|&p| p as i64).collect()));
        }
        let len = parts.iter().take_while(|&&p| p > 0).count();
        Ok(Partition {
            parts: SmallVec::from_slice(&parts[..len]),
        })
    }

    /// Sorts arbitrary parts into a partition.
    pub fn from_unsorted(parts: &[u32]) -> Self {
        let mut v: SmallVec<[u32; 8]> = parts.iter().copied().filter(|&p| p > 0).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts: v }
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// The `i`th part, 1-indexed, zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// Parts padded with zeros to length `n` (`n >= len`).
    pub fn padded(&self, n: usize) -> Vec<u32> {
        assert!(n >= self.len(), "cannot pad {self} to {n} parts");
        let mut v = self.parts.to_vec();
        v.resize(n, 0);
        v
    }

    pub fn conjugate(&self) -> Partition {
        let Some(&first) = self.parts.first() else {
            return Partition::empty();
        };
        let parts = (1..=first)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count() as u32)
            .collect();
        Partition { parts }
    }

    pub fn contains_cell(&self, i: usize, j: usize) -> bool {
        i >= 1 && j >= 1 && (j as u32) <= self.part(i)
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (1..=p as usize).map(move |j| (i + 1, j)))
    }

    /// Arm, leg and hook length of a cell.
    pub fn arm_leg_hook(&self, i: usize, j: usize) -> Result<(u32, u32, u32), PartitionError> {
        if !self.contains_cell(i, j) {
            return Err(PartitionError::OutOfDiagram(i, j));
        }
        let a = self.part(i) - j as u32;
        let l = self.parts.iter().skip(i).take_while(|&&p| p >= j as u32).count() as u32;
        Ok((a, l, a + l + 1))
    }

    /// `(arm, leg)` for every cell, row-major.
    pub fn arms_legs(&self) -> Vec<(u32, u32)> {
        let conj = self.conjugate();
        self.cells()
            .map(|(i, j)| (self.part(i) - j as u32, conj.part(j) - i as u32))
            .collect()
    }

    /// Multiplicity of the part `i`.
    pub fn multiplicity(&self, i: u32) -> usize {
        self.parts.iter().filter(|&&p| p == i).count()
    }

    /// `(part, multiplicity)` for each distinct part, largest first.
    pub fn multiplicities(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Number of rows of odd length.
    pub fn odd_rows(&self) -> usize {
        self.parts.iter().filter(|&&p| p % 2 == 1).count()
    }

    /// Number of columns of odd length.
    pub fn odd_columns(&self) -> usize {
        self.conjugate().odd_rows()
    }

    /// `mu` is contained in `self` as a diagram.
    pub fn contains(&self, mu: &Partition) -> bool {
        mu.len() <= self.len() && mu.parts.iter().zip(&self.parts).all(|(m, l)| m <= l)
    }

    /// Dominance `self <= other`; partitions of different weight are incomparable.
    pub fn dominated_by(&self, other: &Partition) -> bool {
        if self.weight() != other.weight() {
            return false;
        }
        let (mut a, mut b) = (0u32, 0u32);
        for i in 1..=self.len().max(other.len()) {
            a += self.part(i);
            b += other.part(i);
            if a > b {
                return false;
            }
        }
        true
    }

    pub fn without_first_part(&self) -> Partition {
        Partition {
            parts: SmallVec::from_slice(self.parts.get(1..).unwrap_or(&[])),
        }
    }
}

/// Size of `lambda - mu` if it is a strip of the given kind.
pub fn strip_test(lambda: &Partition, mu: &Partition, kind: StripKind) -> Option<u32> {
    if !lambda.contains(mu) {
        return None;
    }
    let ok = match kind {
        StripKind::Vertical => (1..=lambda.len()).all(|i| lambda.part(i) - mu.part(i) <= 1),
        // Interlacing lambda_1 >= mu_1 >= lambda_2 >= mu_2 >= ...
        StripKind::Horizontal => (1..=lambda.len()).all(|i| mu.part(i) >= lambda.part(i + 1)),
    };
    ok.then(|| lambda.weight() - mu.weight())
}

/// All `lambda` with `lambda - mu` a strip of size `r`, in descending lex order.
pub fn add_strips(mu: &Partition, r: u32, kind: StripKind) -> Vec<Partition> {
    let mut out = Vec::new();
    match kind {
        StripKind::Horizontal => {
            // lambda_1 in [mu_1, mu_1 + r], lambda_i in [mu_i, mu_{i-1}] for i >= 2.
            let n = mu.len() + 1;
            let mut cur = vec![0u32; n];
            fn rec(mu: &Partition, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
                let n = cur.len();
                if i > n {
                    if left == 0 {
                        out.push(Partition::new(cur).expect("interlacing gives a partition"));
                    }
                    return;
                }
                let lo = mu.part(i);
                let hi = if i == 1 { lo + left } else { mu.part(i - 1).min(lo + left) };
                for v in (lo..=hi).rev() {
                    cur[i - 1] = v;
                    rec(mu, i + 1, left - (v - lo), cur, out);
                }
            }
            rec(mu, 1, r, &mut cur, &mut out);
        }
        StripKind::Vertical => {
            let conj = mu.conjugate();
            out = add_strips(&conj, r, StripKind::Horizontal)
                .into_iter()
                .map(|l| l.conjugate())
                .collect();
            out.sort_by(|a, b| b.cmp(a));
        }
    }
    out
}

/// All `mu` with `lambda - mu` a strip of size `r`, in descending lex order.
pub fn sub_strips(lambda: &Partition, r: u32, kind: StripKind) -> Vec<Partition> {
    if r > lambda.weight() {
        return Vec::new();
    }
    match kind {
        StripKind::Horizontal => {
            let n = lambda.len();
            let mut out = Vec::new();
            let mut cur = vec![0u32; n];
            fn rec(lam: &Partition, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
                if i > cur.len() {
                    if left == 0 {
                        out.push(Partition::new(cur).expect("interlacing gives a partition"));
                    }
                    return;
                }
                let hi = lam.part(i);
                let lo = lam.part(i + 1).max(hi.saturating_sub(left));
                for v in (lo..=hi).rev() {
                    cur[i - 1] = v;
                    rec(lam, i + 1, left - (hi - v), cur, out);
                }
            }
            rec(lambda, 1, r, &mut cur, &mut out);
            out
        }
        StripKind::Vertical => {
            let mut out: Vec<Partition> = sub_strips(&lambda.conjugate(), r, StripKind::Horizontal)
                .into_iter()
                .map(|m| m.conjugate())
                .collect();
            out.sort_by(|a, b| b.cmp(a));
            out
        }
    }
}

/// Partitions of `d` with at most `max_len` parts, in descending lex order.
pub fn partitions_of(d: u32, max_len: usize) -> Vec<Partition> {
    fn rec(left: u32, maxpart: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if left == 0 {
            out.push(Partition::new(cur).expect("descending"));
            return;
        }
        if slots == 0 {
            return;
        }
        for p in (1..=maxpart.min(left)).rev() {
            cur.push(p);
            rec(left - p, p, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, max_len, &mut Vec::new(), &mut out);
    out
}

/// Partitions of weight at most `d` with at most `max_len` parts, by weight
/// ascending and then descending lex order.
pub fn partitions_up_to(d: u32, max_len: usize) -> Vec<Partition> {
    (0..=d).flat_map(|k| partitions_of(k, max_len)).collect()
}

/// Partitions contained in the box `mu`.
pub fn sub_partitions(mu: &Partition) -> Vec<Partition> {
    let mut out = Vec::new();
    fn rec(mu: &Partition, i: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if i > mu.len() {
            out.push(Partition::new(cur).expect("descending"));
            return;
        }
        for v in 0..=mu.part(i).min(cap) {
            cur.push(v);
            rec(mu, i + 1, v, cur, out);
            cur.pop();
        }
    }
    rec(mu, 1, u32::MAX, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Graded order: weight first, then lexicographic on parts.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.parts.as_slice().cmp(other.parts.as_slice()))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Partition {
    type Err = PartitionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PartitionError::Parse(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(err)?;
        if inner.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let parts: Vec<u32> = inner
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| err()))
            .collect::<Result<_, _>>()?;
        Partition::new(&parts)
    }
}

/// Builds a partition from literal parts; panics on invalid input.
#[macro_export]
macro_rules! partition {
    () => { $crate::partitions::Partition::empty() };
    ($($p:expr),+ $(,)?) => {
        $crate::partitions::Partition::new(&[$($p),+]).expect("invalid partition literal")
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts).unwrap()
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
        assert_eq!(Partition::empty().conjugate(), Partition::empty());
        let l = p(&[5, 4, 2, 2, 1]);
        assert_eq!(l.conjugate(), p(&[5, 4, 2, 2, 1]));
        assert_eq!(l.conjugate().conjugate(), l);
    }

    #[test]
    fn arm_leg_hook_examples() {
        assert_eq!(p(&[1]).arm_leg_hook(1, 1), Ok((0, 0, 1)));
        assert_eq!(p(&[3, 1]).arm_leg_hook(1, 1), Ok((2, 1, 4)));
        assert_eq!(p(&[3, 1]).arm_leg_hook(1, 3), Ok((0, 0, 1)));
        assert_eq!(p(&[3, 1]).arm_leg_hook(2, 2), Err(PartitionError::OutOfDiagram(2, 2)));
        let row = p(&[5]);
        let hooks: Vec<u32> = (1..=5).map(|j| row.arm_leg_hook(1, j).unwrap().2).collect();
        assert_eq!(hooks, vec![5, 4, 3, 2, 1]);
    }

    #[test]
    fn strip_examples() {
        let l = p(&[5, 4, 2, 2, 1]);
        let m = p(&[4, 3, 1, 1, 1]);
        assert_eq!(strip_test(&l, &m, StripKind::Vertical), Some(4));
        assert_eq!(strip_test(&l, &l, StripKind::Horizontal), Some(0));
        assert_eq!(strip_test(&l, &l, StripKind::Vertical), Some(0));
        assert_eq!(strip_test(&p(&[2]), &Partition::empty(), StripKind::Vertical), None);
        assert_eq!(strip_test(&p(&[2]), &Partition::empty(), StripKind::Horizontal), Some(2));
    }

    #[test]
    fn enumeration_examples() {
        let four = partitions_of(4, usize::MAX);
        assert_eq!(
            four,
            vec![p(&[4]), p(&[3, 1]), p(&[2, 2]), p(&[2, 1, 1]), p(&[1, 1, 1, 1])]
        );
        assert_eq!(partitions_of(4, 2).len(), 3);
        assert_eq!(partitions_of(0, 0), vec![Partition::empty()]);
        // column heights counted cell by cell
        let lam = p(&[6, 3, 3, 1]);
        let heights: Vec<usize> = (1..=6).map(|j| lam.cells().filter(|c| c.1 == j).count()).collect();
        assert_eq!(heights, vec![4, 3, 3, 1, 1, 1]);
        assert_eq!(lam.odd_columns(), heights.iter().filter(|h| *h % 2 == 1).count());
        assert_eq!(lam.odd_columns(), 5);
        assert_eq!(p(&[6, 3, 3, 1]).odd_rows(), 3);
        assert!(p(&[2, 2]).dominated_by(&p(&[3, 1])));
        assert!(!p(&[3, 1]).dominated_by(&p(&[2, 2])));
        assert!(!p(&[3, 1, 1, 1]).dominated_by(&p(&[2, 2, 2])));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("[5,4,2,2,1]".parse::<Partition>().unwrap(), p(&[5, 4, 2, 2, 1]));
        assert_eq!("[]".parse::<Partition>().unwrap(), Partition::empty());
        assert!("[1,2]".parse::<Partition>().is_err());
        assert_eq!(p(&[3, 1, 0]).to_string(), "[3,1]");
    }

    #[test]
    fn sub_partitions_of_a_box() {
        assert_eq!(sub_partitions(&p(&[1, 1])), vec![Partition::empty(), p(&[1]), p(&[1, 1])]);
        assert_eq!(sub_partitions(&p(&[3, 3])).len(), 10);
    }
}
