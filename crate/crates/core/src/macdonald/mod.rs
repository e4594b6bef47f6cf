//! Symmetric functions over `Q(q,t)`: the monomial basis, the `(q,t)` scalar
//! product, Macdonald polynomials, Pieri coefficients and the `q,t`
//! Littlewood–Richardson coefficients.

mod lr;
mod modular;
mod msym;
mod operator;
mod pieri;
mod polys;
mod scalar;
mod schur;

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{AlgebraError, BigRat, RatFunc, Vars};
use crate::partitions::{Partition, PartitionError};

pub use lr::{double_strip_sum, qt_lr, verify_double_strips, verify_lr_symmetries, verify_triple_products, LrFailure, LrReport};
pub use msym::{msym_product, structure_constants};
pub use operator::{check_operator_eigen, is_operator_eigenfunction, operator_eigenvalue};
pub use pieri::{
    b_minus_conj_rows, b_minus_conj_swap, b_minus_forms, b_pm, b_pm_factored, b_pm_rows, g_r, phi_factored,
    pieri_extract, pieri_phi_psi, pieri_phi_via_b, pieri_psi_prime, psi_factored, psi_prime_factored, BMinusForms,
    PhiPsi, PieriKind, Sign,
};
pub use polys::{expand_in_p, macdonald_P, macdonald_Q, MacdonaldCache};
pub(crate) use polys::macdonald_P_in;
pub use scalar::{power_sum_matrix, scalar_product, z_lambda};
pub use schur::{kostka, schur};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MacdonaldError {
    #[error("series live in different numbers of variables ({0} vs {1})")]
    NvarsMismatch(usize, usize),
    #[error("series need the variables q and t")]
    MissingQT,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// A symmetric polynomial in `nvars` variables, truncated at total degree
/// `maxdeg`, stored by its monomial-basis coordinates.
#[derive(Clone)]
pub struct SymSeries {
    vars: Vars,
    nvars: usize,
    maxdeg: u32,
    coeffs: BTreeMap<Partition, RatFunc>,
}

impl SymSeries {
    pub fn zero(vars: &Vars, nvars: usize, maxdeg: u32) -> Self {
        SymSeries {
            vars: vars.clone(),
            nvars,
            maxdeg,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Vars, nvars: usize, maxdeg: u32) -> Self {
        Self::monomial(vars, nvars, maxdeg, Partition::empty())
    }

    /// `m_lambda`, or zero when `lambda` falls outside the bounds.
    pub fn monomial(vars: &Vars, nvars: usize, maxdeg: u32, lambda: Partition) -> Self {
        let mut s = Self::zero(vars, nvars, maxdeg);
        s.insert(lambda, RatFunc::one(vars));
        s
    }

    /// `p_r = m_(r)`.
    pub fn power_sum(vars: &Vars, nvars: usize, maxdeg: u32, r: u32) -> Self {
        let lambda = if r == 0 { Partition::empty() } else { Partition::from_unsorted(&[r]) };
        let mut s = Self::monomial(vars, nvars, maxdeg, lambda);
        if r == 0 {
            // p_0 = n
            s = s.scale_rat(&BigRat::from_integer((nvars as i64).into()));
        }
        s
    }

    /// `e_r = m_(1^r)`.
    pub fn elementary(vars: &Vars, nvars: usize, maxdeg: u32, r: u32) -> Self {
        Self::monomial(vars, nvars, maxdeg, Partition::from_unsorted(&vec![1; r as usize]))
    }

    pub fn from_coeffs<I>(vars: &Vars, nvars: usize, maxdeg: u32, items: I) -> Self
    where
        I: IntoIterator<Item = (Partition, RatFunc)>,
    {
        let mut s = Self::zero(vars, nvars, maxdeg);
        for (l, c) in items {
            s.add_term(l, c);
        }
        s
    }

    fn admits(&self, lambda: &Partition) -> bool {
        lambda.len() <= self.nvars && lambda.weight() <= self.maxdeg
    }

    /// Sets a coordinate, ignoring out-of-bounds keys and zero values.
    pub fn insert(&mut self, lambda: Partition, c: RatFunc) {
        if !self.admits(&lambda) {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&lambda);
        } else {
            self.coeffs.insert(lambda, c);
        }
    }

    /// Adds to a coordinate.
    pub fn add_term(&mut self, lambda: Partition, c: RatFunc) {
        if !self.admits(&lambda) || c.is_zero() {
            return;
        }
        let v = match self.coeffs.get(&lambda) {
            Some(old) => old + &c,
            None => c,
        };
        self.insert(lambda, v);
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn maxdeg(&self) -> u32 {
        self.maxdeg
    }

    pub fn coeff(&self, lambda: &Partition) -> RatFunc {
        self.coeffs
            .get(lambda)
            .cloned()
            .unwrap_or_else(|| RatFunc::zero(&self.vars))
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Partition, &RatFunc)> {
        self.coeffs.iter()
    }

    pub fn nterms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, other: &SymSeries) -> Result<(), MacdonaldError> {
        if self.nvars != other.nvars {
            return Err(MacdonaldError::NvarsMismatch(self.nvars, other.nvars));
        }
        if !crate::algebra::same_universe(&self.vars, &other.vars) {
            return Err(AlgebraError::VariableMismatch.into());
        }
        Ok(())
    }

    /// Sum, truncated at the smaller degree bound.
    pub fn try_add(&self, other: &SymSeries) -> Result<SymSeries, MacdonaldError> {
        self.check(other)?;
        let mut out = Self::zero(&self.vars, self.nvars, self.maxdeg.min(other.maxdeg));
        let mut keys: Vec<&Partition> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        for k in keys {
            let v = match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => a.try_add(b)?,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.insert(k.clone(), v);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &SymSeries) -> Result<SymSeries, MacdonaldError> {
        self.try_add(&other.scale_rat(&BigRat::from_integer((-1).into())))
    }

    pub fn scale(&self, c: &RatFunc) -> Result<SymSeries, MacdonaldError> {
        let mut out = Self::zero(&self.vars, self.nvars, self.maxdeg);
        for (k, v) in &self.coeffs {
            out.insert(k.clone(), v.try_mul(c)?);
        }
        Ok(out)
    }

    pub fn scale_rat(&self, c: &BigRat) -> SymSeries {
        let mut out = Self::zero(&self.vars, self.nvars, self.maxdeg);
        for (k, v) in &self.coeffs {
            out.insert(k.clone(), v.scale(c));
        }
        out
    }

    /// Drops coordinates beyond new, smaller bounds; setting trailing
    /// variables to zero is exactly this for symmetric polynomials.
    pub fn restrict(&self, nvars: usize, maxdeg: u32) -> SymSeries {
        let mut out = Self::zero(&self.vars, nvars.min(self.nvars), maxdeg.min(self.maxdeg));
        for (k, v) in &self.coeffs {
            out.insert(k.clone(), v.clone());
        }
        out
    }

    /// Same coordinates under a new degree bound, which may be larger.
    pub fn with_maxdeg(&self, maxdeg: u32) -> SymSeries {
        let mut out = Self::zero(&self.vars, self.nvars, maxdeg);
        for (k, v) in &self.coeffs {
            out.insert(k.clone(), v.clone());
        }
        out
    }

    /// The homogeneous component of degree `d`.
    pub fn homogeneous(&self, d: u32) -> SymSeries {
        let mut out = Self::zero(&self.vars, self.nvars, self.maxdeg);
        for (k, v) in &self.coeffs {
            if k.weight() == d {
                out.insert(k.clone(), v.clone());
            }
        }
        out
    }

    /// Applies a coefficient map, for instance a specialization.
    pub fn map_coeffs<F>(&self, vars: &Vars, f: F) -> Result<SymSeries, MacdonaldError>
    where
        F: Fn(&RatFunc) -> Result<RatFunc, AlgebraError>,
    {
        let mut out = Self::zero(vars, self.nvars, self.maxdeg);
        for (k, v) in &self.coeffs {
            out.insert(k.clone(), f(v)?);
        }
        Ok(out)
    }

    /// Coordinate-wise exact equality over the common bounds.
    pub fn eq_exact(&self, other: &SymSeries) -> bool {
        let n = self.nvars.min(other.nvars);
        let d = self.maxdeg.min(other.maxdeg);
        let a = self.restrict(n, d);
        let b = other.restrict(n, d);
        let mut keys: Vec<&Partition> = a.coeffs.keys().chain(b.coeffs.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().all(|k| a.coeff(k).eq_cross(&b.coeff(k)))
    }
}

impl fmt::Display for SymSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v})*m{k}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SymSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymSeries[n={}, D={}]({})", self.nvars, self.maxdeg, self)
    }
}

/// Index of `name` in `vars`, for the q and t lookups.
pub(crate) fn qt_indices(vars: &Vars) -> Result<(usize, usize), MacdonaldError> {
    match (vars.index_of("q"), vars.index_of("t")) {
        (Some(q), Some(t)) => Ok((q, t)),
        _ => Err(MacdonaldError::MissingQT),
    }
}
