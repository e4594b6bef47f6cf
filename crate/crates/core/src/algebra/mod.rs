//! Exact arithmetic: rationals, sparse polynomials, rational functions with
//! factored denominators, and binomial products in `q` and `t`.

mod cyclo;
mod factored;
mod poly;
mod ratfunc;

pub use cyclo::{cyclotomic, euler_phi, FactorKey};
pub use factored::{Binomial, FactoredQT};
pub use poly::{Mono, MultiPoly, VarSet, Vars, MAX_EXPONENT};
pub use ratfunc::RatFunc;
pub(crate) use poly::same_vars as same_universe;

/// Arbitrary-precision rational number, always stored in lowest terms.
pub type BigRat = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("arithmetic overflow: exponent exceeds 2^31-1")]
    ExponentOverflow,
    #[error("operands live in different variable universes")]
    VariableMismatch,
    #[error("denominator vanishes at specialization")]
    PoleAtSpecialization,
    #[error("degenerate factor 1 - 1 in a binomial product")]
    DegenerateFactor,
    #[error("division by zero")]
    DivisionByZero,
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> BigRat {
    BigRat::from_integer(n.into())
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> BigRat {
    BigRat::new(n.into(), d.into())
}
