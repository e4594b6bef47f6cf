//! Seeded, pole-avoiding parameter sampling.
//!
//! Every trial owns a PCG64 (XSL-RR 128/64) generator. Its 128-bit state is
//! `fnv1a64(id) << 64 | seed`, and its stream selector is the trial index, so
//! trial `k` of identity `id` draws the same points however trials are
//! scheduled. Doubles are the top 53 bits of `next_u64` scaled by `2^-53`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use rand_core::Rng;
use rand_pcg::Pcg64;

use crate::algebra::BigRat;
use crate::ehs::EhsError;
use crate::thetanum::{NumError, Numeric, ThetaContext};

/// Smallest admissible modulus of any inverted quantity.
pub const MIN_DENOMINATOR: f64 = 1e-6;
/// Rejections allowed before giving up on a point.
pub const MAX_ATTEMPTS: usize = 1000;
pub const MODULUS_RANGE: (f64, f64) = (0.6, 1.6);
pub const NOME_RANGE: (f64, f64) = (0.05, 0.5);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error("no admissible point after {0} attempts")]
    Exhausted(usize),
    #[error("{0}")]
    Failed(String),
}

/// Why a single attempt did not produce a value.
#[derive(Debug, Clone, PartialEq)]
pub enum Reject {
    /// The point sits on or near a pole; draw again.
    Pole,
    /// Anything else; sampling stops.
    Fatal(String),
}

impl From<NumError> for Reject {
    fn from(e: NumError) -> Self {
        match e {
            NumError::Pole | NumError::ZeroArgument | NumError::NonFinite => Reject::Pole,
            other => Reject::Fatal(other.to_string()),
        }
    }
}

impl From<EhsError> for Reject {
    fn from(e: EhsError) -> Self {
        match e {
            EhsError::Num(n) => n.into(),
            EhsError::Vandermonde => Reject::Pole,
            EhsError::Shape(s) => Reject::Fatal(s),
        }
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub struct Sampler {
    rng: Pcg64,
}

impl Sampler {
    pub fn for_trial(seed: u64, id: &str, trial: u64) -> Self {
        let state = ((fnv1a64(id) as u128) << 64) | seed as u128;
        Sampler {
            rng: Pcg64::new(state, trial as u128),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    fn angle(&mut self) -> f64 {
        self.uniform(0.0, 2.0 * PI)
    }

    /// Modulus log-uniform on [`MODULUS_RANGE`], argument uniform.
    pub fn complex(&mut self) -> Complex64 {
        let (lo, hi) = MODULUS_RANGE;
        let r = self.uniform(lo.ln(), hi.ln()).exp();
        Complex64::from_polar(r, self.angle())
    }

    pub fn complexes(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex()).collect()
    }

    /// Modulus uniform on [`NOME_RANGE`], argument uniform.
    pub fn nome(&mut self) -> Complex64 {
        let (lo, hi) = NOME_RANGE;
        let r = self.uniform(lo, hi);
        Complex64::from_polar(r, self.angle())
    }

    /// Uniform in `[lo, hi]`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// `a/b` with `0 < |a| <= 12`, `1 <= b <= 12`, never `0` or `+-1`.
    pub fn rational(&mut self) -> BigRat {
        loop {
            let a = self.int(-12, 12);
            let b = self.int(1, 12);
            if a == 0 || a.abs() == b {
                continue;
            }
            return BigRat::new(BigInt::from(a), BigInt::from(b));
        }
    }

    pub fn rationals(&mut self, n: usize) -> Vec<BigRat> {
        (0..n).map(|_| self.rational()).collect()
    }

    /// Draws a nome and runs `attempt` with a field at that nome until no
    /// denominator falls below [`MIN_DENOMINATOR`].
    pub fn numeric<T, A>(&mut self, mut attempt: A) -> Result<T, SampleError>
    where
        A: FnMut(&mut Sampler, &Numeric) -> Result<T, Reject>,
    {
        for _ in 0..MAX_ATTEMPTS {
            let ctx = ThetaContext::new(self.nome()).map_err(|e| SampleError::Failed(e.to_string()))?;
            let f = Numeric::new(ctx);
            match attempt(self, &f) {
                Ok(v) if f.min_den() >= MIN_DENOMINATOR => return Ok(v),
                Ok(_) | Err(Reject::Pole) => continue,
                Err(Reject::Fatal(s)) => return Err(SampleError::Failed(s)),
            }
        }
        Err(SampleError::Exhausted(MAX_ATTEMPTS))
    }

    /// Runs `attempt` until it avoids exact poles.
    pub fn exact<T, A>(&mut self, mut attempt: A) -> Result<T, SampleError>
    where
        A: FnMut(&mut Sampler) -> Result<T, Reject>,
    {
        for _ in 0..MAX_ATTEMPTS {
            match attempt(self) {
                Ok(v) => return Ok(v),
                Err(Reject::Pole) => continue,
                Err(Reject::Fatal(s)) => return Err(SampleError::Failed(s)),
            }
        }
        Err(SampleError::Exhausted(MAX_ATTEMPTS))
    }
}
