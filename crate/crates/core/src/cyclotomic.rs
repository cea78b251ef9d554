//! Cyclotomic polynomials by exact division, and multiplicity extraction.
//!
//! `Φ_n` is obtained from `z^n − 1` by dividing out `Φ_d` for every proper
//! divisor `d` of `n`. Results are memoized in a process-wide cache; the
//! cache only ever gains entries and every entry for a given `n` is the same
//! polynomial, so racing writers are harmless.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::expvec::ExpVector;
use crate::polyseries::IntPolynomial;

fn cache() -> &'static RwLock<HashMap<usize, Arc<IntPolynomial>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<IntPolynomial>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn proper_divisors(n: usize) -> Vec<usize> {
    (1..n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// `Φ_n`, shared through the cache.
pub fn cyclotomic_shared(n: usize) -> Result<Arc<IntPolynomial>> {
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    if let Some(p) = cache().read().expect("cyclotomic cache poisoned").get(&n) {
        return Ok(Arc::clone(p));
    }
    let mut acc = IntPolynomial::x_pow_minus_one(n);
    for d in proper_divisors(n) {
        let phi_d = cyclotomic_shared(d)?;
        let (q, exact) = acc.div_exact(&phi_d)?;
        assert!(exact, "Φ_{d} does not divide z^{n} - 1 after earlier divisions");
        acc = q;
    }
    let phi = Arc::new(acc);
    cache()
        .write()
        .expect("cyclotomic cache poisoned")
        .entry(n)
        .or_insert_with(|| Arc::clone(&phi));
    Ok(phi)
}

/// The cyclotomic polynomial of order `n`.
pub fn cyclotomic_poly(n: usize) -> Result<IntPolynomial> {
    cyclotomic_shared(n).map(|p| (*p).clone())
}

/// Multiplicity `s` of `Φ_n` in `p`, and the residual `p / Φ_n^s`.
pub fn multiplicity_in_poly(p: &IntPolynomial, n: usize) -> Result<(u32, IntPolynomial)> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let phi = cyclotomic_shared(n)?;
    let mut residual = p.clone();
    let mut s = 0;
    loop {
        let (q, exact) = residual.div_exact(&phi)?;
        if !exact {
            return Ok((s, residual));
        }
        residual = q;
        s += 1;
    }
}

/// Pairwise co-prime bases `q_1..q_m` together with an exponent vector `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicIndex {
    qs: Vec<u64>,
    j: ExpVector,
}

impl CyclotomicIndex {
    pub fn new(qs: Vec<u64>, j: ExpVector) -> Result<Self> {
        validate_bases(&qs)?;
        if qs.len() != j.len() {
            return Err(Error::LengthMismatch(qs.len(), j.len()));
        }
        Ok(Self { qs, j })
    }

    pub fn qs(&self) -> &[u64] {
        &self.qs
    }

    pub fn j(&self) -> &ExpVector {
        &self.j
    }

    /// `∏ q_ℓ^{j_ℓ}`.
    pub fn order(&self) -> BigUint {
        self.qs
            .iter()
            .zip(self.j.entries())
            .fold(BigUint::one(), |acc, (&q, &e)| acc * BigUint::from(q).pow(e))
    }

    /// `Φ_j`, when the order fits in memory-addressable range.
    pub fn polynomial(&self) -> Result<IntPolynomial> {
        let n = usize::try_from(self.order())
            .map_err(|_| Error::Parse(format!("order of {} is too large", self.j)))?;
        cyclotomic_poly(n)
    }
}

pub fn order_of_index(idx: &CyclotomicIndex) -> BigUint {
    idx.order()
}

pub(crate) fn validate_bases(qs: &[u64]) -> Result<()> {
    if let Some(q) = qs.iter().find(|&&q| q < 2) {
        return Err(Error::InvalidTuple(format!("base {q} is below 2")));
    }
    for (a, &qa) in qs.iter().enumerate() {
        for &qb in &qs[a + 1..] {
            if qa.gcd(&qb) != 1 {
                return Err(Error::InvalidTuple(format!("bases {qa} and {qb} are not co-prime")));
            }
        }
    }
    Ok(())
}
