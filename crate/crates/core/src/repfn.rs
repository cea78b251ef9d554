//! Representation functions over decided set prefixes.
//!
//! `r_A(n; k_1..k_d)` counts ordered tuples `(a_1..a_d) ∈ A^d` with
//! `k_1 a_1 + … + k_d a_d = n`. Only a finite prefix of `A` is ever known, so
//! every count comes with a `determined` flag: `n` is determined when
//! `⌊n / k_i⌋ ≤ M` for all `i`, since no coordinate of a witness can exceed
//! that bound.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expvec::ExpVector;
use crate::polyseries::{IntPolynomial, TruncatedSeries};

/// Coefficients `k_1..k_d` of the linear form, `d ≥ 2`, each `k_i ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct CoefficientTuple {
    ks: Vec<u64>,
}

impl CoefficientTuple {
    pub fn new(ks: Vec<u64>) -> Result<Self> {
        if ks.len() < 2 {
            return Err(Error::InvalidTuple(format!(
                "need at least two coefficients, got {}",
                ks.len()
            )));
        }
        if ks.contains(&0) {
            return Err(Error::InvalidTuple("coefficients must be positive".into()));
        }
        Ok(Self { ks })
    }

    pub fn ks(&self) -> &[u64] {
        &self.ks
    }

    pub fn d(&self) -> usize {
        self.ks.len()
    }

    pub fn gcd(&self) -> u64 {
        self.ks.iter().fold(0, |g, &k| g.gcd(&k))
    }

    pub fn k_min(&self) -> u64 {
        *self.ks.iter().min().expect("tuple is nonempty")
    }

    pub fn k_max(&self) -> u64 {
        *self.ks.iter().max().expect("tuple is nonempty")
    }

    /// `n` is determined by a prefix decided through `m`.
    pub fn is_determined(&self, n: u64, m: u64) -> bool {
        n / self.k_min() <= m
    }

    /// Decompose as `k_i = ∏ q_ℓ^{b(i,ℓ)}` with pairwise co-prime `q_ℓ ≥ 2`,
    /// `b ∈ {0,1}`, no zero row, no repeated row, and no `q_ℓ` dividing every
    /// coefficient.
    ///
    /// Primes sharing the same support pattern are merged into one base, so
    /// the decomposition uses the fewest bases possible; bases are listed by
    /// their smallest prime factor.
    pub fn theorem_form(&self) -> Result<TheoremForm> {
        let fail = |reason: String| Error::NotTheoremForm {
            ks: self.to_string(),
            reason,
        };
        if let Some(i) = self.ks.iter().position(|&k| k == 1) {
            return Err(fail(format!("coefficient k_{} = 1 has no prime factor", i + 1)));
        }
        for (i, a) in self.ks.iter().enumerate() {
            if self.ks[i + 1..].contains(a) {
                return Err(fail(format!("coefficient {a} is repeated")));
            }
        }
        let factored: Vec<BTreeMap<u64, u32>> = self.ks.iter().map(|&k| factorize(k)).collect();
        // prime -> (exponent, support bitmask)
        let mut primes: BTreeMap<u64, (u32, u64)> = BTreeMap::new();
        for (i, f) in factored.iter().enumerate() {
            for (&p, &e) in f {
                let entry = primes.entry(p).or_insert((e, 0));
                if entry.0 != e {
                    return Err(fail(format!(
                        "prime {p} occurs with exponents {} and {e}",
                        entry.0
                    )));
                }
                entry.1 |= 1 << i;
            }
        }
        let full = (1u64 << self.d()) - 1;
        // support bitmask -> (base, smallest prime)
        let mut groups: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
        for (&p, &(e, mask)) in &primes {
            if mask == full {
                return Err(fail(format!("gcd = {} > 1", self.gcd())));
            }
            let g = groups.entry(mask).or_insert((1, p));
            g.0 *= p.pow(e);
        }
        let mut ordered: Vec<(u64, u64, u64)> = groups
            .into_iter()
            .map(|(mask, (q, smallest))| (smallest, q, mask))
            .collect();
        ordered.sort_unstable();
        let qs: Vec<u64> = ordered.iter().map(|&(_, q, _)| q).collect();
        let rows = (0..self.d())
            .map(|i| {
                ExpVector(
                    ordered
                        .iter()
                        .map(|&(_, _, mask)| u32::from(mask >> i & 1 == 1))
                        .collect(),
                )
            })
            .collect();
        TheoremForm::new(qs, rows).map_err(|e| fail(e.to_string()))
    }
}

impl TryFrom<Vec<u64>> for CoefficientTuple {
    type Error = Error;

    fn try_from(ks: Vec<u64>) -> Result<Self> {
        Self::new(ks)
    }
}

impl From<CoefficientTuple> for Vec<u64> {
    fn from(t: CoefficientTuple) -> Self {
        t.ks
    }
}

impl fmt::Display for CoefficientTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, k) in self.ks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str(")")
    }
}

fn factorize(mut n: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

/// Co-prime bases and the 0/1 exponent rows `b_1..b_d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremForm {
    qs: Vec<u64>,
    rows: Vec<ExpVector>,
}

impl TheoremForm {
    pub fn new(qs: Vec<u64>, rows: Vec<ExpVector>) -> Result<Self> {
        crate::cyclotomic::validate_bases(&qs)?;
        let m = qs.len();
        if rows.len() < 2 {
            return Err(Error::InvalidTuple("need at least two rows".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::LengthMismatch(m, row.len()));
            }
            if row.entries().iter().any(|&b| b > 1) {
                return Err(Error::InvalidTuple(format!("row {row} has an entry above 1")));
            }
            if row.is_zero() {
                return Err(Error::InvalidTuple(format!("row {} is zero", i + 1)));
            }
            if rows[i + 1..].contains(row) {
                return Err(Error::InvalidTuple(format!("row {row} is repeated")));
            }
        }
        for (axis, q) in qs.iter().enumerate() {
            if rows.iter().all(|r| r.entries()[axis] == 0) {
                return Err(Error::InvalidTuple(format!(
                    "base {q} divides no coefficient"
                )));
            }
            if rows.iter().all(|r| r.entries()[axis] == 1) {
                return Err(Error::InvalidTuple(format!(
                    "base {q} divides every coefficient"
                )));
            }
        }
        Ok(Self { qs, rows })
    }

    pub fn qs(&self) -> &[u64] {
        &self.qs
    }

    pub fn rows(&self) -> &[ExpVector] {
        &self.rows
    }

    pub fn m(&self) -> usize {
        self.qs.len()
    }

    pub fn d(&self) -> usize {
        self.rows.len()
    }

    pub fn ks(&self) -> CoefficientTuple {
        let ks = self
            .rows
            .iter()
            .map(|row| {
                self.qs
                    .iter()
                    .zip(row.entries())
                    .filter(|(_, &b)| b == 1)
                    .map(|(&q, _)| q)
                    .product()
            })
            .collect();
        CoefficientTuple::new(ks).expect("theorem form has at least two rows")
    }
}

/// A finite decided initial segment of `A`: membership of every integer in
/// `[0, decided_bound]` is fixed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSetPrefix")]
pub struct SetPrefix {
    members: Vec<u64>,
    decided_bound: u64,
}

#[derive(Deserialize)]
struct RawSetPrefix {
    members: Vec<u64>,
    decided_bound: u64,
}

impl TryFrom<RawSetPrefix> for SetPrefix {
    type Error = Error;

    fn try_from(raw: RawSetPrefix) -> Result<Self> {
        Self::new(raw.members, raw.decided_bound)
    }
}

impl SetPrefix {
    /// `members` must be strictly increasing and at most `decided_bound`.
    pub fn new(members: Vec<u64>, decided_bound: u64) -> Result<Self> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPrefix("members must be strictly increasing".into()));
        }
        if members.last().is_some_and(|&a| a > decided_bound) {
            return Err(Error::InvalidPrefix(format!(
                "member {} exceeds decided bound {decided_bound}",
                members.last().unwrap()
            )));
        }
        Ok(Self {
            members,
            decided_bound,
        })
    }

    /// The prefix `{x ≤ bound : keep(x)}`.
    pub fn from_predicate(bound: u64, keep: impl Fn(u64) -> bool) -> Self {
        Self {
            members: (0..=bound).filter(|&x| keep(x)).collect(),
            decided_bound: bound,
        }
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn decided_bound(&self) -> u64 {
        self.decided_bound
    }

    pub fn contains(&self, x: u64) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Largest `n` at which constancy is checked: `M · k_min`.
    pub fn horizon(&self, ks: &CoefficientTuple) -> u64 {
        self.decided_bound * ks.k_min()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepValue {
    #[serde(serialize_with = "ser_biguint")]
    pub count: BigUint,
    pub determined: bool,
}

fn ser_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// `r_A(n)` restricted to the prefix members, by direct tuple enumeration.
pub fn rep_count(a: &SetPrefix, ks: &CoefficientTuple, n: u64) -> RepValue {
    fn go(members: &[u64], ks: &[u64], rest: u64) -> u64 {
        match ks {
            [] => u64::from(rest == 0),
            [k] => u64::from(rest.is_multiple_of(*k) && members.binary_search(&(rest / k)).is_ok()),
            [k, tail @ ..] => members
                .iter()
                .take_while(|&&x| x * k <= rest)
                .map(|&x| go(members, tail, rest - x * k))
                .sum(),
        }
    }
    RepValue {
        count: BigUint::from(go(&a.members, &ks.ks, n)),
        determined: ks.is_determined(n, a.decided_bound),
    }
}

fn product_series(a: &SetPrefix, ks: &CoefficientTuple, order: usize) -> Result<TruncatedSeries> {
    let f = TruncatedSeries::indicator(&a.members, order);
    let mut acc = f.substitute_power(ks.ks[0] as usize)?;
    for &k in &ks.ks[1..] {
        acc = acc.mul(&f.substitute_power(k as usize)?);
    }
    Ok(acc)
}

/// `rep_count` for every `n` in `0..=upto`, via the generating-function product
/// `f(z^{k_1}) ⋯ f(z^{k_d})`.
pub fn rep_profile(a: &SetPrefix, ks: &CoefficientTuple, upto: u64) -> Vec<RepValue> {
    let series = product_series(a, ks, upto as usize).expect("coefficients are positive");
    series
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| RepValue {
            count: c.to_biguint().expect("indicator products are nonnegative"),
            determined: ks.is_determined(n as u64, a.decided_bound),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConstancyVerdict {
    HoldsOnHorizon { from: u64, to: u64 },
    ViolatedAt {
        n: u64,
        #[serde(serialize_with = "ser_biguint")]
        count: BigUint,
    },
    HorizonEmpty,
}

impl ConstancyVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, Self::HoldsOnHorizon { .. })
    }
}

/// Checks `r_A(n) = c` for `n0 ≤ n ≤ M·k_min`; reports the first violation.
pub fn constancy_check(a: &SetPrefix, ks: &CoefficientTuple, n0: u64, c: u64) -> ConstancyVerdict {
    let horizon = a.horizon(ks);
    if horizon < n0 {
        return ConstancyVerdict::HorizonEmpty;
    }
    let c = BigUint::from(c);
    let profile = rep_profile(a, ks, horizon);
    for (n, v) in profile.into_iter().enumerate().skip(n0 as usize) {
        debug_assert!(v.determined);
        if v.count != c {
            return ConstancyVerdict::ViolatedAt {
                n: n as u64,
                count: v.count,
            };
        }
    }
    ConstancyVerdict::HoldsOnHorizon {
        from: n0,
        to: horizon,
    }
}

/// Truncated coefficients of `P(z) = (1 − z) · f(z^{k_1}) ⋯ f(z^{k_d})`.
///
/// Requires `upto ≤ M·k_min` so that every returned coefficient is fixed by
/// the prefix.
pub fn reconstruct_p(a: &SetPrefix, ks: &CoefficientTuple, upto: u64) -> Result<TruncatedSeries> {
    let horizon = a.horizon(ks);
    if upto > horizon {
        return Err(Error::BeyondHorizon {
            requested: upto,
            horizon,
        });
    }
    let order = upto as usize;
    let one_minus_z = TruncatedSeries::from_poly(&IntPolynomial::from_i64s(&[1, -1]), order);
    Ok(product_series(a, ks, order)?.mul(&one_minus_z))
}

/// Coefficients of `P` past `n0` all vanish and the sum through `n0` is `c`.
pub fn p_certifies_constant(p: &TruncatedSeries, n0: usize, c: u64) -> bool {
    let tail_zero = p.coeffs().iter().skip(n0 + 1).all(Zero::is_zero);
    tail_zero && p.coeff_sum(n0.min(p.order())).is_ok_and(|s| s == BigInt::from(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(ks: &[u64]) -> CoefficientTuple {
        CoefficientTuple::new(ks.to_vec()).unwrap()
    }

    fn set(members: &[u64], m: u64) -> SetPrefix {
        SetPrefix::new(members.to_vec(), m).unwrap()
    }

    fn counts(p: &[RepValue]) -> Vec<u64> {
        p.iter().map(|v| u64::try_from(&v.count).unwrap()).collect()
    }

    #[test]
    fn rep_count_examples() {
        let v = rep_count(&set(&[0, 1, 2], 2), &k(&[2, 3]), 5);
        assert_eq!(v, RepValue { count: 1u32.into(), determined: true });
        for ks in [&[1, 1][..], &[2, 3], &[1, 2, 6]] {
            let v = rep_count(&set(&[0, 3, 9], 9), &k(ks), 0);
            assert_eq!(v, RepValue { count: 1u32.into(), determined: true });
        }
        for n in 1..20 {
            let v = rep_count(&set(&[], 0), &k(&[2, 3]), n);
            assert_eq!(v.count, BigUint::zero());
        }
    }

    #[test]
    fn empty_prefix_determinedness() {
        // With M = 0 only n < k_min is determined.
        let v = rep_count(&set(&[], 0), &k(&[2, 3]), 1);
        assert!(v.determined);
        assert!(!rep_count(&set(&[], 0), &k(&[2, 3]), 2).determined);
    }

    #[test]
    fn rep_profile_examples() {
        let p = rep_profile(&set(&[0, 1], 1), &k(&[1, 2]), 3);
        assert_eq!(counts(&p), [1, 1, 1, 1]);
        // floor(n / 1) ≤ 1 only for n ≤ 1.
        assert_eq!(p.iter().map(|v| v.determined).collect::<Vec<_>>(), [true, true, false, false]);
        assert_eq!(counts(&rep_profile(&set(&[0], 0), &k(&[1, 1]), 2)), [1, 0, 0]);
        assert_eq!(counts(&rep_profile(&set(&[0, 1], 1), &k(&[1, 1]), 2)), [1, 2, 1]);
    }

    #[test]
    fn constancy_examples() {
        assert_eq!(
            constancy_check(&set(&[0, 1, 4, 5], 5), &k(&[1, 2]), 0, 1),
            ConstancyVerdict::HoldsOnHorizon { from: 0, to: 5 }
        );
        let interval = SetPrefix::from_predicate(6, |_| true);
        assert_eq!(
            constancy_check(&interval, &k(&[1, 1]), 1, 2),
            ConstancyVerdict::ViolatedAt { n: 2, count: 3u32.into() }
        );
        assert_eq!(
            constancy_check(&set(&[0, 1], 3), &k(&[2, 5]), 7, 1),
            ConstancyVerdict::HorizonEmpty
        );
    }

    #[test]
    fn reconstruct_examples() {
        let moser = SetPrefix::from_predicate(21, |a| {
            let mut x = a;
            while x > 0 {
                if x % 4 > 1 {
                    return false;
                }
                x /= 4;
            }
            true
        });
        let p = reconstruct_p(&moser, &k(&[1, 2]), 21).unwrap();
        assert_eq!(p, TruncatedSeries::one(21));
        assert!(p_certifies_constant(&p, 0, 1));

        assert_eq!(reconstruct_p(&set(&[0], 0), &k(&[1, 1]), 0).unwrap(), TruncatedSeries::one(0));

        let p = reconstruct_p(&set(&[0, 1, 2], 2), &k(&[2, 3]), 4).unwrap();
        let expect: Vec<BigInt> = [1, -1, 1, 0, 0].into_iter().map(BigInt::from).collect();
        assert_eq!(p.coeffs(), &expect[..]);
        assert!(!p.is_nonnegative());

        assert_eq!(
            reconstruct_p(&set(&[0, 1, 2], 2), &k(&[2, 3]), 5),
            Err(Error::BeyondHorizon { requested: 5, horizon: 4 })
        );
    }

    #[test]
    fn theorem_form_decomposition() {
        let f = k(&[2, 3]).theorem_form().unwrap();
        assert_eq!(f.qs(), [2, 3]);
        assert_eq!(f.rows(), [ExpVector::from([1, 0]), ExpVector::from([0, 1])]);

        let f = k(&[2, 3, 6]).theorem_form().unwrap();
        assert_eq!(f.qs(), [2, 3]);
        assert_eq!(f.rows()[2], ExpVector::from([1, 1]));

        let f = k(&[12, 20, 15, 60]).theorem_form().unwrap();
        assert_eq!(f.qs(), [4, 3, 5]);
        assert_eq!(
            f.rows(),
            [[1, 1, 0], [1, 0, 1], [0, 1, 1], [1, 1, 1]].map(ExpVector::from)
        );
        assert_eq!(f.ks(), k(&[12, 20, 15, 60]));

        // primes 2 and 3 share a support pattern and merge into 6
        let f = k(&[6, 5]).theorem_form().unwrap();
        assert_eq!(f.qs(), [6, 5]);
    }

    #[test]
    fn theorem_form_rejections() {
        for (ks, needle) in [
            (&[2, 4][..], "exponents"),
            (&[2, 2][..], "repeated"),
            (&[6, 10][..], "gcd"),
            (&[1, 2][..], "k_1 = 1"),
            (&[2, 3, 2][..], "repeated"),
        ] {
            let err = k(ks).theorem_form().unwrap_err();
            let msg = err.to_string();
            assert!(msg.contains("not of theorem form"), "{msg}");
            assert!(msg.contains(needle), "{msg}");
        }
    }

    #[test]
    fn tuple_and_prefix_validation() {
        assert!(CoefficientTuple::new(vec![3]).is_err());
        assert!(CoefficientTuple::new(vec![0, 3]).is_err());
        assert!(SetPrefix::new(vec![0, 2, 2], 3).is_err());
        assert!(SetPrefix::new(vec![0, 5], 3).is_err());
        let parsed: SetPrefix = serde_json::from_str(r#"{"members":[0,1,4],"decided_bound":6}"#).unwrap();
        assert_eq!(parsed, set(&[0, 1, 4], 6));
        assert!(serde_json::from_str::<SetPrefix>(r#"{"members":[4,1],"decided_bound":6}"#).is_err());
    }
}
