//! Exact integer polynomials and truncated power series.
//!
//! [`IntPolynomial`] is an exact element of `Z[z]` kept in canonical form
//! (no trailing zero coefficients, the zero polynomial is the empty
//! sequence). [`TruncatedSeries`] carries the coefficients of a power series
//! for exponents `0..=N`; anything beyond `N` is unknown, and asking for it
//! is an error rather than an implicit zero.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Polynomial with arbitrary-precision integer coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64s(&[1])
    }

    /// `coeff · z^exp`.
    pub fn monomial(coeff: BigInt, exp: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); exp + 1];
        coeffs[exp] = coeff;
        Self::new(coeffs)
    }

    /// `z^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[0] = BigInt::from(-1);
        coeffs[n] += 1;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, exp: usize) -> BigInt {
        self.coeffs.get(exp).cloned().unwrap_or_default()
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Exact schoolbook product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Division in `Z[z]`.
    ///
    /// Returns the quotient together with a flag telling whether the division
    /// was exact. When the flag is false the quotient carries no meaning.
    pub fn div_exact(&self, den: &Self) -> Result<(Self, bool)> {
        let den_deg = den.degree().ok_or(Error::ZeroDivisor)?;
        let Some(num_deg) = self.degree() else {
            return Ok((Self::zero(), true));
        };
        if num_deg < den_deg {
            return Ok((Self::zero(), false));
        }
        let lead = &den.coeffs[den_deg];
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); num_deg - den_deg + 1];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + den_deg];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return Ok((Self::zero(), false));
            }
            for (j, dc) in den.coeffs.iter().enumerate() {
                if !dc.is_zero() {
                    rem[i + j] -= &q * dc;
                }
            }
            quot[i] = q;
        }
        let exact = rem.iter().all(Zero::is_zero);
        Ok((Self::new(quot), exact))
    }

    /// `p(z^k)`.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 1, "substitution power must be positive");
        let Some(deg) = self.degree() else {
            return Self::zero();
        };
        let mut out = vec![BigInt::zero(); deg * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = c.clone();
        }
        Self::new(out)
    }

    pub fn has_coeff_outside_unit_range(&self) -> bool {
        self.coeffs.iter().any(|c| c.abs() > BigInt::one())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: Self) -> IntPolynomial {
        IntPolynomial::mul(self, rhs)
    }
}

impl fmt::Display for IntPolynomial {
    /// Bare JSON integer array, e.g. `[1,-1,1]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        decimal::serialize_vec(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        decimal::deserialize_vec(d).map(Self::new)
    }
}

/// Power series known exactly for exponents `0..=order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    /// `coeffs.len()` must equal `order + 1`.
    pub fn new(coeffs: Vec<BigInt>, order: usize) -> Result<Self> {
        if coeffs.len() != order + 1 {
            return Err(Error::Parse(format!(
                "series of order {order} needs {} coefficients, got {}",
                order + 1,
                coeffs.len()
            )));
        }
        Ok(Self { coeffs })
    }

    /// Lifts an exact polynomial; terms above `order` are dropped.
    pub fn from_poly(p: &IntPolynomial, order: usize) -> Self {
        let coeffs = (0..=order).map(|e| p.coeff(e)).collect();
        Self { coeffs }
    }

    pub fn one(order: usize) -> Self {
        Self::from_poly(&IntPolynomial::one(), order)
    }

    /// Indicator series of a set of exponents: coefficient 1 at each member.
    pub fn indicator(members: &[u64], order: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); order + 1];
        for &a in members {
            if let Some(c) = usize::try_from(a).ok().and_then(|a| coeffs.get_mut(a)) {
                *c = BigInt::one();
            }
        }
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, exp: usize) -> Result<&BigInt> {
        self.coeffs.get(exp).ok_or(Error::BeyondTruncation {
            exponent: exp,
            order: self.order(),
        })
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    /// Sum of the coefficients at exponents `0..=upto`.
    pub fn coeff_sum(&self, upto: usize) -> Result<BigInt> {
        self.coeff(upto)?;
        Ok(self.coeffs[..=upto].iter().sum())
    }

    /// Convolution truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![BigInt::zero(); order + 1];
        // Zero terms dominate indicator series, so skip them on both sides.
        let rhs: Vec<(usize, &BigInt)> = other.coeffs[..=order]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        for (i, a) in self.coeffs[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(j, b) in &rhs {
                if i + j > order {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// `a(z) ↦ a(z^k)`, keeping the truncation order.
    pub fn substitute_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parse("substitution power must be positive".into()));
        }
        let order = self.order();
        let mut out = vec![BigInt::zero(); order + 1];
        for (e, c) in self.coeffs[..=order / k].iter().enumerate() {
            out[e * k] = c.clone();
        }
        Ok(Self { coeffs: out })
    }
}

/// `a·b` for exact polynomials.
pub fn poly_mul(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    a.mul(b)
}

/// Quotient plus exactness flag; errors on a zero divisor.
pub fn poly_divexact(num: &IntPolynomial, den: &IntPolynomial) -> Result<(IntPolynomial, bool)> {
    num.div_exact(den)
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    a.mul(b)
}

pub fn series_substitute_power(a: &TruncatedSeries, k: usize) -> Result<TruncatedSeries> {
    a.substitute_power(k)
}

/// Decimal-string (de)serialization for big integers.
pub(crate) mod decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Str(String),
        Int(i64),
        UInt(u64),
    }

    fn parse<E: serde::de::Error>(r: Repr) -> Result<BigInt, E> {
        match r {
            Repr::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| E::custom(format!("not a decimal integer: {s:?}"))),
            Repr::Int(i) => Ok(BigInt::from(i)),
            Repr::UInt(u) => Ok(BigInt::from(u)),
        }
    }

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        parse(Repr::deserialize(d)?)
    }

    pub fn serialize_vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|c| c.to_string()))
    }

    pub fn deserialize_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(parse::<D::Error>)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    fn s(c: &[i64], order: usize) -> TruncatedSeries {
        TruncatedSeries::new(c.iter().map(|&x| BigInt::from(x)).collect(), order).unwrap()
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p(&[-1, 1]).mul(&p(&[1, 1])), p(&[-1, 0, 1]));
        assert_eq!(p(&[3, 0, 7]).mul(&IntPolynomial::one()), p(&[3, 0, 7]));
        assert_eq!(p(&[1, 1, 1]).mul(&p(&[-1, 1])), p(&[-1, 0, 0, 1]));
        assert!(p(&[1, 2]).mul(&IntPolynomial::zero()).is_zero());
    }

    #[test]
    fn canonical_form_drops_trailing_zeros() {
        let q = p(&[1, 2, 0, 0]);
        assert_eq!(q.coeffs().len(), 2);
        assert_eq!(q.degree(), Some(1));
        assert_eq!(p(&[0, 0]).degree(), None);
    }

    #[test]
    fn divexact_examples() {
        assert_eq!(p(&[-1, 0, 0, 1]).div_exact(&p(&[-1, 1])).unwrap(), (p(&[1, 1, 1]), true));
        let (_, exact) = p(&[1, 0, 1]).div_exact(&p(&[1, 1])).unwrap();
        assert!(!exact);
        assert_eq!(p(&[4, 5, 6]).div_exact(&IntPolynomial::one()).unwrap(), (p(&[4, 5, 6]), true));
        assert_eq!(p(&[1]).div_exact(&IntPolynomial::zero()), Err(Error::ZeroDivisor));
        // Non-unit leading coefficient: 2z+2 = 2(z+1), but z+1 / 2z+2 is not in Z[z].
        assert_eq!(p(&[2, 2]).div_exact(&p(&[1, 1])).unwrap(), (p(&[2]), true));
        assert!(!p(&[1, 1]).div_exact(&p(&[2, 2])).unwrap().1);
    }

    #[test]
    fn series_mul_examples() {
        assert_eq!(s(&[1, 1, 0, 0], 3).mul(&s(&[1, 1, 0, 0], 3)), s(&[1, 2, 1, 0], 3));
        let a = s(&[2, 0, 5, 1], 3);
        assert_eq!(a.mul(&TruncatedSeries::one(3)), a);
        let geometric = s(&[1, 1, 1, 1], 3);
        let one_minus_z = TruncatedSeries::from_poly(&p(&[1, -1]), 3);
        assert_eq!(geometric.mul(&one_minus_z), s(&[1, 0, 0, 0], 3));
    }

    #[test]
    fn series_mul_takes_min_order() {
        let prod = s(&[1, 1, 1, 1, 1], 4).mul(&s(&[1, 1], 1));
        assert_eq!(prod, s(&[1, 2], 1));
    }

    #[test]
    fn substitute_power_examples() {
        assert_eq!(s(&[1, 1, 0, 0, 0], 4).substitute_power(2).unwrap(), s(&[1, 0, 1, 0, 0], 4));
        let a = s(&[3, 1, 4, 1], 3);
        assert_eq!(a.substitute_power(1).unwrap(), a);
        assert_eq!(
            s(&[1, 1, 1, 0, 0, 0, 0], 6).substitute_power(3).unwrap(),
            s(&[1, 0, 0, 1, 0, 0, 1], 6)
        );
        assert!(a.substitute_power(0).is_err());
    }

    #[test]
    fn reading_beyond_truncation_is_an_error() {
        let a = s(&[1, 1], 1);
        assert_eq!(
            a.coeff(2),
            Err(Error::BeyondTruncation { exponent: 2, order: 1 })
        );
        assert!(a.coeff_sum(5).is_err());
        assert!(TruncatedSeries::new(vec![BigInt::one()], 3).is_err());
    }

    #[test]
    fn json_uses_decimal_strings() {
        let q = p(&[1, -1, 1]);
        assert_eq!(serde_json::to_string(&q).unwrap(), r#"["1","-1","1"]"#);
        let big: IntPolynomial = serde_json::from_str(r#"["123456789012345678901234567890", 2, -3]"#).unwrap();
        assert_eq!(big.coeff(0).to_string(), "123456789012345678901234567890");
        assert_eq!(big.coeff(2), BigInt::from(-3));
        assert_eq!(q.to_string(), "[1,-1,1]");
    }

    fn small_poly() -> impl Strategy<Value = IntPolynomial> {
        prop::collection::vec(-5i64..=5, 0..6).prop_map(|c| p(&c))
    }

    proptest! {
        #[test]
        fn mul_commutes_and_associates(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn degree_is_additive(a in small_poly(), b in small_poly()) {
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                prop_assert_eq!(a.mul(&b).degree(), Some(da + db));
            }
        }

        #[test]
        fn divexact_inverts_mul(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!(a.mul(&b).div_exact(&b).unwrap(), (a, true));
        }

        #[test]
        fn series_mul_agrees_with_poly_mul(a in small_poly(), b in small_poly(), order in 0usize..12) {
            let lhs = TruncatedSeries::from_poly(&a, order).mul(&TruncatedSeries::from_poly(&b, order));
            prop_assert_eq!(lhs, TruncatedSeries::from_poly(&a.mul(&b), order));
        }

        #[test]
        fn substitution_preserves_coefficient_sum(c in prop::collection::vec(0i64..4, 1..15), k in 1usize..5) {
            let order = c.len() - 1;
            let a = s(&c, order);
            let sub = a.substitute_power(k).unwrap();
            let src = order / k;
            prop_assert_eq!(sub.coeff_sum(src * k).unwrap(), a.coeff_sum(src).unwrap());
        }
    }
}
