//! Exponent vectors in `N_0^m`, truncated subtraction and the sorted-lex order.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExpVector(pub Vec<u32>);

impl ExpVector {
    pub fn zero(m: usize) -> Self {
        Self(vec![0; m])
    }

    /// The vector with a single 1 at `axis`.
    pub fn unit(m: usize, axis: usize) -> Self {
        let mut v = vec![0; m];
        v[axis] = 1;
        Self(v)
    }

    pub fn splat(m: usize, value: u32) -> Self {
        Self(vec![value; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    /// Componentwise `max(a - b, 0)`.
    pub fn ominus(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(self.ominus_unchecked(other))
    }

    pub(crate) fn ominus_unchecked(&self, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a.saturating_sub(b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    /// `self ≤ bound` componentwise, i.e. `self` lies in the box `[0, bound]`.
    pub fn within(&self, bound: &Self) -> bool {
        self.0.len() == bound.0.len() && self.0.iter().zip(&bound.0).all(|(a, b)| a <= b)
    }

    /// Drops coordinate `axis`.
    pub fn without(&self, axis: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(axis);
        Self(v)
    }

    /// Inserts `value` so that it ends up at coordinate `axis`.
    pub fn with_inserted(&self, axis: usize, value: u32) -> Self {
        let mut v = self.0.clone();
        v.insert(axis, value);
        Self(v)
    }

    fn sorted(&self) -> Vec<u32> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v
    }

    /// The `≺` order: sorted versions compared lexicographically, ties broken
    /// by the unsorted vectors.
    pub fn precedence_cmp(&self, other: &Self) -> Ordering {
        self.sorted()
            .cmp(&other.sorted())
            .then_with(|| self.0.cmp(&other.0))
    }

    pub fn precedes(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.precedence_cmp(other) == Ordering::Less)
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.0.len() == other.0.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch(self.0.len(), other.0.len()))
        }
    }
}

impl From<Vec<u32>> for ExpVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[u32; N]> for ExpVector {
    fn from(v: [u32; N]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Display for ExpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// All vectors in the box `[0, bound]`, in lexicographic order.
pub fn box_points(bound: &ExpVector) -> Vec<ExpVector> {
    let mut out = vec![ExpVector(Vec::with_capacity(bound.len()))];
    for &b in bound.entries() {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=b).map(move |e| {
                    let mut q = p.0.clone();
                    q.push(e);
                    ExpVector(q)
                })
            })
            .collect();
    }
    out
}

/// `a ⊖ b`.
pub fn ominus(a: &ExpVector, b: &ExpVector) -> Result<ExpVector> {
    a.ominus(b)
}

/// `a ≺ b`.
pub fn precede(a: &ExpVector, b: &ExpVector) -> Result<bool> {
    a.precedes(b)
}
