//! Moser's set and its generalization to `(1, k, k², …, k^{d−1})`.
//!
//! A nonnegative integer belongs to the set when every digit of its base
//! `k^d` expansion lies in `{0, …, k−1}`. Writing `n` in base `k` and dealing
//! its digits round-robin to `d` coordinates gives the unique representation
//! `n = a_1 + k a_2 + … + k^{d−1} a_d`.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::repfn::{constancy_check, CoefficientTuple, ConstancyVerdict, SetPrefix};

fn check_params(k: u64, d: u32) -> Result<u64> {
    if k < 2 || d < 2 {
        return Err(Error::InvalidTuple(format!("need k ≥ 2 and d ≥ 2, got k={k}, d={d}")));
    }
    k.checked_pow(d)
        .ok_or_else(|| Error::InvalidTuple(format!("k^d overflows for k={k}, d={d}")))
}

pub fn is_moser_member(a: u64, k: u64, d: u32) -> bool {
    let base = k.pow(d);
    let mut x = a;
    while x > 0 {
        if x % base >= k {
            return false;
        }
        x /= base;
    }
    true
}

/// Members up to `upto`, decided through `upto`.
pub fn moser_set(k: u64, d: u32, upto: u64) -> Result<SetPrefix> {
    check_params(k, d)?;
    Ok(SetPrefix::from_predicate(upto, |a| is_moser_member(a, k, d)))
}

/// `(1, k, …, k^{d−1})`.
pub fn geometric_tuple(k: u64, d: u32) -> Result<CoefficientTuple> {
    check_params(k, d)?;
    CoefficientTuple::new((0..d).map(|i| k.pow(i)).collect())
}

/// The unique `(a_1..a_d)` of set members with `Σ k^{i−1} a_i = n`.
pub fn decompose_moser(n: u64, k: u64, d: u32) -> Result<Vec<u64>> {
    check_params(k, d)?;
    let base = k.pow(d);
    let d = d as usize;
    let mut parts = vec![0u64; d];
    let mut x = n;
    let mut pos = 0usize;
    while x > 0 {
        parts[pos % d] += (x % k) * base.pow((pos / d) as u32);
        x /= k;
        pos += 1;
    }
    Ok(parts)
}

/// `constancy_check(moser_set(k, d, upto), (1, k, …), 0, 1)`.
pub fn verify_moser(k: u64, d: u32, upto: u64) -> Result<ConstancyVerdict> {
    let set = moser_set(k, d, upto)?;
    Ok(constancy_check(&set, &geometric_tuple(k, d)?, 0, 1))
}

/// [`verify_moser`] over many parameter triples.
pub fn verify_moser_batch(params: &[(u64, u32, u64)], exec: Exec) -> Vec<Result<ConstancyVerdict>> {
    exec.map(params, |&(k, d, upto)| verify_moser(k, d, upto))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repfn::rep_count;

    #[test]
    fn moser_examples() {
        assert_eq!(moser_set(2, 2, 21).unwrap().members(), [0, 1, 4, 5, 16, 17, 20, 21]);
        assert_eq!(moser_set(2, 2, 0).unwrap().members(), [0]);
        let s = moser_set(3, 2, 8).unwrap();
        assert_eq!(s.members(), [0, 1, 2]);
        assert!(constancy_check(&s, &geometric_tuple(3, 2).unwrap(), 0, 1).holds());
        assert!(moser_set(1, 2, 5).is_err());
        assert!(moser_set(2, 1, 5).is_err());
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_moser(7, 2, 2).unwrap(), [5, 1]);
        assert_eq!(decompose_moser(0, 3, 4).unwrap(), [0, 0, 0, 0]);
        for (k, d) in [(2, 2), (3, 3), (5, 4)] {
            let mut expect = vec![0; d as usize];
            expect[0] = k - 1;
            assert_eq!(decompose_moser(k - 1, k, d).unwrap(), expect);
        }
    }

    #[test]
    fn decomposition_recomposes_into_members() {
        for (k, d) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (4, 3)] {
            for n in 0..=10_000u64 {
                let parts = decompose_moser(n, k, d).unwrap();
                let sum: u64 = parts.iter().enumerate().map(|(i, a)| k.pow(i as u32) * a).sum();
                assert_eq!(sum, n, "k={k} d={d} n={n}");
                assert!(parts.iter().all(|&a| is_moser_member(a, k, d)));
            }
        }
    }

    #[test]
    fn representation_is_unique_by_enumeration() {
        let set = moser_set(2, 3, 200).unwrap();
        let ks = geometric_tuple(2, 3).unwrap();
        for n in 0..=200 {
            assert_eq!(rep_count(&set, &ks, n).count, 1u32.into(), "n={n}");
        }
    }

    #[test]
    fn constant_on_horizon_for_small_parameters() {
        let params: Vec<_> = (2..=4u64)
            .flat_map(|k| (2..=3u32).map(move |d| (k, d, 5000)))
            .collect();
        for v in verify_moser_batch(&params, Exec::Parallel) {
            assert!(v.unwrap().holds());
        }
    }

    #[test]
    fn counting_density() {
        for (k, d) in [(2u64, 2u32), (2, 3), (3, 2), (4, 2)] {
            for t in 0..=3u32 {
                let upto = k.pow(d * t) - 1;
                assert_eq!(moser_set(k, d, upto).unwrap().len() as u64, k.pow(t), "k={k} d={d} t={t}");
            }
        }
    }
}
