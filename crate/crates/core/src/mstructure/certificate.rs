//! Non-constancy certificates and their independent verifier.
//!
//! A certificate lists homogeneous relations `Σ_i r_{j⊖b_i} = 0` (each `j`
//! outside the support box `[0, t]` of the cyclotomic multiplicities) with
//! rational weights whose sum is exactly `r_target = 0`. Since every
//! multiplicity is `−1 mod d`, that is impossible for `d ≥ 2`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::elim::Eliminator;
use super::structure::{grow_working_box, initial_working_box, WORKING_BOX_CAP};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::expvec::ExpVector;
use crate::polyseries::decimal;
use crate::repfn::CoefficientTuple;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateStep {
    pub j: Vec<u32>,
    #[serde(with = "decimal")]
    pub coeff_num: BigInt,
    #[serde(with = "decimal")]
    pub coeff_den: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub ks: Vec<u64>,
    pub q: Vec<u64>,
    pub b_matrix: Vec<Vec<u32>>,
    pub t: Vec<u32>,
    pub working_box: Vec<u32>,
    pub steps: Vec<CertificateStep>,
    pub target: Vec<u32>,
    pub d: usize,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Certificate for the first derivable target, trying nonzero indices of the
/// working box by increasing degree.
pub fn certify_nonconstant(ks: &CoefficientTuple, t: &ExpVector) -> Result<Certificate> {
    certify_with(ks, t, None)
}

/// Certificate deriving `r_target = 0` specifically.
pub fn certify_target(ks: &CoefficientTuple, t: &ExpVector, target: &ExpVector) -> Result<Certificate> {
    if target.len() != t.len() {
        return Err(Error::LengthMismatch(t.len(), target.len()));
    }
    certify_with(ks, t, Some(target))
}

fn certify_with(ks: &CoefficientTuple, t: &ExpVector, target: Option<&ExpVector>) -> Result<Certificate> {
    let form = ks.theorem_form()?;
    if t.len() != form.m() {
        return Err(Error::LengthMismatch(form.m(), t.len()));
    }
    let rows = form.rows();
    let mut w = initial_working_box(t, target);
    loop {
        let elim = Eliminator::new(rows, t, &w);
        let found = match target {
            Some(tg) => elim.derive(tg).map(|l| (tg.clone(), l)),
            None => elim
                .candidate_targets()
                .into_iter()
                .filter(|c| !c.is_zero())
                .find_map(|c| elim.derive(&c).map(|l| (c, l))),
        };
        if let Some((target, lambda)) = found {
            return Ok(Certificate {
                ks: ks.ks().to_vec(),
                q: form.qs().to_vec(),
                b_matrix: rows.iter().map(|r| r.0.clone()).collect(),
                t: t.0.clone(),
                working_box: w.0,
                steps: lambda
                    .into_iter()
                    .map(|(j, c)| CertificateStep {
                        j: j.0,
                        coeff_num: c.numer().clone(),
                        coeff_den: c.denom().clone(),
                    })
                    .collect(),
                target: target.0,
                d: form.d(),
            });
        }
        w = grow_working_box(&w).ok_or(Error::BoxBudgetExhausted {
            cap: WORKING_BOX_CAP,
        })?;
    }
}

pub fn verify_certificate(c: &Certificate) -> bool {
    check_certificate(c).is_ok()
}

/// Like [`verify_certificate`], naming the first failed check.
///
/// Uses only plain vector arithmetic so that it shares no code path with
/// the generator.
pub fn check_certificate(c: &Certificate) -> std::result::Result<(), String> {
    let m = c.q.len();
    let d = c.ks.len();
    if c.d != d || c.b_matrix.len() != d {
        return Err(format!("d = {} disagrees with {} coefficients", c.d, d));
    }
    if d < 2 {
        return Err("0 ≡ −1 mod d needs d ≥ 2 to fail".into());
    }
    for (a, &qa) in c.q.iter().enumerate() {
        if qa < 2 {
            return Err(format!("base {qa} below 2"));
        }
        if c.q[a + 1..].iter().any(|&qb| qa.gcd(&qb) != 1) {
            return Err(format!("base {qa} shares a factor with a later base"));
        }
    }
    for (i, row) in c.b_matrix.iter().enumerate() {
        if row.len() != m || row.iter().any(|&b| b > 1) || row.iter().all(|&b| b == 0) {
            return Err(format!("row {} is not a nonzero 0/1 vector of length {m}", i + 1));
        }
        if c.b_matrix[i + 1..].contains(row) {
            return Err(format!("row {} is repeated", i + 1));
        }
        let k = row
            .iter()
            .zip(&c.q)
            .filter(|(&b, _)| b == 1)
            .try_fold(1u64, |acc, (_, &q)| acc.checked_mul(q));
        if k != Some(c.ks[i]) {
            return Err(format!("row {} does not multiply out to {}", i + 1, c.ks[i]));
        }
    }
    for l in 0..m {
        if c.b_matrix.iter().all(|row| row[l] == 1) {
            return Err(format!("base {} divides every coefficient", c.q[l]));
        }
    }
    if c.t.len() != m || c.working_box.len() != m || c.target.len() != m {
        return Err("vector lengths disagree with the number of bases".into());
    }

    let within = |x: &[u32], bound: &[u32]| x.iter().zip(bound).all(|(a, b)| a <= b);
    if !within(&c.target, &c.working_box) {
        return Err("target lies outside the working box".into());
    }
    let mut sum: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    for step in &c.steps {
        if step.j.len() != m || !within(&step.j, &c.working_box) {
            return Err(format!("relation {:?} lies outside the working box", step.j));
        }
        if within(&step.j, &c.t) {
            return Err(format!("relation {:?} lies inside [0, t]", step.j));
        }
        if step.coeff_den.is_zero() {
            return Err(format!("relation {:?} has a zero denominator", step.j));
        }
        let coeff = BigRational::new(step.coeff_num.clone(), step.coeff_den.clone());
        for row in &c.b_matrix {
            let idx: Vec<u32> = step.j.iter().zip(row).map(|(&a, &b)| a.saturating_sub(b)).collect();
            *sum.entry(idx).or_insert_with(BigRational::zero) += &coeff;
        }
    }
    sum.retain(|_, x| !x.is_zero());
    match sum.get(&c.target) {
        Some(x) if sum.len() == 1 && x.is_one() => Ok(()),
        _ => Err(format!(
            "weighted relations do not collapse to r{:?} = 0",
            c.target
        )),
    }
}

/// Verifies many certificates, in parallel when enabled.
pub fn verify_batch(certs: &[Certificate], exec: Exec) -> Vec<bool> {
    exec.map(certs, verify_certificate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks(k: &[u64]) -> CoefficientTuple {
        CoefficientTuple::new(k.to_vec()).unwrap()
    }

    #[test]
    fn two_three_targets_one_zero() {
        let cert = certify_nonconstant(&ks(&[2, 3]), &ExpVector::from([1, 1])).unwrap();
        assert_eq!(cert.target, [1, 0]);
        assert_eq!(cert.working_box, [4, 4]);
        assert_eq!(cert.d, 2);
        assert_eq!(check_certificate(&cert), Ok(()));
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn tampering_is_detected() {
        let cert = certify_nonconstant(&ks(&[2, 3]), &ExpVector::from([1, 1])).unwrap();

        let mut bad = cert.clone();
        bad.steps[0].coeff_num += 1;
        assert!(!verify_certificate(&bad));

        let mut bad = cert.clone();
        bad.steps.push(CertificateStep {
            j: vec![1, 1],
            coeff_num: 0.into(),
            coeff_den: 1.into(),
        });
        assert!(!verify_certificate(&bad));

        let mut bad = cert.clone();
        bad.steps[0].coeff_den = 0.into();
        assert!(!verify_certificate(&bad));

        let mut bad = cert.clone();
        bad.ks = vec![2, 5];
        assert!(!verify_certificate(&bad));

        let mut bad = cert;
        bad.target = vec![0, 1];
        assert!(!verify_certificate(&bad));
    }

    #[test]
    fn larger_examples() {
        let cert = certify_nonconstant(&ks(&[2, 3, 5]), &ExpVector::zero(3)).unwrap();
        assert!(cert.working_box.iter().all(|&x| x <= 2));
        assert!(verify_certificate(&cert));

        let cert = certify_nonconstant(&ks(&[12, 20, 15, 60]), &ExpVector::from([1, 1, 1])).unwrap();
        assert_eq!(cert.q, [4, 3, 5]);
        assert!(verify_certificate(&cert));
    }

    #[test]
    fn chosen_target() {
        let cert = certify_target(&ks(&[2, 3]), &ExpVector::from([1, 1]), &ExpVector::from([0, 1])).unwrap();
        assert_eq!(cert.target, [0, 1]);
        assert!(verify_certificate(&cert));
    }

    #[test]
    fn rejects_non_theorem_form() {
        let err = certify_nonconstant(&ks(&[2, 4]), &ExpVector::zero(1)).unwrap_err();
        assert!(err.to_string().contains("not of theorem form"));
    }
}
