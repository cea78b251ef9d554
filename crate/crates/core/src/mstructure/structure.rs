//! `m`-structures: rational values `v_j` with `Σ_i v_{j⊖c_i} = u_j` for every
//! nonzero `j`, together with the difference reduction along one axis and
//! the zero-propagation argument for regular homogeneous structures.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::elim::Eliminator;
use super::solver::MultiplicityTable;
use crate::error::{Error, Result};
use crate::expvec::{box_points, ExpVector};
use crate::repfn::TheoremForm;

/// Largest working-box entry tried before giving up.
pub const WORKING_BOX_CAP: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MStructure {
    cvecs: Vec<ExpVector>,
    /// Inhomogeneity, finite support; absent entries are zero.
    u: BTreeMap<ExpVector, BigInt>,
    /// Partial value map.
    v: BTreeMap<ExpVector, BigRational>,
    /// Claimed homogeneity box: `u_j = 0` outside `[0, t]`.
    t: ExpVector,
}

impl MStructure {
    pub fn new(
        cvecs: Vec<ExpVector>,
        u: BTreeMap<ExpVector, BigInt>,
        v: BTreeMap<ExpVector, BigRational>,
        t: ExpVector,
    ) -> Result<Self> {
        let m = t.len();
        if m == 0 {
            return Err(Error::InvalidStructure("dimension must be at least 1".into()));
        }
        if cvecs.is_empty() {
            return Err(Error::InvalidStructure("need at least one coefficient vector".into()));
        }
        for x in cvecs.iter().chain(u.keys()).chain(v.keys()) {
            if x.len() != m {
                return Err(Error::LengthMismatch(m, x.len()));
            }
        }
        let mut u = u;
        u.retain(|_, x| !x.is_zero());
        Ok(Self { cvecs, u, v, t })
    }

    /// The structure carried by a multiplicity table: `c_i = b_i`,
    /// `u_j = d·s_j`, `v = r`, and `t` the support box of `s`.
    pub fn from_multiplicities(
        form: &TheoremForm,
        s: &BTreeMap<ExpVector, u64>,
        table: &MultiplicityTable,
    ) -> Result<Self> {
        let m = form.m();
        let d = BigInt::from(form.d());
        let mut t = ExpVector::zero(m);
        let mut u = BTreeMap::new();
        for (j, &sj) in s.iter().filter(|(j, &sj)| !j.is_zero() && sj != 0) {
            if j.len() != m {
                return Err(Error::LengthMismatch(m, j.len()));
            }
            for (a, &e) in t.0.iter_mut().zip(j.entries()) {
                *a = (*a).max(e);
            }
            u.insert(j.clone(), &d * BigInt::from(sj));
        }
        let v = table
            .solved
            .iter()
            .map(|(j, e)| (j.clone(), BigRational::from_integer(e.value.clone())))
            .collect();
        Self::new(form.rows().to_vec(), u, v, t)
    }

    pub fn m(&self) -> usize {
        self.t.len()
    }

    pub fn d(&self) -> usize {
        self.cvecs.len()
    }

    pub fn cvecs(&self) -> &[ExpVector] {
        &self.cvecs
    }

    pub fn t(&self) -> &ExpVector {
        &self.t
    }

    pub fn u(&self, j: &ExpVector) -> BigInt {
        self.u.get(j).cloned().unwrap_or_default()
    }

    pub fn v(&self, j: &ExpVector) -> Option<&BigRational> {
        self.v.get(j)
    }

    pub fn values(&self) -> &BTreeMap<ExpVector, BigRational> {
        &self.v
    }

    /// `S_ℓ = {i : c(i, ℓ) = 0}`.
    pub fn zero_set(&self, axis: usize) -> Vec<usize> {
        (0..self.d())
            .filter(|&i| self.cvecs[i].entries()[axis] == 0)
            .collect()
    }

    /// Every `c_i ∈ {0,1}^m \ {0}` and every `S_ℓ` nonempty. In one dimension
    /// the only admissible vector is `(1)` and the `S_ℓ` condition is dropped.
    pub fn is_regular(&self) -> bool {
        let binary = self
            .cvecs
            .iter()
            .all(|c| !c.is_zero() && c.entries().iter().all(|&x| x <= 1));
        binary && (self.m() == 1 || (0..self.m()).all(|l| !self.zero_set(l).is_empty()))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.u.keys().all(|j| j.within(&self.t))
    }

    /// `Σ_i v_{j⊖c_i} − u_j`, when every value involved is known.
    pub fn relation_residual(&self, j: &ExpVector) -> Option<BigRational> {
        let mut sum = BigRational::zero();
        for c in &self.cvecs {
            sum += self.v.get(&j.ominus_unchecked(c))?;
        }
        Some(sum - BigRational::from_integer(self.u(j)))
    }

    /// Nonzero indices whose relation is fully known but fails.
    pub fn violated_relations(&self) -> Vec<ExpVector> {
        self.v
            .keys()
            .filter(|j| !j.is_zero())
            .filter(|j| self.relation_residual(j).is_some_and(|r| !r.is_zero()))
            .cloned()
            .collect()
    }

    /// Differences `Δ_i = v_{i with 1 at axis} − v_{i with 0 at axis}` as an
    /// `(m−1)`-structure with vectors `{c_i' : i ∈ S_axis}` and
    /// `u'_j = u_{j+𝟙} − u_j`.
    pub fn reduce_delta(&self, axis: usize) -> Result<Self> {
        let m = self.m();
        if m < 2 {
            return Err(Error::InvalidStructure("cannot reduce a 1-structure".into()));
        }
        if axis >= m {
            return Err(Error::InvalidStructure(format!("axis {axis} out of range for m={m}")));
        }
        let kept = self.zero_set(axis);
        if kept.is_empty() {
            return Err(Error::InvalidStructure(format!("S_{} is empty", axis + 1)));
        }
        let cvecs = kept.iter().map(|&i| self.cvecs[i].without(axis)).collect();

        let mut u = BTreeMap::new();
        for j in self.u.keys() {
            let jr = j.without(axis);
            if jr.is_zero() || u.contains_key(&jr) {
                continue;
            }
            let hi = self.u(&jr.with_inserted(axis, 1));
            let lo = self.u(&jr.with_inserted(axis, 0));
            u.insert(jr, hi - lo);
        }

        let mut v = BTreeMap::new();
        for (i, lo) in self.v.iter().filter(|(i, _)| i.entries()[axis] == 0) {
            let ir = i.without(axis);
            if let Some(hi) = self.v.get(&ir.with_inserted(axis, 1)) {
                v.insert(ir, hi - lo);
            }
        }
        Self::new(cvecs, u, v, self.t.without(axis))
    }
}

/// One entry in a zero-propagation trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum PropagationStep {
    /// Difference reduction of a level-`from_m` structure along `axis`.
    Reduce {
        from_m: usize,
        axis: usize,
        cvecs: Vec<ExpVector>,
        t: ExpVector,
    },
    /// Box of relations searched for the anchor combination.
    Anchor { working_box: ExpVector },
    /// Homogeneous relation at `j` taken with weight `coeff`.
    Relation {
        j: ExpVector,
        #[serde(serialize_with = "ser_rational")]
        coeff: BigRational,
    },
    Conclude { target: ExpVector },
}

fn ser_rational<S: serde::Serializer>(
    x: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropagationLog {
    pub target: ExpVector,
    pub steps: Vec<PropagationStep>,
}

impl PropagationLog {
    /// The weighted relations must sum to exactly `v_target`, and each cited
    /// relation must lie outside the homogeneity box of `s`.
    pub fn replay(&self, s: &MStructure) -> bool {
        let mut acc: BTreeMap<ExpVector, BigRational> = BTreeMap::new();
        for step in &self.steps {
            let PropagationStep::Relation { j, coeff } = step else {
                continue;
            };
            if j.len() != s.m() || j.within(s.t()) || !s.u(j).is_zero() {
                return false;
            }
            for c in s.cvecs() {
                *acc.entry(j.ominus_unchecked(c)).or_insert_with(BigRational::zero) += coeff;
            }
        }
        acc.retain(|_, x| !x.is_zero());
        acc.len() == 1 && acc.get(&self.target).is_some_and(One::is_one)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PropagationOutcome {
    Proved { log: PropagationLog },
    Failure { reason: String },
}

fn record_reductions(s: &MStructure, steps: &mut Vec<PropagationStep>) {
    if s.m() < 2 {
        return;
    }
    for axis in 0..s.m() {
        let Ok(reduced) = s.reduce_delta(axis) else {
            continue;
        };
        steps.push(PropagationStep::Reduce {
            from_m: s.m(),
            axis,
            cvecs: reduced.cvecs().to_vec(),
            t: reduced.t().clone(),
        });
        if reduced.cvecs().iter().all(|c| !c.is_zero()) {
            record_reductions(&reduced, steps);
        }
    }
}

/// Derives `v_target = 0` for a regular structure homogeneous outside `t`
/// and a target outside `[0, t]`.
///
/// One-dimensional structures use the single relation at `target + 1`. In
/// higher dimension the trace lists the difference reductions along every
/// axis and then an anchor combination of homogeneous relations, found by
/// exact elimination in a box starting at `2t + 2` and doubling up to
/// [`WORKING_BOX_CAP`].
pub fn zero_propagation(s: &MStructure, target: &ExpVector) -> Result<PropagationOutcome> {
    if !s.is_regular() {
        return Err(Error::InvalidStructure("structure is not regular".into()));
    }
    if !s.is_homogeneous() {
        return Err(Error::InvalidStructure(format!(
            "structure is not homogeneous outside {}",
            s.t()
        )));
    }
    if target.len() != s.m() {
        return Err(Error::LengthMismatch(s.m(), target.len()));
    }
    if target.within(s.t()) {
        return Ok(PropagationOutcome::Failure {
            reason: format!("target {target} lies inside the box [0, {}]", s.t()),
        });
    }

    let mut steps = Vec::new();
    if s.m() == 1 {
        let j = ExpVector(vec![target.entries()[0] + 1]);
        steps.push(PropagationStep::Relation {
            j,
            coeff: BigRational::new(BigInt::one(), BigInt::from(s.d())),
        });
    } else {
        record_reductions(s, &mut steps);
        let Some((working_box, lambda)) = anchor_combination(s.cvecs(), s.t(), target) else {
            return Err(Error::BoxBudgetExhausted {
                cap: WORKING_BOX_CAP,
            });
        };
        steps.push(PropagationStep::Anchor { working_box });
        steps.extend(
            lambda
                .into_iter()
                .map(|(j, coeff)| PropagationStep::Relation { j, coeff }),
        );
    }
    steps.push(PropagationStep::Conclude {
        target: target.clone(),
    });
    let log = PropagationLog {
        target: target.clone(),
        steps,
    };
    debug_assert!(log.replay(s));
    Ok(PropagationOutcome::Proved { log })
}

/// Initial working box `2t + 2`, covering `target` as well.
pub(crate) fn initial_working_box(t: &ExpVector, target: Option<&ExpVector>) -> ExpVector {
    ExpVector(
        t.entries()
            .iter()
            .enumerate()
            .map(|(a, &x)| {
                let base = 2 * x + 2;
                target.map_or(base, |tg| base.max(tg.entries()[a] + 1))
            })
            .collect(),
    )
}

/// Next working box, or `None` once the cap has been tried.
pub(crate) fn grow_working_box(w: &ExpVector) -> Option<ExpVector> {
    if w.entries().iter().all(|&x| x >= WORKING_BOX_CAP) {
        return None;
    }
    Some(ExpVector(
        w.entries()
            .iter()
            .map(|&x| (2 * x).min(WORKING_BOX_CAP))
            .collect(),
    ))
}

fn anchor_combination(
    cvecs: &[ExpVector],
    t: &ExpVector,
    target: &ExpVector,
) -> Option<(ExpVector, Vec<(ExpVector, BigRational)>)> {
    let mut w = initial_working_box(t, Some(target));
    loop {
        if let Some(lambda) = Eliminator::new(cvecs, t, &w).derive(target) {
            return Some((w, lambda));
        }
        w = grow_working_box(&w)?;
    }
}

/// Integer values on `[0, bound]` chosen freely, with `u` defined to make
/// every relation hold. Used to exercise the reduction identities.
pub fn structure_from_values(
    cvecs: Vec<ExpVector>,
    values: impl Fn(&ExpVector) -> i64,
    bound: &ExpVector,
) -> Result<MStructure> {
    let pts = box_points(bound);
    let v: BTreeMap<ExpVector, BigRational> = pts
        .iter()
        .map(|p| (p.clone(), BigRational::from_integer(values(p).into())))
        .collect();
    let mut u = BTreeMap::new();
    for j in pts.iter().filter(|j| !j.is_zero()) {
        let sum: BigRational = cvecs.iter().map(|c| &v[&j.ominus_unchecked(c)]).sum();
        u.insert(j.clone(), sum.to_integer());
    }
    MStructure::new(cvecs, u, v, bound.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v<const N: usize>(x: [u32; N]) -> ExpVector {
        ExpVector::from(x)
    }

    fn homogeneous(cvecs: Vec<ExpVector>, t: ExpVector, inbox: &[(ExpVector, i64)]) -> MStructure {
        let u = inbox.iter().map(|(j, x)| (j.clone(), BigInt::from(*x))).collect();
        MStructure::new(cvecs, u, BTreeMap::new(), t).unwrap()
    }

    #[test]
    fn reduce_bookkeeping() {
        let s = homogeneous(vec![v([1, 0]), v([0, 1])], v([1, 1]), &[]);
        let r = s.reduce_delta(1).unwrap();
        assert_eq!(r.cvecs(), [v([1])]);
        assert_eq!(r.t(), &v([1]));
        assert!(r.u.is_empty());
        assert!(s.reduce_delta(5).is_err());
        let one = homogeneous(vec![v([1])], v([0]), &[]);
        assert!(one.reduce_delta(0).is_err());
        let no_zero = homogeneous(vec![v([1, 1]), v([1, 0])], v([0, 0]), &[]);
        assert!(no_zero.reduce_delta(0).is_err());
    }

    #[test]
    fn reduce_preserves_relations_on_two_three() {
        let s = structure_from_values(
            vec![v([1, 0]), v([0, 1])],
            |p| (3 * p.0[0] as i64 - 2 * p.0[1] as i64 + 1).pow(2) % 7 - 3,
            &v([4, 4]),
        )
        .unwrap();
        assert!(s.violated_relations().is_empty());
        let r = s.reduce_delta(1).unwrap();
        assert_eq!(r.cvecs(), [v([1])]);
        assert!(r.violated_relations().is_empty());
        // Δ_{i⊖1} = u_{(i,1)} − u_{(i,0)} spelled out
        for i in 1..=4u32 {
            let delta = r.v(&v([i - 1])).unwrap();
            let expect = s.u(&v([i, 1])) - s.u(&v([i, 0]));
            assert_eq!(delta, &BigRational::from_integer(expect));
        }
    }

    #[test]
    fn regularity() {
        assert!(homogeneous(vec![v([1, 0]), v([0, 1])], v([0, 0]), &[]).is_regular());
        assert!(!homogeneous(vec![v([1, 0]), v([1, 1])], v([0, 0]), &[]).is_regular());
        assert!(!homogeneous(vec![v([2, 0]), v([0, 1])], v([0, 0]), &[]).is_regular());
        assert!(homogeneous(vec![v([1]), v([1])], v([0]), &[]).is_regular());
    }

    #[test]
    fn base_case_one_dimension() {
        let s = homogeneous(vec![v([1]), v([1])], v([1]), &[(v([1]), 4)]);
        let PropagationOutcome::Proved { log } = zero_propagation(&s, &v([2])).unwrap() else {
            panic!("expected a proof");
        };
        assert_eq!(
            log.steps[0],
            PropagationStep::Relation {
                j: v([3]),
                coeff: BigRational::new(1.into(), 2.into())
            }
        );
        assert!(log.replay(&s));
    }

    #[test]
    fn target_inside_box_fails() {
        let s = homogeneous(vec![v([1, 0]), v([0, 1])], v([1, 1]), &[(v([1, 1]), 2)]);
        let out = zero_propagation(&s, &v([1, 0])).unwrap();
        assert!(matches!(out, PropagationOutcome::Failure { .. }));
    }

    #[test]
    fn two_dimensional_propagation() {
        let s = homogeneous(vec![v([1, 0]), v([0, 1])], v([1, 1]), &[(v([1, 1]), 2), (v([0, 1]), -6)]);
        let PropagationOutcome::Proved { log } = zero_propagation(&s, &v([2, 2])).unwrap() else {
            panic!("expected a proof");
        };
        assert!(log.replay(&s));
        assert_eq!(log.steps.last(), Some(&PropagationStep::Conclude { target: v([2, 2]) }));
        let reductions = log
            .steps
            .iter()
            .filter(|st| matches!(st, PropagationStep::Reduce { .. }))
            .count();
        assert_eq!(reductions, 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        let irregular = homogeneous(vec![v([1, 1]), v([1, 0])], v([0, 0]), &[]);
        assert!(zero_propagation(&irregular, &v([3, 3])).is_err());
        let inhomogeneous = homogeneous(vec![v([1, 0]), v([0, 1])], v([0, 0]), &[(v([2, 0]), 1)]);
        assert!(zero_propagation(&inhomogeneous, &v([3, 3])).is_err());
    }
}
