//! Exact rational elimination over homogeneous out-of-box relations.
//!
//! Unknowns are `v_i` for `i` in the working box `[0, w]`. For every `j` in the
//! working box but outside `[0, t]` the relation `Σ_i v_{j⊖c_i} = 0` is a row.
//! Rows are kept in echelon form keyed by their highest-ranked column, where
//! rank orders points by total degree and then lexicographically, so the far
//! corner of the box is eliminated first. Each basis row remembers which
//! combination of original relations produced it.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::expvec::{box_points, ExpVector};

type Sparse = BTreeMap<usize, BigRational>;

struct BasisRow {
    row: Sparse,
    combo: Sparse,
}

pub(crate) struct Eliminator {
    points: Vec<ExpVector>,
    rank_of: HashMap<ExpVector, usize>,
    relations: Vec<ExpVector>,
    basis: HashMap<usize, BasisRow>,
}

fn axpy(dst: &mut Sparse, alpha: &BigRational, src: &Sparse) {
    for (&k, x) in src {
        let entry = dst.entry(k).or_insert_with(BigRational::zero);
        *entry -= alpha * x;
        if entry.is_zero() {
            dst.remove(&k);
        }
    }
}

impl Eliminator {
    pub fn new(cvecs: &[ExpVector], t: &ExpVector, working_box: &ExpVector) -> Self {
        let mut points = box_points(working_box);
        points.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
        let rank_of: HashMap<ExpVector, usize> =
            points.iter().cloned().enumerate().map(|(r, p)| (p, r)).collect();
        let relations: Vec<ExpVector> = points.iter().filter(|j| !j.within(t)).cloned().collect();

        let mut elim = Self {
            points,
            rank_of,
            relations,
            basis: HashMap::new(),
        };
        for id in 0..elim.relations.len() {
            let mut row = Sparse::new();
            for c in cvecs {
                let col = elim.rank_of[&elim.relations[id].ominus_unchecked(c)];
                *row.entry(col).or_insert_with(BigRational::zero) += BigRational::one();
            }
            row.retain(|_, x| !x.is_zero());
            elim.insert(row, Sparse::from([(id, BigRational::one())]));
        }
        elim
    }

    fn insert(&mut self, mut row: Sparse, mut combo: Sparse) {
        while let Some((&lead, coef)) = row.last_key_value() {
            match self.basis.get(&lead) {
                Some(b) => {
                    let alpha = coef.clone();
                    axpy(&mut row, &alpha, &b.row);
                    axpy(&mut combo, &alpha, &b.combo);
                }
                None => {
                    let inv = coef.recip();
                    row.values_mut().for_each(|x| *x *= &inv);
                    combo.values_mut().for_each(|x| *x *= &inv);
                    self.basis.insert(lead, BasisRow { row, combo });
                    return;
                }
            }
        }
    }

    /// Coefficients `λ_j` with `Σ λ_j · relation_j = v_target`, if they exist.
    pub fn derive(&self, target: &ExpVector) -> Option<Vec<(ExpVector, BigRational)>> {
        let mut x = Sparse::from([(*self.rank_of.get(target)?, BigRational::one())]);
        let mut lambda = Sparse::new();
        while let Some((&lead, coef)) = x.last_key_value() {
            let b = self.basis.get(&lead)?;
            let alpha = coef.clone();
            axpy(&mut x, &alpha, &b.row);
            // x -= α·row means the combination gains +α·combo
            axpy(&mut lambda, &-alpha, &b.combo);
        }
        Some(
            lambda
                .into_iter()
                .map(|(id, c)| (self.relations[id].clone(), c))
                .collect(),
        )
    }

    /// Working-box points ordered by degree, then by descending lex, so that
    /// `𝟙_1` is tried before `𝟙_2`.
    pub fn candidate_targets(&self) -> Vec<ExpVector> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| b.cmp(a)));
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_anchor() {
        let c = [ExpVector::from([1]), ExpVector::from([1])];
        let e = Eliminator::new(&c, &ExpVector::from([1]), &ExpVector::from([4]));
        let lambda = e.derive(&ExpVector::from([2])).unwrap();
        assert_eq!(lambda.len(), 1);
        assert_eq!(lambda[0].0, ExpVector::from([3]));
        assert_eq!(lambda[0].1, BigRational::new(1.into(), 2.into()));
        // j = 2 lies outside [0,1], so 2·v_1 = 0 is available too
        assert!(e.derive(&ExpVector::from([1])).is_some());
        assert!(e.derive(&ExpVector::from([0])).is_none());
    }
}
