//! Forward solver for the multiplicity relations
//! `r_{j⊖b_1} + … + r_{j⊖b_d} = d·s_j` (with `r_0 = −1`).
//!
//! Indices are visited in `≺` order. Each relation introduces at most one
//! multiplicity that no earlier relation mentioned; that one is solved for,
//! and a relation with nothing new is a consistency check. A solved value
//! that is not `−1 mod d` is reported as a conflict as well.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expvec::{box_points, ExpVector};
use crate::polyseries::decimal;
use crate::repfn::{CoefficientTuple, TheoremForm};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolvedEntry {
    #[serde(serialize_with = "decimal::serialize")]
    pub value: BigInt,
    /// Relation index whose equation fixed this value.
    pub from_relation: ExpVector,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MultiplicityTable {
    pub d: usize,
    #[serde(serialize_with = "solved_as_list")]
    pub solved: BTreeMap<ExpVector, SolvedEntry>,
    /// Box indices that no processed relation determined.
    pub unsolved: Vec<ExpVector>,
    /// Largest multiplicity with which a newly solved index occurred in its
    /// defining relation.
    pub max_new_multiplicity: u32,
}

fn solved_as_list<S: serde::Serializer>(
    solved: &BTreeMap<ExpVector, SolvedEntry>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Row<'a> {
        j: &'a ExpVector,
        #[serde(flatten)]
        entry: &'a SolvedEntry,
    }
    s.collect_seq(solved.iter().map(|(j, entry)| Row { j, entry }))
}

impl MultiplicityTable {
    pub fn get(&self, j: &ExpVector) -> Option<&BigInt> {
        self.solved.get(j).map(|e| &e.value)
    }

    /// Every solved value is `−1 mod d`.
    pub fn congruence_holds(&self) -> bool {
        let d = BigInt::from(self.d);
        self.solved
            .values()
            .all(|e| (&e.value + BigInt::one()).mod_floor(&d).is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SolveOutcome {
    Consistent { table: MultiplicityTable },
    Conflict {
        at: ExpVector,
        detail: String,
        table: MultiplicityTable,
    },
}

impl SolveOutcome {
    pub fn table(&self) -> &MultiplicityTable {
        match self {
            Self::Consistent { table } | Self::Conflict { table, .. } => table,
        }
    }

    pub fn conflict_at(&self) -> Option<&ExpVector> {
        match self {
            Self::Conflict { at, .. } => Some(at),
            Self::Consistent { .. } => None,
        }
    }
}

/// Decomposes `ks` and runs [`solve_with_form`].
pub fn solve_multiplicities(
    ks: &CoefficientTuple,
    s: &BTreeMap<ExpVector, u64>,
    bound: &ExpVector,
) -> Result<SolveOutcome> {
    solve_with_form(&ks.theorem_form()?, s, bound)
}

/// Processes every relation index in `[0, bound]` in `≺` order.
///
/// `s` lists the cyclotomic multiplicities of `P`; missing entries are zero
/// and the entry at the zero vector is ignored.
pub fn solve_with_form(
    form: &TheoremForm,
    s: &BTreeMap<ExpVector, u64>,
    bound: &ExpVector,
) -> Result<SolveOutcome> {
    let m = form.m();
    if bound.len() != m {
        return Err(Error::LengthMismatch(m, bound.len()));
    }
    let d = form.d();
    let mut order = box_points(bound);
    order.sort_by(|a, b| a.precedence_cmp(b));

    let mut table = MultiplicityTable {
        d,
        ..Default::default()
    };
    let zero = ExpVector::zero(m);
    table.solved.insert(
        zero.clone(),
        SolvedEntry {
            value: BigInt::from(-1),
            from_relation: zero.clone(),
        },
    );

    let mut conflict = None;
    for j in order.iter().filter(|j| !j.is_zero()) {
        let mut terms: BTreeMap<ExpVector, u32> = BTreeMap::new();
        for b in form.rows() {
            *terms.entry(j.ominus_unchecked(b)).or_default() += 1;
        }
        let rhs = BigInt::from(d) * BigInt::from(s.get(j).copied().unwrap_or(0));
        let mut known = BigInt::zero();
        let mut unknown = Vec::new();
        for (idx, mult) in terms {
            match table.solved.get(&idx) {
                Some(e) => known += &e.value * mult,
                None => unknown.push((idx, mult)),
            }
        }
        match unknown.as_slice() {
            [] => {
                if known != rhs {
                    conflict = Some((j.clone(), format!("relation reads {known} = {rhs}")));
                    break;
                }
            }
            [(idx, mult)] => {
                let (value, rem) = (&rhs - &known).div_rem(&BigInt::from(*mult));
                if !rem.is_zero() {
                    conflict = Some((
                        j.clone(),
                        format!("{mult}·r{idx} = {} has no integer solution", &rhs - &known),
                    ));
                    break;
                }
                if !(&value + BigInt::one()).mod_floor(&BigInt::from(d)).is_zero() {
                    conflict = Some((
                        j.clone(),
                        format!("r{idx} = {value} is not -1 mod {d}"),
                    ));
                    break;
                }
                table.max_new_multiplicity = table.max_new_multiplicity.max(*mult);
                table.solved.insert(
                    idx.clone(),
                    SolvedEntry {
                        value,
                        from_relation: j.clone(),
                    },
                );
            }
            many => {
                return Err(Error::OrderingInvariant {
                    at: j.to_string(),
                    unknowns: many.len(),
                })
            }
        }
    }

    table.unsolved = box_points(bound)
        .into_iter()
        .filter(|j| !table.solved.contains_key(j))
        .collect();
    Ok(match conflict {
        Some((at, detail)) => SolveOutcome::Conflict { at, detail, table },
        None => SolveOutcome::Consistent { table },
    })
}
