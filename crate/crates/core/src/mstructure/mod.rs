//! Exponent-vector machinery behind the non-constancy theorem: the
//! multiplicity solver, `m`-structures with their difference reduction, and
//! elimination certificates.

mod certificate;
mod elim;
mod solver;
mod structure;

pub use crate::expvec::{box_points, ominus, precede, ExpVector};
pub use certificate::{
    certify_nonconstant, certify_target, check_certificate, verify_batch, verify_certificate,
    Certificate, CertificateStep,
};
pub use solver::{solve_multiplicities, solve_with_form, MultiplicityTable, SolveOutcome, SolvedEntry};
pub use structure::{
    structure_from_values, zero_propagation, MStructure, PropagationLog, PropagationOutcome,
    PropagationStep, WORKING_BOX_CAP,
};
