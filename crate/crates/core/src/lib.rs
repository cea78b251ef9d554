//! Exact computation of additive representation functions
//! `r_A(n; k_1..k_d)`, Moser-type constructions, cyclotomic multiplicities,
//! and machine-checkable certificates that `r_A` cannot be eventually
//! constant when the coefficients have the co-prime product form.

pub mod constructions;
pub mod cyclotomic;
pub mod error;
pub mod exec;
pub mod expvec;
pub mod mstructure;
pub mod polyseries;
pub mod repfn;
pub mod search;

pub use error::{Error, Result};
pub use exec::Exec;
pub use expvec::ExpVector;
pub use polyseries::{IntPolynomial, TruncatedSeries};
pub use repfn::{CoefficientTuple, SetPrefix, TheoremForm};
