//! Exact noncommutative polynomial kernel.
//!
//! Polynomials over the Gaussian rationals, graded by a formal ℏ, in words
//! of generator atoms. A [`RewriteSystem`] supplies the bracket table and
//! constraint rules that define normal forms.

mod atom;
mod coeff;
mod poly;
mod rewrite;

pub use atom::{eta, levi_civita, Atom, Basis};
pub use coeff::{rational_to_f64, Coefficient, GaussRational};
pub use poly::{Monomial, NCPoly, Word};
pub use rewrite::{
    m_pow, minv_pow, multiply, sym_divide_by_m, sym_product, ConstraintRule, RewriteSystem,
    DEFAULT_STEP_BOUND,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("malformed atom {0}")]
    MalformedAtom(String),
    #[error("unknown basis {0:?}")]
    UnknownBasis(String),
    #[error("atom {0} does not belong to basis {1}")]
    AtomNotInBasis(Atom, Basis),
    #[error("bracket table has no entry for ({0}, {1})")]
    MissingEntry(Atom, Atom),
    #[error("rewrite step bound {bound} exceeded; the table does not terminate")]
    StepBound { bound: u64 },
    #[error("internal consistency error: {0}")]
    Inconsistent(String),
}
