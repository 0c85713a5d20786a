//! Quantum hexaspherical observables.
//!
//! An exact noncommutative algebra engine over two generating sets of the
//! conformal algebra with a mass observable, the composite observables
//! built from it (spin, position, special conformal generators, the six
//! hexaspherical observables), finite transformations to accelerated frames,
//! the classical projective geometry they generalize, and a momentum-grid
//! spinor representation used as a numerical oracle.

pub mod conformal;
pub mod hexgeom;
pub mod ncalg;
pub mod repnum;
pub mod tables;

pub use ncalg::{
    AlgebraError, Atom, Basis, Coefficient, GaussRational, Monomial, NCPoly, RewriteSystem, Word,
};
pub use tables::{basis_a, basis_b, Provenance, TableEntry};
