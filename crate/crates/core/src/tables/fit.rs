//! Fitting table entries against the grid oracle.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::ncalg::{Atom, NCPoly, Word};

use super::eps_spin_momentum;

/// Denominator bound for rational recognition of fitted coefficients.
pub const MAX_DENOMINATOR: i64 = 64;
/// Distance within which a float is snapped to a rational.
pub const SNAP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("candidate operators for ({0}, {1}) are linearly dependent on the samples")]
    RankDeficient(Atom, Atom),
    #[error("fit residual {residual:.3e} for ({left}, {right}) exceeds {tol:.1e}; extend the candidate list")]
    Residual {
        left: Atom,
        right: Atom,
        residual: f64,
        tol: f64,
    },
    #[error("coefficient {value} for ({left}, {right}) is not a rational with denominator at most 64")]
    NotRational { left: Atom, right: Atom, value: String },
    #[error("oracle failure: {0}")]
    Oracle(String),
}

/// Result of fitting one bracket onto a list of candidate operators.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzFit {
    pub left: Atom,
    pub right: Atom,
    pub candidates: Vec<NCPoly>,
    pub coefficients: Vec<BigRational>,
    /// Unsnapped complex least-squares coefficients.
    pub raw: Vec<(f64, f64)>,
    pub residual: f64,
    pub samples: usize,
}

impl AnsatzFit {
    pub fn oracle_id(&self) -> String {
        format!("grid-fit({},{})", self.left, self.right)
    }
}

/// Numeric least squares of a bracket onto candidates.
pub trait FitOracle {
    /// Returns the complex coefficients, the relative residual of the best
    /// fit, and the number of sample states used.
    fn least_squares(
        &self,
        left: Atom,
        right: Atom,
        candidates: &[NCPoly],
    ) -> Result<(Vec<(f64, f64)>, f64, usize), FitError>;

    fn tolerance(&self) -> f64;
}

/// Nearest `p/q` with `q ≤ 64` within the snapping tolerance.
pub fn snap_rational(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    for q in 1..=MAX_DENOMINATOR {
        let p = (x * q as f64).round();
        if (x - p / q as f64).abs() <= SNAP_TOLERANCE {
            return Some(BigRational::new(BigInt::from(p as i64), BigInt::from(q)));
        }
    }
    None
}

fn word(atoms: &[Atom]) -> NCPoly {
    let mut v = atoms.to_vec();
    v.sort();
    NCPoly::word(Word::from_atoms(&v))
}

fn minv(k: usize) -> Vec<Atom> {
    vec![Atom::Minv; k]
}

/// Basis-B pairs `(left, right)`, `left > right`, whose brackets are fitted.
pub fn derived_pairs() -> Vec<(Atom, Atom)> {
    let mut out = Vec::new();
    for mu in 0..4u8 {
        out.push((Atom::S(mu), Atom::Minv));
        out.push((Atom::S(mu), Atom::M));
        for nu in 0..4u8 {
            out.push((Atom::S(nu), Atom::P(mu)));
        }
        for nu in 0..mu {
            out.push((Atom::S(mu), Atom::S(nu)));
        }
    }
    for mu in 0..4u8 {
        out.push((Atom::X(mu), Atom::Minv));
        out.push((Atom::X(mu), Atom::M));
        for nu in 0..4u8 {
            out.push((Atom::X(mu), Atom::S(nu)));
        }
    }
    out.sort();
    out
}

/// Candidate operators for a fitted pair, Lorentz-covariant in the indices.
pub fn derived_candidates(left: Atom, right: Atom, eps_sign: i64) -> Vec<NCPoly> {
    let with = |a: &[Atom], k: usize| {
        let mut v = a.to_vec();
        v.extend(minv(k));
        word(&v)
    };
    match (left, right) {
        (Atom::S(nu), Atom::S(mu)) => vec![
            eps_spin_momentum(nu, mu, 1, eps_sign),
            with(&[Atom::S(nu), Atom::P(mu)], 1),
            with(&[Atom::S(mu), Atom::P(nu)], 1),
        ],
        (Atom::X(mu), Atom::S(nu)) if mu == nu => vec![with(&[Atom::S(mu), Atom::P(mu)], 2)],
        (Atom::X(mu), Atom::S(nu)) => vec![
            with(&[Atom::S(mu), Atom::P(nu)], 2),
            with(&[Atom::S(nu), Atom::P(mu)], 2),
            eps_spin_momentum(mu, nu, 2, eps_sign),
        ],
        (Atom::X(mu), Atom::M) => vec![with(&[Atom::P(mu)], 1), with(&[Atom::S(mu)], 1)],
        (Atom::X(mu), Atom::Minv) => vec![with(&[Atom::P(mu)], 3), with(&[Atom::S(mu)], 3)],
        (Atom::S(mu), Atom::M) => vec![with(&[Atom::S(mu)], 0), with(&[Atom::P(mu)], 0)],
        (Atom::S(mu), Atom::Minv) => vec![with(&[Atom::S(mu)], 2), with(&[Atom::P(mu)], 2)],
        (Atom::S(nu), Atom::P(mu)) if mu == nu => {
            vec![with(&[Atom::S(nu)], 0), with(&[Atom::P(nu)], 0)]
        }
        (Atom::S(nu), Atom::P(mu)) => vec![
            with(&[Atom::S(nu)], 0),
            with(&[Atom::S(mu)], 0),
            with(&[Atom::P(mu)], 0),
        ],
        _ => Vec::new(),
    }
}

/// Fits `(left, right)` onto `candidates` and snaps to exact rationals.
pub fn fit_derived_entry(
    left: Atom,
    right: Atom,
    candidates: Vec<NCPoly>,
    oracle: &dyn FitOracle,
) -> Result<AnsatzFit, FitError> {
    let raw = oracle.least_squares(left, right, &candidates)?;
    snap_fit(left, right, candidates, raw, oracle.tolerance())
}

/// Checks a raw least-squares result against `tol` and snaps its
/// coefficients to rationals.
pub fn snap_fit(
    left: Atom,
    right: Atom,
    candidates: Vec<NCPoly>,
    (raw, residual, samples): (Vec<(f64, f64)>, f64, usize),
    tol: f64,
) -> Result<AnsatzFit, FitError> {
    if !(residual <= tol) {
        return Err(FitError::Residual {
            left,
            right,
            residual,
            tol,
        });
    }
    let mut coefficients = Vec::with_capacity(raw.len());
    for &(re, im) in &raw {
        let q = snap_rational(re).filter(|_| im.abs() <= SNAP_TOLERANCE);
        match q {
            Some(q) => coefficients.push(q),
            None => {
                return Err(FitError::NotRational {
                    left,
                    right,
                    value: format!("{re:+.9} {im:+.9}i"),
                })
            }
        }
    }
    Ok(AnsatzFit {
        left,
        right,
        candidates,
        coefficients,
        raw,
        residual,
        samples,
    })
}
