use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ncalg::{AlgebraError, Atom, Coefficient, GaussRational, NCPoly, RewriteSystem, Word};

use super::{ObservableSet, HexaIndex};

/// Acceleration parameters `α^μ` (upper index), exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AccelParams {
    pub alpha: [BigRational; 4],
}

impl AccelParams {
    pub fn new(alpha: [BigRational; 4]) -> Self {
        AccelParams { alpha }
    }

    pub fn zero() -> Self {
        AccelParams {
            alpha: std::array::from_fn(|_| BigRational::zero()),
        }
    }

    pub fn from_ratios(v: [(i64, i64); 4]) -> Self {
        AccelParams {
            alpha: v.map(|(n, d)| BigRational::new(n.into(), d.into())),
        }
    }

    /// `α_μ = η_{μμ} α^μ`.
    pub fn lower(&self, mu: usize) -> BigRational {
        if mu == 0 {
            self.alpha[0].clone()
        } else {
            -self.alpha[mu].clone()
        }
    }

    /// `α² = η_{μν} α^μ α^ν`.
    pub fn alpha_sq(&self) -> BigRational {
        (0..4).map(|m| self.lower(m) * &self.alpha[m]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().all(|a| a.is_zero())
    }

    pub fn neg(&self) -> Self {
        AccelParams {
            alpha: std::array::from_fn(|m| -self.alpha[m].clone()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        AccelParams {
            alpha: std::array::from_fn(|m| &self.alpha[m] + &other.alpha[m]),
        }
    }
}

impl fmt::Display for AccelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.alpha.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `r,r,r,r` with each `r` an integer or `p/q`.
impl FromStr for AccelParams {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(format!("expected 4 comma-separated rationals, got {}", parts.len()));
        }
        let mut alpha: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
        for (slot, p) in alpha.iter_mut().zip(parts) {
            *slot = parse_rational(p)?;
        }
        Ok(AccelParams { alpha })
    }
}

pub(crate) fn parse_rational(p: &str) -> Result<BigRational, String> {
    let bad = || format!("{p:?} is not an integer or p/q rational");
    let (n, d) = match p.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (p, "1"),
    };
    let num: BigInt = n.parse().map_err(|_| bad())?;
    let den: BigInt = d.parse().map_err(|_| bad())?;
    if den.is_zero() || d.starts_with('-') || d.starts_with('+') {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Sum of the conjugation series and where it stopped.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostResult {
    pub value: NCPoly,
    /// Highest order with a nonzero term.
    pub order: usize,
    /// Whether a vanishing term was reached within the order budget.
    pub terminated: bool,
}

/// `Ā = A + α^μ(A, C_μ) + ½ α^μα^ν((A, C_μ), C_ν) + …`, with
/// `term_{n+1} = (1/(n+1)) α^μ (term_n, C_μ)`, stopped at the first vanishing
/// term or after `max_order`.
pub fn boost(
    rw: &RewriteSystem,
    obs: &ObservableSet,
    target: &NCPoly,
    a: &AccelParams,
    max_order: usize,
) -> Result<BoostResult, AlgebraError> {
    let mut value = rw.normalize(target)?;
    let mut term = value.clone();
    let mut order = 0;
    if term.is_zero() || a.is_zero() {
        return Ok(BoostResult {
            value,
            order: 0,
            terminated: true,
        });
    }
    for n in 0..max_order {
        let mut next = NCPoly::zero();
        for mu in 0..4 {
            if a.alpha[mu].is_zero() {
                continue;
            }
            let b = rw.commutator(&term, &obs.c[mu])?;
            next.add_scaled(&b, &GaussRational::real(a.alpha[mu].clone()), 0);
        }
        let next = next.scale_rational(&BigRational::new(BigInt::one(), BigInt::from(n + 1)));
        if next.is_zero() {
            return Ok(BoostResult {
                value,
                order,
                terminated: true,
            });
        }
        value.add_assign(&next);
        order = n + 1;
        term = next;
    }
    Ok(BoostResult {
        value,
        order,
        terminated: false,
    })
}

/// Coefficients of a polynomial over `{M, Y_0..Y_3, Y_+ − Y_−}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HexaCombination {
    pub m: GaussRational,
    pub y: [GaussRational; 4],
    pub diff: GaussRational,
}

fn signed_term(out: &mut String, c: &GaussRational, name: &str) {
    if c.is_zero() {
        return;
    }
    let neg = c.is_real() && c.re.is_negative();
    let mag = if neg { -c.clone() } else { c.clone() };
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    if !mag.is_one() {
        if mag.is_real() {
            out.push_str(&format!("({}) ", mag.re));
        } else {
            out.push_str(&format!("({mag}) "));
        }
    }
    out.push_str(name);
}

impl fmt::Display for HexaCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        signed_term(&mut out, &self.m, "M");
        for mu in 0..4 {
            signed_term(&mut out, &self.y[mu], &format!("Y_{mu}"));
        }
        signed_term(&mut out, &self.diff, "(Y_+ - Y_-)");
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl HexaCombination {
    pub fn to_poly(&self, obs: &ObservableSet) -> NCPoly {
        let mut p = NCPoly::atom(Atom::M).scale(&self.m);
        for mu in 0..4 {
            p.add_scaled(&obs.y[2 + mu], &self.y[mu], 0);
        }
        p.add_scaled(&obs.y_diff(), &self.diff, 0);
        p
    }
}

/// Exact decomposition of `p` over `{M, Y_μ, Y_+ − Y_−}`, if it lies in
/// their span.
pub fn decompose_hexa(p: &NCPoly, obs: &ObservableSet) -> Option<HexaCombination> {
    let basis: Vec<NCPoly> = std::iter::once(NCPoly::atom(Atom::M))
        .chain((0..4).map(|mu| obs.y[2 + mu].clone()))
        .chain(std::iter::once(obs.y_diff()))
        .collect();
    let probes: Vec<Word> = basis
        .iter()
        .map(|b| {
            b.terms()
                .filter(|(m, _)| m.hbar == 0)
                .map(|(m, _)| m.word.clone())
                .max()
                .unwrap_or_default()
        })
        .collect();
    let k = basis.len();
    let mut mat: Vec<Vec<GaussRational>> = probes
        .iter()
        .map(|w| {
            let mut row: Vec<GaussRational> = basis.iter().map(|b| b.coefficient_of(w, 0)).collect();
            row.push(p.coefficient_of(w, 0));
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, piv);
        let inv = mat[col][col].inv()?;
        for x in mat[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..k {
            if r != col && !mat[r][col].is_zero() {
                let f = mat[r][col].clone();
                let pivot_row = mat[col].clone();
                for (x, y) in mat[r].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    let c: Vec<GaussRational> = (0..k).map(|r| mat[r][k].clone()).collect();
    let combo = HexaCombination {
        m: c[0].clone(),
        y: std::array::from_fn(|mu| c[1 + mu].clone()),
        diff: c[5].clone(),
    };
    if (&combo.to_poly(obs) - p).is_zero() {
        Some(combo)
    } else {
        None
    }
}

/// `M̄ = M − 2α^μ Y_μ + α²(Y_+ − Y_−)`.
pub fn inertial_mass_closed_form(obs: &ObservableSet, a: &AccelParams) -> NCPoly {
    let mut p = NCPoly::atom(Atom::M);
    for mu in 0..4 {
        p.add_scaled(&obs.y[2 + mu], &GaussRational::real(a.alpha[mu].clone() * BigRational::from_integer((-2).into())), 0);
    }
    p.add_scaled(&obs.y_diff(), &GaussRational::real(a.alpha_sq()), 0);
    p
}

/// `Ȳ_μ = Y_μ − α_μ (Y_+ − Y_−)`.
pub fn boosted_y_closed_form(obs: &ObservableSet, a: &AccelParams, mu: usize) -> NCPoly {
    let mut p = obs.y[2 + mu].clone();
    p.add_scaled(&obs.y_diff(), &GaussRational::real(-a.lower(mu)), 0);
    p
}

/// `F' = (F, M̄)` with `M̄` the boosted mass.
pub fn motion_derivative(
    rw: &RewriteSystem,
    obs: &ObservableSet,
    f: &NCPoly,
    a: &AccelParams,
) -> Result<NCPoly, AlgebraError> {
    let m_bar = boost(rw, obs, &NCPoly::atom(Atom::M), a, 8)?.value;
    rw.commutator(f, &m_bar)
}

/// Residual polynomial of one operator equation.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeFallResidual {
    pub id: String,
    pub residual: NCPoly,
}

/// `Y_μ'' − 2α_μ M̄`, `M'' − 2α² M̄` and `(Y_+ − Y_−)'' − 2M̄`.
pub fn free_fall_residuals(
    rw: &RewriteSystem,
    obs: &ObservableSet,
    a: &AccelParams,
) -> Result<Vec<FreeFallResidual>, AlgebraError> {
    let m_bar = boost(rw, obs, &NCPoly::atom(Atom::M), a, 8)?.value;
    let second = |f: &NCPoly| -> Result<NCPoly, AlgebraError> {
        let d1 = rw.commutator(f, &m_bar)?;
        rw.commutator(&d1, &m_bar)
    };
    let mut out = Vec::new();
    for mu in 0..4 {
        let lhs = second(obs.y_at(HexaIndex::Mu(mu as u8)))?;
        let rhs = m_bar.scale(&GaussRational::real(a.lower(mu) * BigRational::from_integer(2.into())));
        out.push(FreeFallResidual {
            id: format!("Y_{mu}''"),
            residual: &lhs - &rhs,
        });
    }
    let lhs = second(&NCPoly::atom(Atom::M))?;
    let rhs = m_bar.scale(&GaussRational::real(a.alpha_sq() * BigRational::from_integer(2.into())));
    out.push(FreeFallResidual {
        id: "M''".into(),
        residual: &lhs - &rhs,
    });
    let lhs = second(&obs.y_diff())?;
    let rhs = m_bar.scale(&GaussRational::from_int(2));
    out.push(FreeFallResidual {
        id: "(Y_+ - Y_-)''".into(),
        residual: &lhs - &rhs,
    });
    Ok(out)
}

/// `1/Λ = 1 − 2α^μ X_μ + α²(X² + ¾ℏ² M⁻²)` in normal form.
pub fn inverse_lambda(rw: &RewriteSystem, obs: &ObservableSet, a: &AccelParams) -> Result<NCPoly, AlgebraError> {
    let mut p = classical_inverse_lambda(obs, a);
    p.add_assign(&super::spin_shift(2).scale(&GaussRational::real(a.alpha_sq())));
    rw.normalize(&p)
}

fn classical_inverse_lambda(obs: &ObservableSet, a: &AccelParams) -> NCPoly {
    let mut p = NCPoly::one();
    for mu in 0..4 {
        p.add_scaled(&obs.x[mu], &GaussRational::real(&a.alpha[mu] * BigRational::from_integer((-2).into())), 0);
    }
    p.add_scaled(&obs.x_sq, &GaussRational::real(a.alpha_sq()), 0);
    p
}

/// Normal form of the quantum `1/Λ` minus its expression with commuting
/// positions; the difference is the spin term `¾ℏ²α²M⁻²` alone.
pub fn lambda_spin_defect(rw: &RewriteSystem, obs: &ObservableSet, a: &AccelParams) -> Result<NCPoly, AlgebraError> {
    let quantum = inverse_lambda(rw, obs, a)?;
    let classical = classical_inverse_lambda(obs, a);
    Ok(&quantum - &classical)
}

/// `¾ ℏ² α² M⁻²`.
pub fn expected_lambda_defect(a: &AccelParams) -> NCPoly {
    super::spin_shift(2).scale_coeff(&Coefficient::new(GaussRational::real(a.alpha_sq()), 0))
}
