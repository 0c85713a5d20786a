//! Basis-B expressions of the conformal generators and the A → B map.

use crate::ncalg::{
    minv_pow, sym_product, AlgebraError, Atom, Basis, Coefficient, GaussRational, NCPoly,
    RewriteSystem,
};

use super::raise;

fn x(mu: u8) -> NCPoly {
    NCPoly::atom(Atom::X(mu))
}

fn p(mu: u8) -> NCPoly {
    NCPoly::atom(Atom::P(mu))
}

/// Coefficient of `ℏ² P_μ M⁻²` inside the special conformal generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpinShift {
    /// `C_μ = 2D·X_μ − P_μ·(X² − ¾ℏ²M⁻²) + 2X^ρ·S_{ρμ}`; closes the algebra.
    Closing,
    /// `C_μ = 2D·X_μ − P_μ·(X² + ¾ℏ²M⁻²) + 2X^ρ·S_{ρμ}`; leaves
    /// `(C_μ, C_ν) = 6ℏ²·(ε S P M⁻³ terms) ≠ 0`.
    Printed,
}

impl SpinShift {
    pub fn coefficient(self) -> GaussRational {
        match self {
            SpinShift::Closing => GaussRational::ratio(-3, 4),
            SpinShift::Printed => GaussRational::ratio(3, 4),
        }
    }
}

/// `D`, `J_{μν}`, `S_{μν}`, `X²` and `C_μ` written in basis B.
#[derive(Clone, Debug)]
pub struct BasisBComposites {
    pub d: NCPoly,
    pub j: [[NCPoly; 4]; 4],
    pub s_pair: [[NCPoly; 4]; 4],
    pub x_sq: NCPoly,
    pub c: [NCPoly; 4],
}

impl BasisBComposites {
    /// `C_μ` sums the symmetrized products `X_ρ·S_{ρμ}` pairwise before the
    /// sum over `ρ`.
    pub fn build(rw: &RewriteSystem) -> Result<Self, AlgebraError> {
        Self::build_with(rw, SpinShift::Closing)
    }

    pub fn build_with(rw: &RewriteSystem, shift: SpinShift) -> Result<Self, AlgebraError> {
        if rw.basis() != Basis::B {
            return Err(AlgebraError::Inconsistent("composites need basis B".into()));
        }
        let mut d = NCPoly::zero();
        for mu in 0..4u8 {
            d.add_scaled(&sym_product(&p(mu), &x(mu)), &GaussRational::from_int(raise(mu)), 0);
        }
        let d = rw.normalize(&d)?;
        let mut s_pair: [[NCPoly; 4]; 4] = Default::default();
        let mut j: [[NCPoly; 4]; 4] = Default::default();
        for mu in 0..4u8 {
            for nu in 0..4u8 {
                if mu == nu {
                    continue;
                }
                let s = rw.entry(Atom::S(mu), Atom::S(nu))?;
                let orbital = &sym_product(&p(mu), &x(nu)) - &sym_product(&p(nu), &x(mu));
                j[mu as usize][nu as usize] = &rw.normalize(&orbital)? + &s;
                s_pair[mu as usize][nu as usize] = s;
            }
        }
        let mut x_sq = NCPoly::zero();
        for rho in 0..4u8 {
            x_sq.add_scaled(&x(rho).mul_free(&x(rho)), &GaussRational::from_int(raise(rho)), 0);
        }
        let x_sq = rw.normalize(&x_sq)?;
        let shifted = &x_sq + &minv_pow(2).scale_coeff(&Coefficient::new(shift.coefficient(), 2));
        let mut c: [NCPoly; 4] = Default::default();
        for mu in 0..4u8 {
            let mut acc = rw.sym_product(&d, &x(mu))?.scale(&GaussRational::from_int(2));
            acc.sub_assign(&rw.sym_product(&p(mu), &shifted)?);
            for rho in 0..4u8 {
                if rho == mu {
                    continue;
                }
                let t = rw.sym_product(&x(rho), &s_pair[rho as usize][mu as usize])?;
                acc.add_scaled(&t, &GaussRational::from_int(2 * raise(rho)), 0);
            }
            c[mu as usize] = acc;
        }
        Ok(Self { d, j, s_pair, x_sq, c })
    }

    /// Basis-B image of a basis-A atom.
    pub fn image(&self, a: Atom) -> NCPoly {
        match a {
            Atom::D => self.d.clone(),
            Atom::J(m, n) => self.j[m as usize][n as usize].clone(),
            Atom::C(m) => self.c[m as usize].clone(),
            other => NCPoly::atom(other),
        }
    }
}

/// Substitutes the basis-B composites for `D`, `J` and `C` and normalizes.
pub fn translate_a_to_b(
    p: &NCPoly,
    comps: &BasisBComposites,
    rw_b: &RewriteSystem,
) -> Result<NCPoly, AlgebraError> {
    let mut out = NCPoly::zero();
    for (m, c) in p.terms() {
        let mut acc = NCPoly::term(Coefficient::new(c.clone(), m.hbar), Default::default());
        for &a in m.word.atoms() {
            if !a.in_basis(Basis::A) {
                return Err(AlgebraError::AtomNotInBasis(a, Basis::A));
            }
            acc = rw_b.product(&acc, &comps.image(a))?;
        }
        out.add_assign(&acc);
    }
    Ok(out)
}
