//! Composite observables, identity suites, finite transformations to
//! accelerated frames, and the quantum law of free fall.

mod motion;
mod suites;

pub use motion::{
    boost, boosted_y_closed_form, decompose_hexa, expected_lambda_defect, free_fall_residuals,
    inertial_mass_closed_form, inverse_lambda, lambda_spin_defect, motion_derivative, AccelParams,
    BoostResult, FreeFallResidual, HexaCombination,
};
pub use suites::{
    default_alphas, default_basis, suite_ids, verify_identity, verify_suite, verify_suite_in, IdentityReport,
    SuiteConfig, SuiteContext,
    SuiteError,
};

use crate::ncalg::{
    eta, levi_civita, minv_pow, sym_product, AlgebraError, Atom, Basis, Coefficient,
    GaussRational, NCPoly, RewriteSystem,
};
use crate::tables::{j_poly, raise, BasisBComposites, SpinShift};

fn atom(a: Atom) -> NCPoly {
    NCPoly::atom(a)
}

fn int(n: i64) -> GaussRational {
    GaussRational::from_int(n)
}

/// Index set of the six-dimensional space, ordered `(−, +, 0, 1, 2, 3)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum HexaIndex {
    Minus,
    Plus,
    Mu(u8),
}

impl HexaIndex {
    pub const ALL: [HexaIndex; 6] = [
        HexaIndex::Minus,
        HexaIndex::Plus,
        HexaIndex::Mu(0),
        HexaIndex::Mu(1),
        HexaIndex::Mu(2),
        HexaIndex::Mu(3),
    ];

    pub fn slot(self) -> usize {
        match self {
            HexaIndex::Minus => 0,
            HexaIndex::Plus => 1,
            HexaIndex::Mu(m) => 2 + m as usize,
        }
    }

    pub fn from_slot(i: usize) -> HexaIndex {
        HexaIndex::ALL[i]
    }

    pub fn label(self) -> String {
        match self {
            HexaIndex::Minus => "-".into(),
            HexaIndex::Plus => "+".into(),
            HexaIndex::Mu(m) => m.to_string(),
        }
    }
}

/// Six-dimensional metric `diag(−1, 1, 1, −1, −1, −1)`.
pub fn eta6(a: HexaIndex, b: HexaIndex) -> i64 {
    if a != b {
        return 0;
    }
    match a {
        HexaIndex::Minus => -1,
        HexaIndex::Plus => 1,
        HexaIndex::Mu(m) => eta(m, m),
    }
}

/// Pauli-Lubanski vector `S_μ = −½ ε_{μνρσ} J^{νρ} P^σ M⁻¹` over basis-A atoms.
pub fn spin_vector_from_generators(
    rw: &RewriteSystem,
    eps_sign: i64,
) -> Result<[NCPoly; 4], AlgebraError> {
    let mut out: [NCPoly; 4] = Default::default();
    for mu in 0..4u8 {
        let mut acc = NCPoly::zero();
        for nu in 0..4u8 {
            for rho in 0..4u8 {
                for sigma in 0..4u8 {
                    let e = levi_civita([mu, nu, rho, sigma], eps_sign);
                    if e == 0 {
                        continue;
                    }
                    let sign = e * raise(nu) * raise(rho) * raise(sigma);
                    let t = j_poly(nu, rho)
                        .mul_free(&atom(Atom::P(sigma)))
                        .mul_free(&minv_pow(1));
                    acc.add_scaled(&t, &GaussRational::ratio(-sign, 2), 0);
                }
            }
        }
        out[mu as usize] = rw.normalize(&acc)?;
    }
    Ok(out)
}

/// Position `X_μ = (P_μ M⁻²)·D + (P^ρ M⁻²)·J_{ρμ}` over basis-A atoms.
pub fn position_from_generators(rw: &RewriteSystem) -> Result<[NCPoly; 4], AlgebraError> {
    let m2 = minv_pow(2);
    let mut out: [NCPoly; 4] = Default::default();
    for mu in 0..4u8 {
        let pm = atom(Atom::P(mu)).mul_free(&m2);
        let mut acc = sym_product(&pm, &atom(Atom::D));
        for rho in 0..4u8 {
            if rho == mu {
                continue;
            }
            let pr = atom(Atom::P(rho)).mul_free(&m2);
            acc.add_scaled(&sym_product(&pr, &j_poly(rho, mu)), &int(raise(rho)), 0);
        }
        out[mu as usize] = rw.normalize(&acc)?;
    }
    Ok(out)
}

/// `Y_μ = M·X_μ` over basis-A atoms.
pub fn hexa_vector_from_generators(rw: &RewriteSystem) -> Result<[NCPoly; 4], AlgebraError> {
    let x = position_from_generators(rw)?;
    let m = atom(Atom::M);
    let mut out: [NCPoly; 4] = Default::default();
    for mu in 0..4 {
        out[mu] = rw.sym_product(&m, &x[mu])?;
    }
    Ok(out)
}

/// `¾ ℏ² M^{-k}`.
pub fn spin_shift(k: u32) -> NCPoly {
    minv_pow(k).scale_coeff(&Coefficient::new(GaussRational::ratio(3, 4), 2))
}

/// All composite observables of one basis.
#[derive(Clone, Debug)]
pub struct ObservableSet {
    pub basis: Basis,
    pub p: [NCPoly; 4],
    pub s: [NCPoly; 4],
    pub s_pair: [[NCPoly; 4]; 4],
    pub x: [NCPoly; 4],
    /// `η^{μν} X_μ X_ν`.
    pub x_sq: NCPoly,
    pub d: NCPoly,
    pub j: [[NCPoly; 4]; 4],
    pub c: [NCPoly; 4],
    /// `Y_a` indexed by [`HexaIndex::slot`].
    pub y: [NCPoly; 6],
    /// Packaged generators `J_{ab}`, antisymmetric.
    pub jab: [[NCPoly; 6]; 6],
}

impl ObservableSet {
    /// Builds every composite in basis B.
    pub fn basis_b(rw: &RewriteSystem) -> Result<Self, AlgebraError> {
        Self::basis_b_with(rw, SpinShift::Closing)
    }

    /// Basis-B composites with a chosen `ℏ²` term in `C_μ`.
    pub fn basis_b_with(rw: &RewriteSystem, shift: SpinShift) -> Result<Self, AlgebraError> {
        let comps = BasisBComposites::build_with(rw, shift)?;
        let p = std::array::from_fn(|m| atom(Atom::P(m as u8)));
        let s = std::array::from_fn(|m| atom(Atom::S(m as u8)));
        let x: [NCPoly; 4] = std::array::from_fn(|m| atom(Atom::X(m as u8)));
        let m = atom(Atom::M);
        let mut y: [NCPoly; 6] = Default::default();
        for mu in 0..4 {
            y[2 + mu] = rw.sym_product(&m, &x[mu])?;
        }
        let z = &rw.sym_product(&m, &comps.x_sq)? + &spin_shift(1);
        y[HexaIndex::Plus.slot()] = (&z - &m).scale(&GaussRational::ratio(1, 2));
        y[HexaIndex::Minus.slot()] = (&(-&m) - &z).scale(&GaussRational::ratio(1, 2));
        let jab = package_so42(&p, &comps.d, &comps.j, &comps.c);
        Ok(Self {
            basis: Basis::B,
            p,
            s,
            s_pair: comps.s_pair,
            x,
            x_sq: comps.x_sq,
            d: comps.d,
            j: comps.j,
            c: comps.c,
            y,
            jab,
        })
    }

    /// Builds the composites available in basis A (spin and position from
    /// the generators; `Y_±` from `M` and `X²`).
    pub fn basis_a(rw: &RewriteSystem, eps_sign: i64) -> Result<Self, AlgebraError> {
        let p = std::array::from_fn(|m| atom(Atom::P(m as u8)));
        let s = spin_vector_from_generators(rw, eps_sign)?;
        let mut s_pair: [[NCPoly; 4]; 4] = Default::default();
        for mu in 0..4 {
            for nu in 0..4 {
                if mu != nu {
                    s_pair[mu][nu] = rw.commutator(&s[mu], &s[nu])?;
                }
            }
        }
        let x = position_from_generators(rw)?;
        let d = atom(Atom::D);
        let j = std::array::from_fn(|mu| std::array::from_fn(|nu| j_poly(mu as u8, nu as u8)));
        let c = std::array::from_fn(|m| atom(Atom::C(m as u8)));
        let m = atom(Atom::M);
        let mut y: [NCPoly; 6] = Default::default();
        let mut x_sq = NCPoly::zero();
        for mu in 0..4 {
            y[2 + mu] = rw.sym_product(&m, &x[mu])?;
            x_sq.add_scaled(&rw.product(&x[mu], &x[mu])?, &int(raise(mu as u8)), 0);
        }
        let z = &rw.sym_product(&m, &x_sq)? + &spin_shift(1);
        y[HexaIndex::Plus.slot()] = (&z - &m).scale(&GaussRational::ratio(1, 2));
        y[HexaIndex::Minus.slot()] = (&(-&m) - &z).scale(&GaussRational::ratio(1, 2));
        let jab = package_so42(&p, &d, &j, &c);
        Ok(Self {
            basis: Basis::A,
            p,
            s,
            s_pair,
            x,
            x_sq,
            d,
            j,
            c,
            y,
            jab,
        })
    }

    pub fn y_at(&self, a: HexaIndex) -> &NCPoly {
        &self.y[a.slot()]
    }

    pub fn j_at(&self, a: HexaIndex, b: HexaIndex) -> &NCPoly {
        &self.jab[a.slot()][b.slot()]
    }

    /// `Y_+ − Y_−`.
    pub fn y_diff(&self) -> NCPoly {
        &self.y[HexaIndex::Plus.slot()] - &self.y[HexaIndex::Minus.slot()]
    }
}

/// `J_{+μ} = (P_μ + C_μ)/2`, `J_{−μ} = (P_μ − C_μ)/2`, `J_{−+} = D`,
/// Lorentz block unchanged, completed antisymmetrically.
pub fn package_so42(
    p: &[NCPoly; 4],
    d: &NCPoly,
    j: &[[NCPoly; 4]; 4],
    c: &[NCPoly; 4],
) -> [[NCPoly; 6]; 6] {
    let half = GaussRational::ratio(1, 2);
    let mut out: [[NCPoly; 6]; 6] = Default::default();
    let (mi, pl) = (HexaIndex::Minus.slot(), HexaIndex::Plus.slot());
    out[mi][pl] = d.clone();
    out[pl][mi] = -d;
    for mu in 0..4 {
        let plus = (&p[mu] + &c[mu]).scale(&half);
        let minus = (&p[mu] - &c[mu]).scale(&half);
        out[pl][2 + mu] = plus.clone();
        out[2 + mu][pl] = -&plus;
        out[mi][2 + mu] = minus.clone();
        out[2 + mu][mi] = -&minus;
        for nu in 0..4 {
            out[2 + mu][2 + nu] = j[mu][nu].clone();
        }
    }
    out
}

/// `η^{ab} Y_a Y_b`.
pub fn hexa_square(rw: &RewriteSystem, y: &[NCPoly; 6]) -> Result<NCPoly, AlgebraError> {
    let mut out = NCPoly::zero();
    for a in HexaIndex::ALL {
        let ya = &y[a.slot()];
        out.add_scaled(&rw.product(ya, ya)?, &int(eta6(a, a)), 0);
    }
    Ok(out)
}

/// `η^{μν} S_μ S_ν`.
pub fn spin_square(rw: &RewriteSystem, s: &[NCPoly; 4]) -> Result<NCPoly, AlgebraError> {
    let mut out = NCPoly::zero();
    for mu in 0..4u8 {
        let sm = &s[mu as usize];
        out.add_scaled(&rw.product(sm, sm)?, &int(raise(mu)), 0);
    }
    Ok(out)
}
