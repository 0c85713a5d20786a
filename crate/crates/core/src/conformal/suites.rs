use std::sync::Arc;
use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ncalg::{eta, AlgebraError, Atom, Basis, Coefficient, GaussRational, NCPoly, RewriteSystem, Word};
use crate::tables::{self, raise, SpinShift, TableError};

use super::motion::{
    boost, boosted_y_closed_form, expected_lambda_defect, free_fall_residuals, inertial_mass_closed_form,
    inverse_lambda, lambda_spin_defect, motion_derivative, AccelParams,
};
use super::{eta6, hexa_square, spin_square, HexaIndex, ObservableSet};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}; known: {1}")]
    UnknownSuite(String, String),
    #[error("no component {component:?} in suite {suite}")]
    UnknownComponent { suite: String, component: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Outcome of one component identity: `residual = normalize(lhs − rhs)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub id: String,
    pub residual: NCPoly,
    pub pass: bool,
    pub basis: Basis,
    pub time_ms: f64,
}

/// Suite ids with their default basis.
const SUITES: &[(&str, Basis)] = &[
    ("JJ", Basis::A),
    ("JY", Basis::B),
    ("YY", Basis::B),
    ("YYY", Basis::B),
    ("CM", Basis::B),
    ("CY", Basis::B),
    ("PX", Basis::A),
    ("DX", Basis::A),
    ("JX", Basis::A),
    ("XX", Basis::A),
    ("inverse", Basis::A),
    ("compat", Basis::A),
    ("S2", Basis::B),
    ("Y2", Basis::B),
    ("spinundemi", Basis::B),
    ("PM", Basis::B),
    ("PJD", Basis::B),
    ("PJDC", Basis::B),
    ("jacobi", Basis::B),
    ("nonassoc", Basis::B),
    ("leibniz", Basis::B),
    ("traY", Basis::B),
    ("d2Y", Basis::B),
    ("conservation", Basis::B),
    ("lambda", Basis::B),
    ("group_law", Basis::B),
];

/// All suite ids (`all` runs every one in its default basis).
pub fn suite_ids() -> Vec<&'static str> {
    SUITES.iter().map(|(s, _)| *s).collect()
}

pub fn default_basis(id: &str) -> Option<Basis> {
    SUITES.iter().find(|(s, _)| *s == id).map(|(_, b)| *b)
}

/// Acceleration parameters used by the transformation suites: zero, a
/// timelike and a spacelike vector, and `random` seeded rationals in
/// `[−1/2, 1/2]⁴`.
pub fn default_alphas(seed: u64, random: usize) -> Vec<AccelParams> {
    let mut out = vec![
        AccelParams::zero(),
        AccelParams::from_ratios([(1, 2), (0, 1), (0, 1), (0, 1)]),
        AccelParams::from_ratios([(0, 1), (1, 3), (0, 1), (0, 1)]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        out.push(AccelParams::new(std::array::from_fn(|_| {
            let den: i64 = rng.gen_range(1..=6);
            let num: i64 = rng.gen_range(-(den / 2)..=den / 2);
            BigRational::new(num.into(), den.into())
        })));
    }
    out
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Overrides each suite's default basis.
    pub basis: Option<Basis>,
    pub alphas: Vec<AccelParams>,
    pub seed: u64,
    pub shift: SpinShift,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            basis: None,
            alphas: default_alphas(11, 3),
            seed: 11,
            shift: SpinShift::Closing,
        }
    }
}

/// A rewrite system together with its composite observables.
pub struct SuiteContext {
    pub rw: Arc<RewriteSystem>,
    pub obs: ObservableSet,
    pub eps_sign: i64,
}

impl SuiteContext {
    pub fn new(basis: Basis, shift: SpinShift) -> Result<Self, SuiteError> {
        let eps_sign = tables::basis_b_table().map(|t| t.epsilon_sign).unwrap_or(1);
        let rw = tables::system(basis)?;
        let obs = match basis {
            Basis::A => ObservableSet::basis_a(&rw, eps_sign)?,
            Basis::B => ObservableSet::basis_b_with(&rw, shift)?,
        };
        Ok(SuiteContext { rw, obs, eps_sign })
    }
}

type Job<'a> = (String, Box<dyn Fn() -> Result<NCPoly, AlgebraError> + Send + Sync + 'a>);

fn job<'a>(id: String, f: impl Fn() -> Result<NCPoly, AlgebraError> + Send + Sync + 'a) -> Job<'a> {
    (id, Box::new(f))
}

fn int(n: i64) -> GaussRational {
    GaussRational::from_int(n)
}

fn hexa_pairs() -> Vec<(HexaIndex, HexaIndex)> {
    let mut v = Vec::new();
    for i in 0..6 {
        for j in i + 1..6 {
            v.push((HexaIndex::from_slot(i), HexaIndex::from_slot(j)));
        }
    }
    v
}

fn gen_label(a: HexaIndex, b: HexaIndex) -> String {
    format!("J_{}{}", a.label(), b.label())
}

/// Lorentz-type combination `η_{bc}A_{ad} + η_{ad}A_{bc} − η_{ac}A_{bd} − η_{bd}A_{ac}`.
fn so_rhs(
    g: &dyn Fn(HexaIndex, HexaIndex) -> NCPoly,
    a: HexaIndex,
    b: HexaIndex,
    c: HexaIndex,
    d: HexaIndex,
) -> NCPoly {
    let mut out = NCPoly::zero();
    for (k, x, y) in [
        (eta6(b, c), a, d),
        (eta6(a, d), b, c),
        (-eta6(a, c), b, d),
        (-eta6(b, d), a, c),
    ] {
        if k != 0 {
            out.add_scaled(&g(x, y), &int(k), 0);
        }
    }
    out
}

fn build_jobs<'a>(id: &str, ctx: &'a SuiteContext, cfg: &'a SuiteConfig) -> Result<Vec<Job<'a>>, SuiteError> {
    let rw = &*ctx.rw;
    let o = &ctx.obs;
    let mut jobs: Vec<Job<'a>> = Vec::new();
    let y = move |a: HexaIndex| o.y_at(a).clone();
    let jab = move |a: HexaIndex, b: HexaIndex| o.j_at(a, b).clone();
    match id {
        "JJ" => {
            let gens = hexa_pairs();
            for (i, &(a, b)) in gens.iter().enumerate() {
                for &(c, d) in &gens[i + 1..] {
                    jobs.push(job(format!("({},{})", gen_label(a, b), gen_label(c, d)), move || {
                        let lhs = rw.commutator(o.j_at(a, b), o.j_at(c, d))?;
                        Ok(&lhs - &rw.normalize(&so_rhs(&jab, a, b, c, d))?)
                    }));
                }
            }
        }
        "JY" => {
            for (a, b) in hexa_pairs() {
                for c in HexaIndex::ALL {
                    jobs.push(job(format!("({},Y_{})", gen_label(a, b), c.label()), move || {
                        let lhs = rw.commutator(o.j_at(a, b), o.y_at(c))?;
                        let mut rhs = NCPoly::zero();
                        rhs.add_scaled(&y(a), &int(eta6(b, c)), 0);
                        rhs.add_scaled(&y(b), &int(-eta6(a, c)), 0);
                        Ok(&lhs - &rhs)
                    }));
                }
            }
        }
        "YY" => {
            for (a, b) in hexa_pairs() {
                jobs.push(job(format!("(Y_{},Y_{})", a.label(), b.label()), move || {
                    let lhs = rw.commutator(o.y_at(a), o.y_at(b))?;
                    Ok(&lhs - &rw.normalize(o.j_at(a, b))?)
                }));
            }
        }
        "YYY" => {
            for a in HexaIndex::ALL {
                for b in HexaIndex::ALL {
                    for c in HexaIndex::ALL {
                        jobs.push(job(format!("((Y_{},Y_{}),Y_{})", a.label(), b.label(), c.label()), move || {
                            let inner = rw.commutator(o.y_at(a), o.y_at(b))?;
                            let lhs = rw.commutator(&inner, o.y_at(c))?;
                            let mut rhs = NCPoly::zero();
                            rhs.add_scaled(&y(a), &int(eta6(b, c)), 0);
                            rhs.add_scaled(&y(b), &int(-eta6(a, c)), 0);
                            Ok(&lhs - &rhs)
                        }));
                    }
                }
            }
        }
        "CM" => {
            for mu in 0..4 {
                jobs.push(job(format!("(C_{mu},M)"), move || {
                    let lhs = rw.commutator(&o.c[mu], &NCPoly::atom(Atom::M))?;
                    Ok(&lhs - &o.y[2 + mu].scale(&int(2)))
                }));
            }
        }
        "CY" => {
            for mu in 0..4 {
                for nu in 0..4 {
                    jobs.push(job(format!("(C_{mu},Y_{nu})"), move || {
                        let lhs = rw.commutator(&o.c[mu], &o.y[2 + nu])?;
                        Ok(&lhs - &o.y_diff().scale(&int(eta(mu as u8, nu as u8))))
                    }));
                }
                jobs.push(job(format!("(C_{mu},Y_+ - Y_-)"), move || rw.commutator(&o.c[mu], &o.y_diff())));
            }
        }
        "PX" => {
            for mu in 0..4u8 {
                for nu in 0..4u8 {
                    jobs.push(job(format!("(P_{mu},X_{nu})"), move || {
                        let lhs = rw.commutator(&o.p[mu as usize], &o.x[nu as usize])?;
                        Ok(&lhs + &NCPoly::int(eta(mu, nu)))
                    }));
                }
            }
        }
        "DX" => {
            for mu in 0..4 {
                jobs.push(job(format!("(D,X_{mu})"), move || {
                    let lhs = rw.commutator(&o.d, &o.x[mu])?;
                    Ok(&lhs + &o.x[mu])
                }));
            }
        }
        "JX" => {
            for m in 0..4u8 {
                for n in m + 1..4u8 {
                    for r in 0..4u8 {
                        jobs.push(job(format!("(J_{m}{n},X_{r})"), move || {
                            let lhs = rw.commutator(&o.j[m as usize][n as usize], &o.x[r as usize])?;
                            let mut rhs = NCPoly::zero();
                            rhs.add_scaled(&o.x[m as usize], &int(eta(n, r)), 0);
                            rhs.add_scaled(&o.x[n as usize], &int(-eta(m, r)), 0);
                            Ok(&lhs - &rhs)
                        }));
                    }
                }
            }
        }
        "XX" => {
            for m in 0..4 {
                for n in m + 1..4 {
                    jobs.push(job(format!("(X_{m},X_{n})"), move || {
                        let lhs = rw.commutator(&o.x[m], &o.x[n])?;
                        let rhs = rw.product(&o.s_pair[m][n], &crate::ncalg::minv_pow(2))?;
                        Ok(&lhs - &rhs)
                    }));
                }
            }
        }
        "inverse" => {
            jobs.push(job("D = P^mu.X_mu".into(), move || {
                let mut rhs = NCPoly::zero();
                for mu in 0..4 {
                    rhs.add_scaled(&rw.sym_product(&o.p[mu], &o.x[mu])?, &int(raise(mu as u8)), 0);
                }
                Ok(&rw.normalize(&o.d)? - &rhs)
            }));
            for m in 0..4 {
                for n in m + 1..4 {
                    jobs.push(job(format!("J_{m}{n} = P.X - P.X + S"), move || {
                        let mut rhs = rw.sym_product(&o.p[m], &o.x[n])?;
                        rhs.sub_assign(&rw.sym_product(&o.p[n], &o.x[m])?);
                        rhs.add_assign(&o.s_pair[m][n]);
                        Ok(&rw.normalize(&o.j[m][n])? - &rw.normalize(&rhs)?)
                    }));
                }
            }
        }
        "compat" => {
            for mu in 0..4 {
                jobs.push(job(format!("(C_{mu},M M) = (C_{mu},P^2)"), move || {
                    let m2 = rw.product(&NCPoly::atom(Atom::M), &NCPoly::atom(Atom::M))?;
                    let mut p2 = NCPoly::zero();
                    for nu in 0..4u8 {
                        p2.add_scaled(&NCPoly::atom(Atom::P(nu)).mul_free(&NCPoly::atom(Atom::P(nu))), &int(raise(nu)), 0);
                    }
                    Ok(&rw.commutator(&o.c[mu], &m2)? - &rw.commutator(&o.c[mu], &p2)?)
                }));
            }
        }
        "S2" => {
            jobs.push(job("S^2 = -3/4 hbar^2".into(), move || {
                let s2 = spin_square(rw, &o.s)?;
                Ok(&s2 + &NCPoly::term(Coefficient::new(GaussRational::ratio(3, 4), 2), Word::empty()))
            }));
            jobs.push(job("S.P = 0".into(), move || {
                let mut acc = NCPoly::zero();
                for mu in 0..4 {
                    acc.add_scaled(&rw.product(&o.s[mu], &o.p[mu])?, &int(raise(mu as u8)), 0);
                }
                Ok(acc)
            }));
        }
        "Y2" => {
            jobs.push(job("Y^2 = hbar^2".into(), move || {
                Ok(&hexa_square(rw, &o.y)? - &NCPoly::hbar(2))
            }));
        }
        "spinundemi" => {
            for m in 0..4u8 {
                for n in m..4u8 {
                    jobs.push(job(format!("S_{m}.S_{n}"), move || {
                        let lhs = rw.sym_product(&o.s[m as usize], &o.s[n as usize])?;
                        let mut rhs = NCPoly::term(Coefficient::new(GaussRational::ratio(-eta(m, n), 4), 2), Word::empty());
                        let ppm = rw.product_all(&[&o.p[m as usize], &o.p[n as usize], &crate::ncalg::minv_pow(2)])?;
                        rhs.add_scaled(&ppm, &GaussRational::ratio(1, 4), 2);
                        Ok(&lhs - &rhs)
                    }));
                }
            }
        }
        "PM" => {
            let m = NCPoly::atom(Atom::M);
            for mu in 0..4 {
                let m = m.clone();
                jobs.push(job(format!("(P_{mu},M)"), move || rw.commutator(&o.p[mu], &m)));
            }
            let m2 = m.clone();
            jobs.push(job("(D,M)".into(), move || Ok(&rw.commutator(&o.d, &m2)? - &m2)));
            for a in 0..4 {
                for b in a + 1..4 {
                    let m = m.clone();
                    jobs.push(job(format!("(J_{a}{b},M)"), move || rw.commutator(&o.j[a][b], &m)));
                }
            }
        }
        "PJD" => {
            for a in 0..4 {
                for b in a + 1..4 {
                    jobs.push(job(format!("(P_{a},P_{b})"), move || rw.commutator(&o.p[a], &o.p[b])));
                }
                jobs.push(job(format!("(D,P_{a})"), move || Ok(&rw.commutator(&o.d, &o.p[a])? - &o.p[a])));
            }
            for m in 0..4u8 {
                for n in m + 1..4u8 {
                    jobs.push(job(format!("(D,J_{m}{n})"), move || rw.commutator(&o.d, &o.j[m as usize][n as usize])));
                    for r in 0..4u8 {
                        jobs.push(job(format!("(J_{m}{n},P_{r})"), move || {
                            let lhs = rw.commutator(&o.j[m as usize][n as usize], &o.p[r as usize])?;
                            let mut rhs = NCPoly::zero();
                            rhs.add_scaled(&o.p[m as usize], &int(eta(n, r)), 0);
                            rhs.add_scaled(&o.p[n as usize], &int(-eta(m, r)), 0);
                            Ok(&lhs - &rhs)
                        }));
                    }
                }
            }
            let lorentz = move |a: HexaIndex, b: HexaIndex| match (a, b) {
                (HexaIndex::Mu(x), HexaIndex::Mu(z)) => o.j[x as usize][z as usize].clone(),
                _ => NCPoly::zero(),
            };
            let pairs: Vec<(u8, u8)> = (0..4u8).flat_map(|m| (m + 1..4u8).map(move |n| (m, n))).collect();
            for (i, &(m, n)) in pairs.iter().enumerate() {
                for &(r, s) in &pairs[i + 1..] {
                    jobs.push(job(format!("(J_{m}{n},J_{r}{s})"), move || {
                        let lhs = rw.commutator(&o.j[m as usize][n as usize], &o.j[r as usize][s as usize])?;
                        let (a, b, c, d) = (HexaIndex::Mu(m), HexaIndex::Mu(n), HexaIndex::Mu(r), HexaIndex::Mu(s));
                        Ok(&lhs - &rw.normalize(&so_rhs(&lorentz, a, b, c, d))?)
                    }));
                }
            }
        }
        "PJDC" => {
            for mu in 0..4 {
                jobs.push(job(format!("(D,C_{mu})"), move || Ok(&rw.commutator(&o.d, &o.c[mu])? + &o.c[mu])));
                for nu in 0..4u8 {
                    jobs.push(job(format!("(P_{mu},C_{nu})"), move || {
                        let lhs = rw.commutator(&o.p[mu], &o.c[nu as usize])?;
                        let mut rhs = NCPoly::zero();
                        rhs.add_scaled(&o.d, &int(-2 * eta(mu as u8, nu)), 0);
                        if mu as u8 != nu {
                            rhs.add_scaled(&o.j[mu][nu as usize], &int(-2), 0);
                        }
                        Ok(&lhs - &rw.normalize(&rhs)?)
                    }));
                }
                for nu in mu + 1..4 {
                    jobs.push(job(format!("(C_{mu},C_{nu})"), move || rw.commutator(&o.c[mu], &o.c[nu])));
                }
            }
            for m in 0..4u8 {
                for n in m + 1..4u8 {
                    for r in 0..4u8 {
                        jobs.push(job(format!("(J_{m}{n},C_{r})"), move || {
                            let lhs = rw.commutator(&o.j[m as usize][n as usize], &o.c[r as usize])?;
                            let mut rhs = NCPoly::zero();
                            rhs.add_scaled(&o.c[m as usize], &int(eta(n, r)), 0);
                            rhs.add_scaled(&o.c[n as usize], &int(-eta(m, r)), 0);
                            Ok(&lhs - &rw.normalize(&rhs)?)
                        }));
                    }
                }
            }
        }
        "jacobi" => {
            let atoms = Atom::all(rw.basis());
            let n = atoms.len();
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let (a, b, c) = (NCPoly::atom(atoms[i]), NCPoly::atom(atoms[j]), NCPoly::atom(atoms[k]));
                        jobs.push(job(format!("{},{},{}", atoms[i], atoms[j], atoms[k]), move || {
                            let mut acc = rw.commutator(&a, &rw.commutator(&b, &c)?)?;
                            acc.add_assign(&rw.commutator(&b, &rw.commutator(&c, &a)?)?);
                            acc.add_assign(&rw.commutator(&c, &rw.commutator(&a, &b)?)?);
                            Ok(acc)
                        }));
                    }
                }
            }
        }
        "nonassoc" => {
            let atoms = Atom::all(rw.basis());
            for &a in &atoms {
                for &b in &atoms {
                    for &c in &atoms {
                        let (pa, pb, pc) = (NCPoly::atom(a), NCPoly::atom(b), NCPoly::atom(c));
                        jobs.push(job(format!("{a},{b},{c}"), move || {
                            let left = rw.sym_product(&pa, &rw.sym_product(&pb, &pc)?)?;
                            let right = rw.sym_product(&rw.sym_product(&pa, &pb)?, &pc)?;
                            let defect = rw.commutator(&pb, &rw.commutator(&pa, &pc)?)?;
                            let expect = defect.scale_coeff(&Coefficient::new(GaussRational::ratio(1, 4), 2));
                            Ok(&(&left - &right) - &expect)
                        }));
                    }
                }
            }
        }
        "leibniz" => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let atoms = Atom::all(rw.basis());
            for (ai, a) in cfg.alphas.iter().enumerate() {
                for k in 0..3 {
                    let f = random_poly(&mut rng, &atoms);
                    let g = random_poly(&mut rng, &atoms);
                    jobs.push(job(format!("alpha#{ai} pair#{k}"), move || {
                        let fg = rw.product(&f, &g)?;
                        let lhs = motion_derivative(rw, o, &fg, a)?;
                        let mut rhs = rw.product(&motion_derivative(rw, o, &f, a)?, &g)?;
                        rhs.add_assign(&rw.product(&f, &motion_derivative(rw, o, &g, a)?)?);
                        Ok(&lhs - &rhs)
                    }));
                }
            }
        }
        "traY" => {
            for (ai, a) in cfg.alphas.iter().enumerate() {
                jobs.push(job(format!("alpha#{ai} M"), move || {
                    let r = boost(rw, o, &NCPoly::atom(Atom::M), a, 6)?;
                    let mut res = &r.value - &inertial_mass_closed_form(o, a);
                    if !r.terminated || r.order > 2 {
                        res.add_assign(&NCPoly::atom(Atom::M));
                    }
                    Ok(res)
                }));
                for mu in 0..4 {
                    jobs.push(job(format!("alpha#{ai} Y_{mu}"), move || {
                        let r = boost(rw, o, &o.y[2 + mu], a, 6)?;
                        Ok(&r.value - &boosted_y_closed_form(o, a, mu))
                    }));
                }
                jobs.push(job(format!("alpha#{ai} Y_+ - Y_-"), move || {
                    let r = boost(rw, o, &o.y_diff(), a, 6)?;
                    Ok(&r.value - &o.y_diff())
                }));
                jobs.push(job(format!("alpha#{ai} Ybar^2"), move || {
                    let z = o.y_diff();
                    let m_bar = boost(rw, o, &NCPoly::atom(Atom::M), a, 6)?.value;
                    let mut yb: [NCPoly; 6] = Default::default();
                    for mu in 0..4 {
                        yb[2 + mu] = boost(rw, o, &o.y[2 + mu], a, 6)?.value;
                    }
                    let half = GaussRational::ratio(1, 2);
                    yb[HexaIndex::Plus.slot()] = (&z - &m_bar).scale(&half);
                    yb[HexaIndex::Minus.slot()] = (&(-&m_bar) - &z).scale(&half);
                    Ok(&hexa_square(rw, &yb)? - &NCPoly::hbar(2))
                }));
            }
        }
        "d2Y" => {
            for (ai, a) in cfg.alphas.iter().enumerate() {
                for k in 0..6 {
                    jobs.push(job(format!("alpha#{ai} eq#{k}"), move || {
                        Ok(free_fall_residuals(rw, o, a)?.swap_remove(k).residual)
                    }));
                }
            }
        }
        "conservation" => {
            for (ai, a) in cfg.alphas.iter().enumerate() {
                for mu in 0..4 {
                    jobs.push(job(format!("alpha#{ai} Pbar_{mu}'"), move || {
                        let pb = boost(rw, o, &o.p[mu], a, 6)?.value;
                        motion_derivative(rw, o, &pb, a)
                    }));
                    jobs.push(job(format!("alpha#{ai} Ybar_{mu}' = Pbar_{mu}"), move || {
                        let yb = boost(rw, o, &o.y[2 + mu], a, 6)?.value;
                        let pb = boost(rw, o, &o.p[mu], a, 6)?.value;
                        Ok(&motion_derivative(rw, o, &yb, a)? - &pb)
                    }));
                }
                for m in 0..4 {
                    for n in m + 1..4 {
                        jobs.push(job(format!("alpha#{ai} Jbar_{m}{n}'"), move || {
                            let jb = boost(rw, o, &o.j[m][n], a, 6)?.value;
                            motion_derivative(rw, o, &jb, a)
                        }));
                    }
                }
            }
        }
        "lambda" => {
            for (ai, a) in cfg.alphas.iter().enumerate() {
                jobs.push(job(format!("alpha#{ai} Mbar = M.(1/Lambda)"), move || {
                    let m_bar = boost(rw, o, &NCPoly::atom(Atom::M), a, 6)?.value;
                    let inv = inverse_lambda(rw, o, a)?;
                    Ok(&m_bar - &rw.sym_product(&NCPoly::atom(Atom::M), &inv)?)
                }));
                jobs.push(job(format!("alpha#{ai} spin defect"), move || {
                    Ok(&lambda_spin_defect(rw, o, a)? - &expected_lambda_defect(a))
                }));
            }
        }
        "group_law" => {
            let alphas = &cfg.alphas;
            for i in 0..alphas.len() {
                let j = (i + 1) % alphas.len();
                let (a, b) = (&alphas[i], &alphas[j]);
                let targets: Vec<(String, NCPoly)> = std::iter::once(("M".to_string(), NCPoly::atom(Atom::M)))
                    .chain(HexaIndex::ALL.iter().map(|&h| (format!("Y_{}", h.label()), o.y_at(h).clone())))
                    .collect();
                for (name, t) in targets {
                    jobs.push(job(format!("alpha#{i}+alpha#{j} {name}"), move || {
                        let once = boost(rw, o, &t, a, 6)?.value;
                        let twice = boost(rw, o, &once, b, 6)?.value;
                        let direct = boost(rw, o, &t, &a.add(b), 6)?.value;
                        let back = boost(rw, o, &once, &a.neg(), 6)?.value;
                        let mut res = &twice - &direct;
                        res.add_assign(&(&back - &rw.normalize(&t)?));
                        Ok(res)
                    }));
                }
            }
        }
        _ => {
            return Err(SuiteError::UnknownSuite(id.into(), suite_ids().join(", ")));
        }
    }
    Ok(jobs)
}

/// Small random polynomial: up to three words of up to three atoms.
fn random_poly(rng: &mut ChaCha8Rng, atoms: &[Atom]) -> NCPoly {
    let mut p = NCPoly::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let len = rng.gen_range(1..=3);
        let w: Vec<Atom> = (0..len).map(|_| atoms[rng.gen_range(0..atoms.len())]).collect();
        let c = GaussRational::ratio(rng.gen_range(-3..=3i64).max(1), rng.gen_range(1..=3));
        p.add_term(Word::from_atoms(&w), 0, c);
    }
    p
}

fn run_jobs(jobs: Vec<Job<'_>>, rw: &RewriteSystem, basis: Basis) -> Result<Vec<IdentityReport>, SuiteError> {
    jobs.into_par_iter()
        .map(|(id, f)| {
            let t = Instant::now();
            let raw = f()?;
            let residual = rw.normalize(&raw)?;
            Ok(IdentityReport {
                id,
                pass: residual.is_zero(),
                residual,
                basis,
                time_ms: t.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect()
}

/// Runs every component of a suite. Reports keep the enumeration order.
pub fn verify_suite(id: &str, cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    if id == "all" {
        let mut out = Vec::new();
        for s in suite_ids() {
            let mut sub = verify_suite(s, cfg)?;
            for r in sub.iter_mut() {
                r.id = format!("{s}:{}", r.id);
            }
            out.extend(sub);
        }
        return Ok(out);
    }
    let basis = cfg
        .basis
        .or_else(|| default_basis(id))
        .ok_or_else(|| SuiteError::UnknownSuite(id.into(), suite_ids().join(", ")))?;
    let ctx = SuiteContext::new(basis, cfg.shift)?;
    verify_suite_in(id, &ctx, cfg)
}

/// As [`verify_suite`], over an already-built context.
pub fn verify_suite_in(id: &str, ctx: &SuiteContext, cfg: &SuiteConfig) -> Result<Vec<IdentityReport>, SuiteError> {
    let jobs = build_jobs(id, ctx, cfg)?;
    run_jobs(jobs, &ctx.rw, ctx.rw.basis())
}

/// One named component of a suite.
pub fn verify_identity(suite: &str, component: &str, cfg: &SuiteConfig) -> Result<IdentityReport, SuiteError> {
    let basis = cfg
        .basis
        .or_else(|| default_basis(suite))
        .ok_or_else(|| SuiteError::UnknownSuite(suite.into(), suite_ids().join(", ")))?;
    let ctx = SuiteContext::new(basis, cfg.shift)?;
    let jobs: Vec<Job<'_>> = build_jobs(suite, &ctx, cfg)?
        .into_iter()
        .filter(|(id, _)| id == component)
        .collect();
    if jobs.is_empty() {
        return Err(SuiteError::UnknownComponent {
            suite: suite.into(),
            component: component.into(),
        });
    }
    Ok(run_jobs(jobs, &ctx.rw, basis)?.remove(0))
}
