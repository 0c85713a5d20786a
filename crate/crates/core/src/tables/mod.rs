//! Bracket tables for the two generating sets, their constraint rules,
//! the translation between them, and the fitted entries of basis B.
//!
//! Every rule decreases the lexicographic measure
//! (#C, #D, #X, #S, P₀-degree beyond 1, P₀S₀ pattern count, inversions):
//! a swap `xa → ax + iℏ(x,a)` removes one inversion and the bracket term
//! is lower in a leading component or shorter; `M M⁻¹ → 1` shortens;
//! `P₀P₀ → M² + Σ Pᵢ²` lowers the P₀-degree; `S_μS_ν →` (ℏ-terms) lowers #S;
//! `P₀S₀ → Σ PᵢSᵢ` and `P₃P₃S₀ → Σ P₀PᵢSᵢ − (M²+P₁²+P₂²)S₀` remove the S₀
//! pattern (the second trades an S₀ for S₁..S₃ or keeps S₀ with fewer P₃).

mod fit;
mod manifest;
mod translate;

pub use fit::{
    derived_candidates, derived_pairs, fit_derived_entry, snap_fit, snap_rational, AnsatzFit, FitError, FitOracle,
    MAX_DENOMINATOR, SNAP_TOLERANCE,
};
pub use manifest::{Manifest, ManifestEntry, ManifestError, PolyDoc, MANIFEST_VERSION};
pub use translate::{translate_a_to_b, BasisBComposites, SpinShift};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal;
use crate::ncalg::{
    eta, levi_civita, m_pow, minv_pow, AlgebraError, Atom, Basis, ConstraintRule, GaussRational,
    NCPoly, RewriteSystem, Word,
};

/// Where a table entry comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// A defining relation of the algebra, named by the relation.
    Axiom(String),
    /// Pinned by a least-squares fit against the grid oracle.
    Fitted(String),
    /// Implied algebraically by other entries.
    Induced(String),
    Trivial,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Axiom(s) => write!(f, "axiom:{s}"),
            Provenance::Fitted(s) => write!(f, "fitted:{s}"),
            Provenance::Induced(s) => write!(f, "induced:{s}"),
            Provenance::Trivial => f.write_str("trivial"),
        }
    }
}

impl FromStr for Provenance {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "trivial" {
            return Ok(Provenance::Trivial);
        }
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("bad provenance {s:?}"))?;
        let rest = rest.to_string();
        match kind {
            "axiom" => Ok(Provenance::Axiom(rest)),
            "fitted" => Ok(Provenance::Fitted(rest)),
            "induced" => Ok(Provenance::Induced(rest)),
            _ => Err(format!("bad provenance {s:?}")),
        }
    }
}

impl Serialize for Provenance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Provenance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One bracket `(left, right)` with `left > right` in atom rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub left: Atom,
    pub right: Atom,
    pub bracket: NCPoly,
    pub provenance: Provenance,
}

/// A rewrite system together with the provenance of each entry.
#[derive(Clone)]
pub struct BasisTable {
    pub system: Arc<RewriteSystem>,
    pub entries: Vec<TableEntry>,
    pub epsilon_sign: i64,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

fn atom(a: Atom) -> NCPoly {
    NCPoly::atom(a)
}

fn word(atoms: &[Atom]) -> NCPoly {
    NCPoly::word(Word::from_atoms(atoms))
}

fn int(n: i64) -> GaussRational {
    GaussRational::from_int(n)
}

/// `J_{μν}` as a polynomial, zero on the diagonal.
pub fn j_poly(mu: u8, nu: u8) -> NCPoly {
    if mu == nu {
        NCPoly::zero()
    } else {
        NCPoly::j(mu, nu).expect("indices below 4")
    }
}

/// Raised-index sign `η^{μμ}`.
pub fn raise(mu: u8) -> i64 {
    eta(mu, mu)
}

/// `(J_{μν}, J_{ρσ})` from the Lorentz algebra.
pub fn lorentz_jj(mu: u8, nu: u8, rho: u8, sigma: u8) -> NCPoly {
    let mut out = NCPoly::zero();
    out.add_scaled(&j_poly(mu, sigma), &int(eta(nu, rho)), 0);
    out.add_scaled(&j_poly(nu, rho), &int(eta(mu, sigma)), 0);
    out.add_scaled(&j_poly(nu, sigma), &int(-eta(mu, rho)), 0);
    out.add_scaled(&j_poly(mu, rho), &int(-eta(nu, sigma)), 0);
    out
}

fn m_rules() -> Vec<ConstraintRule> {
    let mut mass_shell = m_pow(2);
    for i in 1..4 {
        mass_shell.add_assign(&word(&[Atom::P(i), Atom::P(i)]));
    }
    vec![
        ConstraintRule {
            name: "mass-inverse".into(),
            pattern: Word::from_atoms(&[Atom::Minv, Atom::M]),
            replacement: NCPoly::one(),
        },
        ConstraintRule {
            name: "mass-shell".into(),
            pattern: Word::from_atoms(&[Atom::P(0), Atom::P(0)]),
            replacement: mass_shell,
        },
    ]
}

fn insert(
    table: &mut HashMap<(Atom, Atom), NCPoly>,
    entries: &mut Vec<TableEntry>,
    left: Atom,
    right: Atom,
    bracket: NCPoly,
    provenance: Provenance,
) {
    assert!(left > right, "entries are stored with left > right");
    table.insert((left, right), bracket.clone());
    entries.push(TableEntry {
        left,
        right,
        bracket,
        provenance,
    });
}

fn axiom(s: &str) -> Provenance {
    Provenance::Axiom(s.to_string())
}

fn induced(s: &str) -> Provenance {
    Provenance::Induced(s.to_string())
}

/// Basis A entries; `cm` holds `(C_μ, M)` once it is known.
fn basis_a_raw(cm: Option<&[NCPoly; 4]>) -> (HashMap<(Atom, Atom), NCPoly>, Vec<TableEntry>) {
    let mut table = HashMap::new();
    let mut entries = Vec::new();
    let atoms = Atom::all(Basis::A);
    for (i, &r) in atoms.iter().enumerate() {
        for &l in &atoms[i + 1..] {
            let (bracket, prov) = match (l, r) {
                (Atom::M, Atom::Minv) => (NCPoly::zero(), Provenance::Trivial),
                (Atom::P(_), Atom::M) | (Atom::J(..), Atom::M) => {
                    (NCPoly::zero(), axiom("mass-poincare-invariant"))
                }
                (Atom::P(_), Atom::Minv) | (Atom::J(..), Atom::Minv) => {
                    (NCPoly::zero(), induced("inverse-mass"))
                }
                (Atom::P(_), Atom::P(_)) => (NCPoly::zero(), axiom("translations-commute")),
                (Atom::J(m, n), Atom::P(rho)) => {
                    let mut b = NCPoly::zero();
                    b.add_scaled(&atom(Atom::P(m)), &int(eta(n, rho)), 0);
                    b.add_scaled(&atom(Atom::P(n)), &int(-eta(m, rho)), 0);
                    (b, axiom("lorentz-momentum"))
                }
                (Atom::J(m, n), Atom::J(rho, s)) => (lorentz_jj(m, n, rho, s), axiom("lorentz-algebra")),
                (Atom::D, Atom::M) => (atom(Atom::M), axiom("mass-dilatation-weight")),
                (Atom::D, Atom::Minv) => (-&atom(Atom::Minv), induced("inverse-mass")),
                (Atom::D, Atom::P(m)) => (atom(Atom::P(m)), axiom("dilatation-momentum")),
                (Atom::D, Atom::J(..)) => (NCPoly::zero(), axiom("dilatation-lorentz")),
                (Atom::C(mu), Atom::M) => match cm {
                    Some(v) => (v[mu as usize].clone(), axiom("special-conformal-mass")),
                    None => (NCPoly::zero(), Provenance::Trivial),
                },
                (Atom::C(_), Atom::Minv) => (NCPoly::zero(), induced("inverse-mass")),
                (Atom::C(nu), Atom::P(mu)) => {
                    let mut b = j_poly(mu, nu).scale(&int(2));
                    if mu == nu {
                        b.add_scaled(&atom(Atom::D), &int(2 * eta(mu, nu)), 0);
                    }
                    (b, axiom("special-conformal-momentum"))
                }
                (Atom::C(rho), Atom::J(m, n)) => {
                    let mut b = NCPoly::zero();
                    b.add_scaled(&atom(Atom::C(m)), &int(-eta(n, rho)), 0);
                    b.add_scaled(&atom(Atom::C(n)), &int(eta(m, rho)), 0);
                    (b, axiom("special-conformal-lorentz"))
                }
                (Atom::C(mu), Atom::D) => (atom(Atom::C(mu)), axiom("special-conformal-dilatation")),
                (Atom::C(_), Atom::C(_)) => (NCPoly::zero(), axiom("special-conformal-commute")),
                _ => unreachable!("pair ({l}, {r}) is not ordered within basis A"),
            };
            insert(&mut table, &mut entries, l, r, bracket, prov);
        }
    }
    (table, entries)
}

fn build_basis_a() -> Result<BasisTable, AlgebraError> {
    let (table, _) = basis_a_raw(None);
    let stage = RewriteSystem::new(Basis::A, table, m_rules())?;
    let y = conformal::hexa_vector_from_generators(&stage)?;
    let cm: [NCPoly; 4] = std::array::from_fn(|mu| y[mu].scale(&int(2)));
    let (mut table, mut entries) = basis_a_raw(Some(&cm));
    let stage = RewriteSystem::new(Basis::A, table.clone(), m_rules())?;
    let minv = minv_pow(1);
    for mu in 0..4u8 {
        let b = stage.product_all(&[&minv, &cm[mu as usize], &minv])?;
        let b = -&b;
        table.insert((Atom::C(mu), Atom::Minv), b.clone());
        if let Some(e) = entries
            .iter_mut()
            .find(|e| e.left == Atom::C(mu) && e.right == Atom::Minv)
        {
            e.bracket = b;
        }
    }
    let system = RewriteSystem::new(Basis::A, table, m_rules())?;
    Ok(BasisTable {
        system: Arc::new(system),
        entries,
        epsilon_sign: 1,
    })
}

/// The table over `{P, J, D, C, M, M⁻¹}`, built once.
pub fn basis_a_table() -> &'static BasisTable {
    static CELL: OnceLock<BasisTable> = OnceLock::new();
    CELL.get_or_init(|| build_basis_a().expect("basis A tables are well formed"))
}

pub fn basis_a() -> Arc<RewriteSystem> {
    basis_a_table().system.clone()
}

/// `ε_{μνρσ} S^ρ P^σ M^{-k}` with the given orientation sign.
pub fn eps_spin_momentum(mu: u8, nu: u8, minv: u32, eps_sign: i64) -> NCPoly {
    let mut out = NCPoly::zero();
    for rho in 0..4u8 {
        for sigma in 0..4u8 {
            let e = levi_civita([mu, nu, rho, sigma], eps_sign);
            if e == 0 {
                continue;
            }
            let mut w = vec![Atom::P(sigma), Atom::S(rho)];
            w.extend(std::iter::repeat(Atom::Minv).take(minv as usize));
            w.sort();
            out.add_scaled(&word(&w), &int(e * raise(rho) * raise(sigma)), 0);
        }
    }
    out
}

fn b_rules(ss: &HashMap<(u8, u8), NCPoly>) -> Vec<ConstraintRule> {
    let mut rules = m_rules();
    for mu in 0..4u8 {
        for nu in mu..4u8 {
            let mut rep = NCPoly::zero();
            let quarter = GaussRational::ratio(-1, 4);
            rep.add_scaled(&NCPoly::one(), &quarter.scale(&BigRational::from_integer(eta(mu, nu).into())), 2);
            let ppm = word(&[Atom::Minv, Atom::Minv, Atom::P(mu), Atom::P(nu)]);
            rep.add_scaled(&ppm, &GaussRational::ratio(1, 4), 2);
            if mu != nu {
                let half_i = GaussRational::i().scale(&BigRational::new(1.into(), 2.into()));
                rep.add_scaled(&ss[&(mu, nu)], &half_i, 1);
            }
            rules.push(ConstraintRule {
                name: format!("spin-half S_{mu} S_{nu}"),
                pattern: Word::from_atoms(&[Atom::S(mu), Atom::S(nu)]),
                replacement: rep,
            });
        }
    }
    let mut trans = NCPoly::zero();
    for i in 1..4 {
        trans.add_assign(&word(&[Atom::P(i), Atom::S(i)]));
    }
    rules.push(ConstraintRule {
        name: "transversality".into(),
        pattern: Word::from_atoms(&[Atom::P(0), Atom::S(0)]),
        replacement: trans,
    });
    let mut completion = NCPoly::zero();
    for i in 1..4 {
        completion.add_assign(&word(&[Atom::P(0), Atom::P(i), Atom::S(i)]));
    }
    completion.sub_assign(&word(&[Atom::M, Atom::M, Atom::S(0)]));
    for i in 1..3 {
        completion.sub_assign(&word(&[Atom::P(i), Atom::P(i), Atom::S(0)]));
    }
    rules.push(ConstraintRule {
        name: "transversality-completion".into(),
        pattern: Word::from_atoms(&[Atom::P(3), Atom::P(3), Atom::S(0)]),
        replacement: completion,
    });
    rules
}

/// Builds basis B from a complete list of entries (as stored in a manifest).
///
/// Entry values are normalized against the finished system, which only
/// involves the commuting atoms `M±, P, S`.
pub fn basis_b_from_entries(
    entries: Vec<TableEntry>,
    epsilon_sign: i64,
) -> Result<BasisTable, TableError> {
    let mut table = HashMap::new();
    for e in &entries {
        table.insert((e.left, e.right), e.bracket.clone());
    }
    let atoms = Atom::all(Basis::B);
    for (i, &r) in atoms.iter().enumerate() {
        for &l in &atoms[i + 1..] {
            if !table.contains_key(&(l, r)) {
                return Err(ManifestError::MissingEntry(format!("({l}, {r})")).into());
            }
        }
    }
    let mut ss = HashMap::new();
    for mu in 0..4u8 {
        for nu in mu + 1..4u8 {
            ss.insert((mu, nu), -&table[&(Atom::S(nu), Atom::S(mu))]);
        }
    }
    let raw = RewriteSystem::new(Basis::B, table.clone(), b_rules(&ss))?;
    let mut normal = HashMap::new();
    let mut out_entries = Vec::with_capacity(entries.len());
    for e in entries {
        let b = raw.normalize(&e.bracket)?;
        normal.insert((e.left, e.right), b.clone());
        out_entries.push(TableEntry { bracket: b, ..e });
    }
    for v in ss.values_mut() {
        *v = raw.normalize(v)?;
    }
    let system = RewriteSystem::new(Basis::B, normal, b_rules(&ss))?;
    out_entries.sort_by(|a, b| (a.left, a.right).cmp(&(b.left, b.right)));
    Ok(BasisTable {
        system: Arc::new(system),
        entries: out_entries,
        epsilon_sign,
    })
}

/// Basis B entries from fitted coefficients on the candidate operators.
///
/// Every pair listed by [`derived_pairs`] must have a fit. The position
/// commutator is built from the fitted spin commutator as `S_{μν} M⁻²`.
pub fn basis_b_from_fits(fits: &[AnsatzFit], epsilon_sign: i64) -> Result<BasisTable, TableError> {
    let by_pair: HashMap<(Atom, Atom), &AnsatzFit> = fits.iter().map(|f| ((f.left, f.right), f)).collect();
    let mut entries = Vec::new();
    let mut ss: HashMap<(u8, u8), NCPoly> = HashMap::new();
    let derived: Vec<(Atom, Atom)> = derived_pairs();
    let fitted_value = |l: Atom, r: Atom| -> Result<(NCPoly, Provenance), TableError> {
        let f = by_pair
            .get(&(l, r))
            .ok_or_else(|| ManifestError::MissingEntry(format!("({l}, {r})")))?;
        let cands = derived_candidates(l, r, epsilon_sign);
        let mut b = NCPoly::zero();
        for (c, p) in f.coefficients.iter().zip(cands.iter()) {
            b.add_scaled(p, &GaussRational::real(c.clone()), 0);
        }
        Ok((b, Provenance::Fitted(f.oracle_id())))
    };
    let atoms = Atom::all(Basis::B);
    for (i, &r) in atoms.iter().enumerate() {
        for &l in &atoms[i + 1..] {
            let (bracket, prov) = match (l, r) {
                _ if derived.contains(&(l, r)) => {
                    let v = fitted_value(l, r)?;
                    if let (Atom::S(nu), Atom::S(mu)) = (l, r) {
                        ss.insert((nu, mu), v.0.clone());
                    }
                    v
                }
                (Atom::M, Atom::Minv) => (NCPoly::zero(), Provenance::Trivial),
                (Atom::P(_), Atom::M) => (NCPoly::zero(), axiom("mass-poincare-invariant")),
                (Atom::P(_), Atom::Minv) => (NCPoly::zero(), induced("inverse-mass")),
                (Atom::P(_), Atom::P(_)) => (NCPoly::zero(), axiom("translations-commute")),
                (Atom::X(nu), Atom::P(mu)) => (NCPoly::int(eta(mu, nu)), axiom("canonical-position-momentum")),
                (Atom::X(_), Atom::X(_)) => (NCPoly::zero(), Provenance::Trivial),
                _ => return Err(ManifestError::MissingEntry(format!("({l}, {r})")).into()),
            };
            entries.push(TableEntry {
                left: l,
                right: r,
                bracket,
                provenance: prov,
            });
        }
    }
    for e in entries.iter_mut() {
        if let (Atom::X(nu), Atom::X(mu)) = (e.left, e.right) {
            let s = ss
                .get(&(nu, mu))
                .ok_or_else(|| ManifestError::MissingEntry(format!("(S_{nu}, S_{mu})")))?;
            e.bracket = s.mul_free(&minv_pow(2));
            e.provenance = axiom("position-noncommutativity");
        }
    }
    basis_b_from_entries(entries, epsilon_sign)
}

/// The table over `{P, X, S, M, M⁻¹}` loaded from the embedded manifest.
pub fn basis_b_table() -> Result<&'static BasisTable, TableError> {
    static CELL: OnceLock<Result<BasisTable, String>> = OnceLock::new();
    let r = CELL.get_or_init(|| {
        Manifest::embedded()
            .map_err(TableError::from)
            .and_then(|m| m.to_table())
            .map_err(|e| e.to_string())
    });
    r.as_ref()
        .map_err(|e| TableError::Manifest(ManifestError::Malformed(e.clone())))
}

pub fn basis_b() -> Result<Arc<RewriteSystem>, TableError> {
    Ok(basis_b_table()?.system.clone())
}

/// The rewrite system for a basis tag.
pub fn system(basis: Basis) -> Result<Arc<RewriteSystem>, TableError> {
    match basis {
        Basis::A => Ok(basis_a()),
        Basis::B => basis_b(),
    }
}
