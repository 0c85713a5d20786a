//! Words and noncommutative polynomials with exact coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use smallvec::SmallVec;

use super::atom::{Atom, Basis};
use super::coeff::{Coefficient, GaussRational};
use super::AlgebraError;

/// Ordered product of atoms; the empty word is the identity.
///
/// Words compare by length first, then lexicographically by atom rank.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(pub SmallVec<[Atom; 8]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn from_atoms(atoms: &[Atom]) -> Self {
        Word(SmallVec::from_slice(atoms))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn last(&self) -> Option<Atom> {
        self.0.last().copied()
    }

    /// The word without its last atom.
    pub fn init(&self) -> Word {
        let n = self.0.len().saturating_sub(1);
        Word::from_atoms(&self.0[..n])
    }

    pub fn pushed(&self, a: Atom) -> Word {
        let mut w = self.clone();
        w.0.push(a);
        w
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.0.extend_from_slice(&other.0);
        w
    }

    pub fn count(&self, a: Atom) -> usize {
        self.0.iter().filter(|&&b| b == a).count()
    }

    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|p| p[0] <= p[1])
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A word together with its power of ℏ: the key of one polynomial term.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Monomial {
    pub word: Word,
    pub hbar: u32,
}

/// Finite sum of coefficient-weighted words.
///
/// Terms are kept merged, nonzero, and in canonical order (word length,
/// then atom-wise lexicographic, then ℏ power).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct NCPoly {
    terms: BTreeMap<Monomial, GaussRational>,
}

impl NCPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussRational::one())
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::term(Coefficient::new(c, 0), Word::empty())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(GaussRational::from_int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::constant(GaussRational::ratio(num, den))
    }

    pub fn atom(a: Atom) -> Self {
        Self::word(Word::from_atoms(&[a]))
    }

    pub fn word(w: Word) -> Self {
        Self::term(Coefficient::one(), w)
    }

    /// `i^k`-free power of ℏ as a polynomial.
    pub fn hbar(k: u32) -> Self {
        Self::term(Coefficient::new(GaussRational::one(), k), Word::empty())
    }

    pub fn term(c: Coefficient, w: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c.hbar_pow(), c.value().clone());
        p
    }

    /// `J_{μν}` with the antisymmetry sign applied.
    pub fn j(mu: u8, nu: u8) -> Result<Self, AlgebraError> {
        let (s, a) = Atom::j(mu, nu)?;
        Ok(Self::atom(a).scale(&GaussRational::from_int(s as i64)))
    }

    /// Canonicalizing constructor over validated atoms.
    pub fn make_poly(terms: Vec<(Coefficient, Word)>) -> Result<Self, AlgebraError> {
        let mut p = Self::zero();
        for (c, w) in terms {
            for a in w.atoms() {
                a.validate()?;
            }
            p.add_term(w, c.hbar_pow(), c.value().clone());
        }
        Ok(p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRational)> {
        self.terms.iter()
    }

    pub fn coefficient_of(&self, w: &Word, hbar: u32) -> GaussRational {
        self.terms
            .get(&Monomial {
                word: w.clone(),
                hbar,
            })
            .cloned()
            .unwrap_or_default()
    }

    /// If the polynomial is `c·1` for an ℏ-free constant `c`, return `c`.
    pub fn as_constant(&self) -> Option<GaussRational> {
        match self.terms.len() {
            0 => Some(GaussRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                (m.word.is_empty() && m.hbar == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, word: Word, hbar: u32, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        let key = Monomial { word, hbar };
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    /// `self += c · ℏ^shift · other`.
    pub fn add_scaled(&mut self, other: &NCPoly, c: &GaussRational, shift: u32) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.word.clone(), m.hbar + shift, v * c);
        }
    }

    pub fn add_assign(&mut self, other: &NCPoly) {
        self.add_scaled(other, &GaussRational::one(), 0);
    }

    pub fn sub_assign(&mut self, other: &NCPoly) {
        self.add_scaled(other, &GaussRational::from_int(-1), 0);
    }

    pub fn scale(&self, c: &GaussRational) -> NCPoly {
        let mut p = NCPoly::zero();
        p.add_scaled(self, c, 0);
        p
    }

    pub fn scale_rational(&self, q: &BigRational) -> NCPoly {
        self.scale(&GaussRational::real(q.clone()))
    }

    pub fn scale_coeff(&self, c: &Coefficient) -> NCPoly {
        let mut p = NCPoly::zero();
        p.add_scaled(self, c.value(), c.hbar_pow());
        p
    }

    /// Free (unreduced) product: distributed concatenation.
    pub fn mul_free(&self, other: &NCPoly) -> NCPoly {
        let mut p = NCPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                p.add_term(ma.word.concat(&mb.word), ma.hbar + mb.hbar, ca * cb);
            }
        }
        p
    }

    /// Divides by `iℏ` exactly, or reports the first term carrying no ℏ.
    pub fn div_i_hbar(&self) -> Result<NCPoly, Monomial> {
        let mut p = NCPoly::zero();
        for (m, c) in &self.terms {
            if m.hbar == 0 {
                return Err(m.clone());
            }
            p.add_term(m.word.clone(), m.hbar - 1, c.div_i());
        }
        Ok(p)
    }

    /// Keeps only the terms with the given ℏ power.
    pub fn hbar_part(&self, k: u32) -> NCPoly {
        NCPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.hbar == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(|m| m.word.len()).max().unwrap_or(0)
    }

    /// All atoms belong to the given basis.
    pub fn in_basis(&self, basis: Basis) -> bool {
        self.terms
            .keys()
            .all(|m| m.word.atoms().iter().all(|a| a.in_basis(basis)))
    }

    /// First atom outside the given basis, if any.
    pub fn foreign_atom(&self, basis: Basis) -> Option<Atom> {
        self.terms
            .keys()
            .flat_map(|m| m.word.atoms().iter().copied())
            .find(|a| !a.in_basis(basis))
    }

    /// Replaces every atom by a polynomial and multiplies out freely.
    pub fn substitute(&self, f: &mut dyn FnMut(Atom) -> NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (m, c) in &self.terms {
            let mut acc = NCPoly::term(Coefficient::new(c.clone(), m.hbar), Word::empty());
            for &a in m.word.atoms() {
                acc = acc.mul_free(&f(a));
            }
            out.add_assign(&acc);
        }
        out
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, GaussRational)> {
        self.terms.into_iter()
    }
}

impl From<Atom> for NCPoly {
    fn from(a: Atom) -> Self {
        NCPoly::atom(a)
    }
}

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        let mut p = self.clone();
        p.add_assign(rhs);
        p
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        let mut p = self.clone();
        p.sub_assign(rhs);
        p
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        self.scale(&GaussRational::from_int(-1))
    }
}

impl Mul for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        self.mul_free(rhs)
    }
}

impl Add for NCPoly {
    type Output = NCPoly;
    fn add(mut self, rhs: NCPoly) -> NCPoly {
        self.add_assign(&rhs);
        self
    }
}

impl Sub for NCPoly {
    type Output = NCPoly;
    fn sub(mut self, rhs: NCPoly) -> NCPoly {
        self.sub_assign(&rhs);
        self
    }
}

impl Neg for NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        -&self
    }
}
