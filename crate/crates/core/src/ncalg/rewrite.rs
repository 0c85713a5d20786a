//! Rewrite systems and normal-form reduction.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::atom::{Atom, Basis};
use super::coeff::GaussRational;
use super::poly::{NCPoly, Word};
use super::AlgebraError;

/// Default bound on rewrite steps for one normalization call.
pub const DEFAULT_STEP_BOUND: u64 = 50_000_000;

const MAX_DEPTH: u32 = 400;
const MEMO_LIMIT: usize = 2_000_000;

/// A sum-rewrite on a commuting subword.
///
/// `pattern` is sorted by atom rank. It fires when an atom equal to the
/// last pattern atom is appended to a normal word containing the rest of
/// the pattern; the matched atoms are removed and `replacement` is
/// multiplied onto what remains.
#[derive(Clone, Debug)]
pub struct ConstraintRule {
    pub name: String,
    pub pattern: Word,
    pub replacement: NCPoly,
}

/// Atom order, bracket table and constraint rules defining a normal form.
///
/// Normal words are sorted by atom rank and contain no constraint pattern.
/// Reduction is right-multiplication of a normal word by one atom at a time:
/// an out-of-order atom is swapped left with `xa = ax + iℏ(x,a)`, and
/// constraint rules are tried whenever an atom lands in sorted position.
pub struct RewriteSystem {
    basis: Basis,
    table: HashMap<(Atom, Atom), NCPoly>,
    rules: Vec<ConstraintRule>,
    rules_by_last: HashMap<Atom, Vec<usize>>,
    step_bound: u64,
    memo: Option<RwLock<HashMap<(Word, Atom), Arc<NCPoly>>>>,
}

struct Budget {
    steps: u64,
    bound: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<(), AlgebraError> {
        self.steps += 1;
        if self.steps > self.bound {
            Err(AlgebraError::StepBound { bound: self.bound })
        } else {
            Ok(())
        }
    }
}

impl RewriteSystem {
    /// `table` holds `(x, a) ↦ (x, a)` for pairs with `x > a`; every pair of
    /// distinct basis atoms must be present (zero for commuting pairs).
    pub fn new(
        basis: Basis,
        table: HashMap<(Atom, Atom), NCPoly>,
        rules: Vec<ConstraintRule>,
    ) -> Result<Self, AlgebraError> {
        let atoms = Atom::all(basis);
        for (i, &a) in atoms.iter().enumerate() {
            for &x in &atoms[i + 1..] {
                if !table.contains_key(&(x, a)) {
                    return Err(AlgebraError::MissingEntry(x, a));
                }
            }
        }
        let mut rules_by_last: HashMap<Atom, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            if !r.pattern.is_sorted() || r.pattern.is_empty() {
                return Err(AlgebraError::Inconsistent(format!(
                    "constraint pattern of {} must be sorted and nonempty",
                    r.name
                )));
            }
            rules_by_last
                .entry(r.pattern.last().expect("nonempty"))
                .or_default()
                .push(i);
        }
        Ok(Self {
            basis,
            table,
            rules,
            rules_by_last,
            step_bound: DEFAULT_STEP_BOUND,
            memo: Some(RwLock::new(HashMap::new())),
        })
    }

    pub fn with_step_bound(mut self, bound: u64) -> Self {
        self.step_bound = bound;
        self
    }

    /// Same table and rules with another step bound and an empty memo.
    pub fn rebound(&self, bound: u64) -> Self {
        RewriteSystem {
            basis: self.basis,
            table: self.table.clone(),
            rules: self.rules.clone(),
            rules_by_last: self.rules_by_last.clone(),
            step_bound: bound,
            memo: self.memo.as_ref().map(|_| RwLock::new(HashMap::new())),
        }
    }

    pub fn without_memo(mut self) -> Self {
        self.memo = None;
        self
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn rules(&self) -> &[ConstraintRule] {
        &self.rules
    }

    pub fn step_bound(&self) -> u64 {
        self.step_bound
    }

    /// Stored table pairs `(x, a)` with `x > a`, in atom order.
    pub fn table_pairs(&self) -> Vec<(Atom, Atom)> {
        let mut v: Vec<_> = self.table.keys().copied().collect();
        v.sort();
        v
    }

    /// Table bracket `(a, b)` for any two basis atoms.
    pub fn entry(&self, a: Atom, b: Atom) -> Result<NCPoly, AlgebraError> {
        use std::cmp::Ordering::*;
        match a.cmp(&b) {
            Equal => Ok(NCPoly::zero()),
            Greater => self
                .table
                .get(&(a, b))
                .cloned()
                .ok_or(AlgebraError::MissingEntry(a, b)),
            Less => self
                .table
                .get(&(b, a))
                .map(|p| -p)
                .ok_or(AlgebraError::MissingEntry(b, a)),
        }
    }

    fn check_basis(&self, p: &NCPoly) -> Result<(), AlgebraError> {
        match p.foreign_atom(self.basis) {
            Some(a) => Err(AlgebraError::AtomNotInBasis(a, self.basis)),
            None => Ok(()),
        }
    }

    fn budget(&self) -> Budget {
        Budget {
            steps: 0,
            bound: self.step_bound,
        }
    }

    /// Unique normal form of `p`.
    pub fn normalize(&self, p: &NCPoly) -> Result<NCPoly, AlgebraError> {
        self.check_basis(p)?;
        let mut budget = self.budget();
        let mut out = NCPoly::zero();
        for (m, c) in p.terms() {
            let nf = self.word_nf(&m.word, &mut budget, 0)?;
            out.add_scaled(&nf, c, m.hbar);
        }
        Ok(out)
    }

    /// Normal form of the product `a b`.
    pub fn product(&self, a: &NCPoly, b: &NCPoly) -> Result<NCPoly, AlgebraError> {
        let a = self.normalize(a)?;
        let b = self.normalize(b)?;
        let mut budget = self.budget();
        let mut out = NCPoly::zero();
        for (ma, ca) in a.terms() {
            for (mb, cb) in b.terms() {
                let nf = self.mul_word_word(&ma.word, &mb.word, &mut budget, 0)?;
                out.add_scaled(&nf, &(ca * cb), ma.hbar + mb.hbar);
            }
        }
        Ok(out)
    }

    /// Normal form of `a₁ a₂ … aₙ`.
    pub fn product_all(&self, factors: &[&NCPoly]) -> Result<NCPoly, AlgebraError> {
        let mut acc = NCPoly::one();
        for f in factors {
            acc = self.product(&acc, f)?;
        }
        Ok(acc)
    }

    /// The bracket `(a, b) = (ab − ba)/(iℏ)` in normal form.
    pub fn commutator(&self, a: &NCPoly, b: &NCPoly) -> Result<NCPoly, AlgebraError> {
        let diff = &self.product(a, b)? - &self.product(b, a)?;
        diff.div_i_hbar().map_err(|m| {
            AlgebraError::Inconsistent(format!(
                "commutator difference keeps an ℏ-free term on word {:?}",
                m.word.atoms()
            ))
        })
    }

    /// Normal form of the symmetrized product `(ab + ba)/2`.
    pub fn sym_product(&self, a: &NCPoly, b: &NCPoly) -> Result<NCPoly, AlgebraError> {
        let s = &self.product(a, b)? + &self.product(b, a)?;
        Ok(s.scale(&GaussRational::ratio(1, 2)))
    }

    pub fn equal(&self, a: &NCPoly, b: &NCPoly) -> Result<bool, AlgebraError> {
        Ok(self.normalize(&(a - b))?.is_zero())
    }

    fn word_nf(&self, w: &Word, budget: &mut Budget, depth: u32) -> Result<NCPoly, AlgebraError> {
        self.mul_word_word(&Word::empty(), w, budget, depth)
    }

    /// `nf(u · w)` for a normal word `u` and an arbitrary word `w`.
    fn mul_word_word(
        &self,
        u: &Word,
        w: &Word,
        budget: &mut Budget,
        depth: u32,
    ) -> Result<NCPoly, AlgebraError> {
        let mut acc = NCPoly::word(u.clone());
        for &a in w.atoms() {
            acc = self.mul_poly_atom(&acc, a, budget, depth)?;
        }
        Ok(acc)
    }

    /// `nf(u · p)` for a normal word `u`.
    fn mul_word_poly(
        &self,
        u: &Word,
        p: &NCPoly,
        budget: &mut Budget,
        depth: u32,
    ) -> Result<NCPoly, AlgebraError> {
        let mut out = NCPoly::zero();
        for (m, c) in p.terms() {
            let nf = self.mul_word_word(u, &m.word, budget, depth)?;
            out.add_scaled(&nf, c, m.hbar);
        }
        Ok(out)
    }

    /// `nf(p · a)` for a normal polynomial `p`.
    fn mul_poly_atom(
        &self,
        p: &NCPoly,
        a: Atom,
        budget: &mut Budget,
        depth: u32,
    ) -> Result<NCPoly, AlgebraError> {
        let mut out = NCPoly::zero();
        for (m, c) in p.terms() {
            let nf = self.mul_word_atom(&m.word, a, budget, depth)?;
            out.add_scaled(&nf, c, m.hbar);
        }
        Ok(out)
    }

    /// `nf(u · a)` for a normal word `u`; the memoized core step.
    fn mul_word_atom(
        &self,
        u: &Word,
        a: Atom,
        budget: &mut Budget,
        depth: u32,
    ) -> Result<Arc<NCPoly>, AlgebraError> {
        if let Some(memo) = &self.memo {
            if let Some(hit) = memo.read().expect("memo lock").get(&(u.clone(), a)) {
                return Ok(hit.clone());
            }
        }
        if depth > MAX_DEPTH {
            return Err(AlgebraError::StepBound {
                bound: self.step_bound,
            });
        }
        budget.tick()?;
        let result = Arc::new(self.mul_word_atom_uncached(u, a, budget, depth + 1)?);
        if let Some(memo) = &self.memo {
            let mut guard = memo.write().expect("memo lock");
            if guard.len() >= MEMO_LIMIT {
                guard.clear();
            }
            guard.insert((u.clone(), a), result.clone());
        }
        Ok(result)
    }

    fn mul_word_atom_uncached(
        &self,
        u: &Word,
        a: Atom,
        budget: &mut Budget,
        depth: u32,
    ) -> Result<NCPoly, AlgebraError> {
        let x = match u.last() {
            None => return Ok(NCPoly::atom(a)),
            Some(x) => x,
        };
        if x <= a {
            if let Some(idx) = self.rules_by_last.get(&a) {
                for &i in idx {
                    let rule = &self.rules[i];
                    if let Some(rest) = remove_sub_multiset(u, &rule.pattern.atoms()[..rule.pattern.len() - 1]) {
                        return self.mul_word_poly(&rest, &rule.replacement, budget, depth);
                    }
                }
            }
            return Ok(NCPoly::word(u.pushed(a)));
        }
        let head = u.init();
        let swapped = self.mul_word_atom(&head, a, budget, depth)?;
        let mut out = self.mul_poly_atom(&swapped, x, budget, depth)?;
        let br = self.entry(x, a)?;
        if !br.is_zero() {
            let extra = self.mul_word_poly(&head, &br, budget, depth)?;
            out.add_scaled(&extra, &GaussRational::i(), 1);
        }
        Ok(out)
    }
}

/// Removes one occurrence of each atom of `sub` from the sorted word `u`.
fn remove_sub_multiset(u: &Word, sub: &[Atom]) -> Option<Word> {
    let mut atoms = u.0.clone();
    for s in sub {
        let pos = atoms.iter().rposition(|b| b == s)?;
        atoms.remove(pos);
    }
    Some(Word(atoms))
}

/// Free product `ab`, canonicalized but not reduced.
pub fn multiply(a: &NCPoly, b: &NCPoly) -> NCPoly {
    a.mul_free(b)
}

/// Free symmetrized product `(ab + ba)/2`.
pub fn sym_product(a: &NCPoly, b: &NCPoly) -> NCPoly {
    (&a.mul_free(b) + &b.mul_free(a)).scale(&GaussRational::ratio(1, 2))
}

/// `M⁻ᵏ` as a word.
pub fn minv_pow(k: u32) -> NCPoly {
    NCPoly::word(Word::from_atoms(&vec![Atom::Minv; k as usize]))
}

/// `M^k` as a word.
pub fn m_pow(k: u32) -> NCPoly {
    NCPoly::word(Word::from_atoms(&vec![Atom::M; k as usize]))
}

/// Symmetrized division by `M^k`: `a · M⁻ᵏ`, free.
pub fn sym_divide_by_m(a: &NCPoly, k: u32) -> NCPoly {
    sym_product(a, &minv_pow(k))
}
