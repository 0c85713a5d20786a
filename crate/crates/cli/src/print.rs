//! Canonical text form of polynomials and evaluation of parsed expressions.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use qhexa_core::conformal::ObservableSet;
use qhexa_core::ncalg::{multiply, sym_product, AlgebraError, Atom, Basis, GaussRational, NCPoly, RewriteSystem};
use thiserror::Error;

use crate::syntax::Ast;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("{0} needs an algebra context")]
    NeedsContext(&'static str),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

fn rational_text(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Coefficient with nonnegative leading part; `None` when it is exactly one.
fn magnitude_text(c: &GaussRational) -> Option<String> {
    let (re, im) = (&c.re, &c.im);
    if im.is_zero() {
        if re.is_one() {
            return None;
        }
        return Some(if re.is_integer() { rational_text(re) } else { format!("({})", rational_text(re)) });
    }
    if re.is_zero() {
        return Some(if im.is_one() { "i".into() } else { format!("({} i)", rational_text(im)) });
    }
    let sign = if im.is_negative() { '-' } else { '+' };
    Some(format!("({} {sign} {} i)", rational_text(re), rational_text(&im.abs())))
}

/// Deterministic text of a canonical polynomial. Terms keep their stored
/// order; each is a coefficient, a power of `hbar`, then the word's atoms.
pub fn print_canonical(p: &NCPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (mono, c)) in p.terms().enumerate() {
        let negative = if c.re.is_zero() { c.im.is_negative() } else { c.re.is_negative() };
        let mag = if negative { c.scale(&-BigRational::one()) } else { c.clone() };
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mut parts: Vec<String> = Vec::new();
        let bare = mono.word.is_empty() && mono.hbar == 0;
        match magnitude_text(&mag) {
            Some(t) => parts.push(t),
            None if bare => parts.push("1".into()),
            None => {}
        }
        match mono.hbar {
            0 => {}
            1 => parts.push("hbar".into()),
            h => parts.push(format!("hbar^{h}")),
        }
        parts.extend(mono.word.atoms().iter().map(|a| a.to_string()));
        out.push_str(&parts.join(" "));
    }
    out
}

fn power(base: &NCPoly, k: u32, mul: &dyn Fn(&NCPoly, &NCPoly) -> Result<NCPoly, EvalError>) -> Result<NCPoly, EvalError> {
    let mut acc = NCPoly::one();
    for _ in 0..k {
        acc = mul(&acc, base)?;
    }
    Ok(acc)
}

/// Literal reading: products concatenate words without reordering, so the
/// printed form of any canonical polynomial reads back to itself.
pub fn eval_free(ast: &Ast) -> Result<NCPoly, EvalError> {
    let rec = eval_free;
    Ok(match ast {
        Ast::Num(q) => NCPoly::constant(GaussRational::real(q.clone())),
        Ast::I => NCPoly::constant(GaussRational::i()),
        Ast::Hbar => NCPoly::hbar(1),
        Ast::Atom(a) => NCPoly::atom(*a),
        Ast::Y(_) => return Err(EvalError::NeedsContext("Y_a")),
        Ast::Comm(..) => return Err(EvalError::NeedsContext("comm")),
        Ast::Neg(a) => -rec(a)?,
        Ast::Add(a, b) => rec(a)? + rec(b)?,
        Ast::Sub(a, b) => rec(a)? - rec(b)?,
        Ast::Mul(a, b) => multiply(&rec(a)?, &rec(b)?),
        Ast::Sym(a, b) => sym_product(&rec(a)?, &rec(b)?),
        Ast::Pow(a, k) => power(&rec(a)?, *k, &|x, y| Ok(multiply(x, y)))?,
    })
}

/// A rewrite system with the composites that express foreign atoms.
pub struct AlgebraContext<'a> {
    pub rw: &'a RewriteSystem,
    pub obs: &'a ObservableSet,
}

impl AlgebraContext<'_> {
    fn atom(&self, a: Atom) -> NCPoly {
        let o = self.obs;
        match (self.rw.basis(), a) {
            (Basis::B, Atom::J(m, n)) => o.j[m as usize][n as usize].clone(),
            (Basis::B, Atom::D) => o.d.clone(),
            (Basis::B, Atom::C(m)) => o.c[m as usize].clone(),
            (Basis::A, Atom::X(m)) => o.x[m as usize].clone(),
            (Basis::A, Atom::S(m)) => o.s[m as usize].clone(),
            _ => NCPoly::atom(a),
        }
    }

    /// Normal form of the expression in this context's basis.
    pub fn eval(&self, ast: &Ast) -> Result<NCPoly, EvalError> {
        let raw = self.eval_inner(ast)?;
        Ok(self.rw.normalize(&raw)?)
    }

    fn eval_inner(&self, ast: &Ast) -> Result<NCPoly, EvalError> {
        let rw = self.rw;
        Ok(match ast {
            Ast::Num(_) | Ast::I | Ast::Hbar => eval_free(ast)?,
            Ast::Atom(a) => self.atom(*a),
            Ast::Y(h) => self.obs.y_at(*h).clone(),
            Ast::Neg(a) => -self.eval_inner(a)?,
            Ast::Add(a, b) => self.eval_inner(a)? + self.eval_inner(b)?,
            Ast::Sub(a, b) => self.eval_inner(a)? - self.eval_inner(b)?,
            Ast::Mul(a, b) => rw.product(&self.eval_inner(a)?, &self.eval_inner(b)?)?,
            Ast::Sym(a, b) => rw.sym_product(&self.eval_inner(a)?, &self.eval_inner(b)?)?,
            Ast::Comm(a, b) => rw.commutator(&self.eval_inner(a)?, &self.eval_inner(b)?)?,
            Ast::Pow(a, k) => power(&self.eval_inner(a)?, *k, &|x, y| Ok(rw.product(x, y)?))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn prints_signs_and_coefficients() {
        assert_eq!(print_canonical(&NCPoly::zero()), "0");
        assert_eq!(print_canonical(&NCPoly::int(-1)), "-1");
        let p = eval_free(&parse("(1/2 - 3/4 i) hbar^2 Minv P_1 - i hbar X_0 + 3 M").unwrap()).unwrap();
        let text = print_canonical(&p);
        assert_eq!(eval_free(&parse(&text).unwrap()).unwrap(), p);
        assert_eq!(text, "3 M - i hbar X_0 + (1/2 - 3/4 i) hbar^2 Minv P_1");
    }
}
