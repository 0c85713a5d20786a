use std::collections::VecDeque;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ncalg::{eta, levi_civita, Atom, NCPoly};

use super::grid::{Grid, GridState, Spinor};
use super::spectral::gradient;
use super::RepError;

pub type SpinorMatrix = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli(k: u8) -> SpinorMatrix {
    match k {
        1 => [[ZERO, c(1.0, 0.0)], [c(1.0, 0.0), ZERO]],
        2 => [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]],
        3 => [[c(1.0, 0.0), ZERO], [ZERO, c(-1.0, 0.0)]],
        _ => unreachable!(),
    }
}

fn mat_scale(m: &SpinorMatrix, s: Complex64) -> SpinorMatrix {
    [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]]
}

fn mat_add(a: &SpinorMatrix, b: &SpinorMatrix) -> SpinorMatrix {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

#[cfg(test)]
fn mat_mul(a: &SpinorMatrix, b: &SpinorMatrix) -> SpinorMatrix {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_vec(m: &SpinorMatrix, v: &Spinor) -> Spinor {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Spinor Lorentz generator `Σ_{μν}` (lower indices): `Σ_{0i} = (i/2)σ_i`,
/// `Σ_{ij} = ½ ε_{ijk} σ_k`.
pub fn sigma_matrix(mu: u8, nu: u8) -> SpinorMatrix {
    if mu == nu {
        return [[ZERO; 2]; 2];
    }
    if mu > nu {
        return mat_scale(&sigma_matrix(nu, mu), c(-1.0, 0.0));
    }
    if mu == 0 {
        return mat_scale(&pauli(nu), c(0.0, 0.5));
    }
    let k = 6 - mu - nu;
    let sign = if (mu, nu) == (1, 3) { -0.5 } else { 0.5 };
    mat_scale(&pauli(k), c(sign, 0.0))
}

/// Constant matrices `A_{μσ}` with `S_μ = Σ_σ A_{μσ} p^σ M⁻¹`.
fn spin_coefficients(eps_sign: i64) -> [[SpinorMatrix; 4]; 4] {
    let mut out = [[[[ZERO; 2]; 2]; 4]; 4];
    for mu in 0..4u8 {
        for sigma in 0..4u8 {
            let mut acc = [[ZERO; 2]; 2];
            for nu in 0..4u8 {
                for rho in 0..4u8 {
                    let e = levi_civita([mu, nu, rho, sigma], eps_sign) * eta(nu, nu) * eta(rho, rho);
                    if e != 0 {
                        acc = mat_add(&acc, &mat_scale(&sigma_matrix(nu, rho), c(-0.5 * e as f64, 0.0)));
                    }
                }
            }
            out[mu as usize][sigma as usize] = acc;
        }
    }
    out
}

fn lower(mu: usize, p: &[f64; 4]) -> f64 {
    if mu == 0 {
        p[0]
    } else {
        -p[mu]
    }
}

/// Derivative-based images kept between calls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Memo {
    Gradient,
    Position,
    Dilation,
    Lorentz(u8, u8),
}

type MemoEntry = (u64, Memo, Arc<Vec<GridState>>);

/// The spinor representation of the generators on one grid.
pub struct Rep {
    pub grid: Grid,
    pub d_weight: f64,
    pub eps_sign: i64,
    spin: [[SpinorMatrix; 4]; 4],
    cache: Mutex<VecDeque<MemoEntry>>,
    /// Most grid states held by the cache.
    cache_states: usize,
}

/// Keeps freed grid buffers mapped so the next state of the same size
/// does not fault in fresh pages.
fn retain_freed_pages() {
    #[cfg(all(target_os = "linux", target_env = "gnu"))]
    {
        static ONCE: std::sync::Once = std::sync::Once::new();
        // SAFETY: mallopt only adjusts allocator thresholds.
        ONCE.call_once(|| unsafe {
            libc::mallopt(libc::M_MMAP_THRESHOLD, 1 << 30);
            libc::mallopt(libc::M_TRIM_THRESHOLD, i32::MAX);
        });
    }
}

impl Rep {
    pub fn new(grid: Grid, d_weight: f64, eps_sign: i64) -> Self {
        retain_freed_pages();
        Rep {
            grid,
            d_weight,
            eps_sign,
            spin: spin_coefficients(eps_sign),
            cache: Mutex::new(VecDeque::new()),
            cache_states: 48,
        }
    }

    fn memo(&self, key: u64, kind: Memo, compute: impl FnOnce() -> Vec<GridState>) -> Arc<Vec<GridState>> {
        {
            let mut cache = self.cache.lock().expect("cache lock");
            if let Some(pos) = cache.iter().position(|(k, m, _)| *k == key && *m == kind) {
                let hit = cache.remove(pos).expect("present");
                let out = hit.2.clone();
                cache.push_front(hit);
                return out;
            }
        }
        let v = Arc::new(compute());
        let mut cache = self.cache.lock().expect("cache lock");
        cache.push_front((key, kind, v.clone()));
        let mut held = 0;
        let mut keep = 0;
        for (_, _, e) in cache.iter() {
            if keep > 0 && held + e.len() > self.cache_states {
                break;
            }
            held += e.len();
            keep += 1;
        }
        cache.truncate(keep);
        v
    }

    /// Gradient of `s`, reusing earlier work on identical inputs.
    pub fn gradient(&self, s: &GridState) -> Arc<Vec<GridState>> {
        self.gradient_keyed(s.fingerprint(), s)
    }

    fn gradient_keyed(&self, key: u64, s: &GridState) -> Arc<Vec<GridState>> {
        self.memo(key, Memo::Gradient, || gradient(&self.grid, s).into())
    }

    pub fn clear_cache(&self) {
        self.cache.lock().expect("cache lock").clear();
    }

    fn pointwise(&self, s: &GridState, f: impl Fn(usize, &Spinor) -> Spinor + Sync) -> GridState {
        GridState {
            psi: s.psi.par_iter().enumerate().map(|(k, v)| f(k, v)).collect(),
        }
    }

    /// `p_μ ψ`.
    pub fn p(&self, mu: u8, s: &GridState) -> GridState {
        let coords = &self.grid.fields.coords;
        self.pointwise(s, |k, v| {
            let x = lower(mu as usize, &coords[k]);
            [v[0] * x, v[1] * x]
        })
    }

    pub fn m(&self, s: &GridState) -> GridState {
        s.times_field(&self.grid.fields.m)
    }

    pub fn minv(&self, s: &GridState) -> GridState {
        s.times_field(&self.grid.fields.minv)
    }

    /// Spin vector `−½ ε_{μνρσ} Σ^{νρ} p^σ M⁻¹` (the orbital part drops out).
    pub fn spin(&self, mu: u8, s: &GridState) -> GridState {
        let f = &self.grid.fields;
        let a = &self.spin[mu as usize];
        self.pointwise(s, |k, v| {
            let p = &f.coords[k];
            let mut m = [[ZERO; 2]; 2];
            for sigma in 0..4 {
                m = mat_add(&m, &mat_scale(&a[sigma], c(p[sigma] * f.minv[k], 0.0)));
            }
            mat_vec(&m, v)
        })
    }

    /// `D ψ = i(p^ν ∂_ν + w)ψ`.
    pub fn d(&self, s: &GridState) -> GridState {
        let key = s.fingerprint();
        let out = self.memo(key, Memo::Dilation, || vec![self.d_uncached(key, s)]);
        out[0].clone()
    }

    fn d_uncached(&self, key: u64, s: &GridState) -> GridState {
        let g = self.gradient_keyed(key, s);
        let coords = &self.grid.fields.coords;
        let w = self.d_weight;
        self.pointwise(s, |k, v| {
            let p = &coords[k];
            let mut out = [v[0] * w, v[1] * w];
            for nu in 0..4 {
                for comp in 0..2 {
                    out[comp] += g[nu].psi[k][comp] * p[nu];
                }
            }
            [out[0] * I, out[1] * I]
        })
    }

    /// `J_{μν} ψ = i(p_μ ∂_ν − p_ν ∂_μ)ψ + Σ_{μν} ψ`.
    pub fn j(&self, mu: u8, nu: u8, s: &GridState) -> GridState {
        let key = s.fingerprint();
        let out = self.memo(key, Memo::Lorentz(mu, nu), || vec![self.j_uncached(key, mu, nu, s)]);
        out[0].clone()
    }

    fn j_uncached(&self, key: u64, mu: u8, nu: u8, s: &GridState) -> GridState {
        let g = self.gradient_keyed(key, s);
        let coords = &self.grid.fields.coords;
        let sig = sigma_matrix(mu, nu);
        let (m, n) = (mu as usize, nu as usize);
        self.pointwise(s, |k, v| {
            let p = &coords[k];
            let spin = mat_vec(&sig, v);
            let mut out = [ZERO; 2];
            for comp in 0..2 {
                let orb = g[n].psi[k][comp] * lower(m, p) - g[m].psi[k][comp] * lower(n, p);
                out[comp] = orb * I + spin[comp];
            }
            out
        })
    }

    /// `X_μ ψ` for all `μ`, from `(P_μ M⁻²)·D + (P^ρ M⁻²)·J_{ρμ}` with the
    /// symmetrization carried out through the exact gradient of `p_α M⁻²`.
    pub fn x_all(&self, s: &GridState) -> Arc<Vec<GridState>> {
        let key = s.fingerprint();
        self.memo(key, Memo::Position, || self.x_all_uncached(key, s).into())
    }

    fn x_all_uncached(&self, key: u64, s: &GridState) -> [GridState; 4] {
        // The orbital part of the J sum collapses to i(p² ∂_μ − p_μ p^ρ∂_ρ),
        // and the p^ρ∂_ρ piece cancels the one inside D.
        let g = self.gradient_keyed(key, s);
        let f = &self.grid.fields;
        let w = self.d_weight;
        let sig: [[SpinorMatrix; 4]; 4] = std::array::from_fn(|a| std::array::from_fn(|b| sigma_matrix(a as u8, b as u8)));
        let len = s.len();
        let [mut o0, mut o1, mut o2, mut o3]: [Vec<Spinor>; 4] = std::array::from_fn(|_| vec![[ZERO; 2]; len]);
        o0.par_iter_mut()
            .zip(o1.par_iter_mut())
            .zip(o2.par_iter_mut())
            .zip(o3.par_iter_mut())
            .enumerate()
            .for_each(|(k, (((r0, r1), r2), r3))| {
                let v = &s.psi[k];
                let p = &f.coords[k];
                let pl: [f64; 4] = std::array::from_fn(|a| lower(a, p));
                let sq = p[0] * pl[0] + p[1] * pl[1] + p[2] * pl[2] + p[3] * pl[3];
                let gm = f.minv2[k];
                let dg = f.dminv2[k];
                for (mu, out) in [r0, r1, r2, r3].into_iter().enumerate() {
                    let mut spin = [[ZERO; 2]; 2];
                    for (rho, row) in sig.iter().enumerate() {
                        if rho != mu {
                            spin = mat_add(&spin, &mat_scale(&row[mu], c(p[rho], 0.0)));
                        }
                    }
                    let sv = mat_vec(&spin, v);
                    let diag = I * (gm * w * pl[mu] + pl[mu] * (sq * dg - gm));
                    for comp in 0..2 {
                        out[comp] = (I * g[mu].psi[k][comp] * sq + sv[comp]) * gm + v[comp] * diag;
                    }
                }
            });
        [o0, o1, o2, o3].map(|psi| GridState { psi })
    }

    pub fn x(&self, mu: u8, s: &GridState) -> GridState {
        self.x_all(s)[mu as usize].clone()
    }

    /// Action of a single atom. `C_μ` has no direct grid form; build it as
    /// an [`Op`] from its basis-B expression instead.
    pub fn atom(&self, a: Atom, s: &GridState) -> Result<GridState, RepError> {
        Ok(match a {
            Atom::P(m) => self.p(m, s),
            Atom::M => self.m(s),
            Atom::Minv => self.minv(s),
            Atom::S(m) => self.spin(m, s),
            Atom::X(m) => self.x(m, s),
            Atom::D => self.d(s),
            Atom::J(m, n) => self.j(m, n, s),
            Atom::C(_) => return Err(RepError::Unrepresented(a.to_string())),
        })
    }

    /// `(A, B)ψ = (A(Bψ) − B(Aψ))/i`.
    pub fn commutator(&self, a: &Op, b: &Op, s: &GridState) -> Result<GridState, RepError> {
        let ab = a.apply(self, &b.apply(self, s)?)?;
        let ba = b.apply(self, &a.apply(self, s)?)?;
        Ok(ab.sub(&ba).scaled(c(0.0, -1.0)))
    }
}

/// An operator expression evaluated on grid states, with `ℏ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Identity,
    Atom(Atom),
    Scale(Complex64, Box<Op>),
    Sum(Vec<Op>),
    /// Product `A₁ A₂ … A_k`, applied right to left.
    Prod(Vec<Op>),
    /// Symmetrized product `(AB + BA)/2`.
    Sym(Box<Op>, Box<Op>),
}

impl Op {
    pub fn atom(a: Atom) -> Op {
        Op::Atom(a)
    }

    pub fn sym(a: Op, b: Op) -> Op {
        Op::Sym(Box::new(a), Box::new(b))
    }

    pub fn scale(c: f64, a: Op) -> Op {
        Op::Scale(Complex64::new(c, 0.0), Box::new(a))
    }

    pub fn prod(v: Vec<Op>) -> Op {
        Op::Prod(v)
    }

    /// Term-by-term realization of a polynomial with `ℏ` set to one.
    pub fn from_poly(p: &NCPoly) -> Op {
        Op::Sum(
            p.terms()
                .map(|(m, coef)| {
                    let (re, im) = coef.to_f64_pair();
                    let word: Vec<Op> = m.word.atoms().iter().map(|&a| Op::Atom(a)).collect();
                    let body = if word.is_empty() { Op::Identity } else { Op::Prod(word) };
                    Op::Scale(Complex64::new(re, im), Box::new(body))
                })
                .collect(),
        )
    }

    pub fn apply(&self, rep: &Rep, s: &GridState) -> Result<GridState, RepError> {
        Ok(match self {
            Op::Identity => s.clone(),
            Op::Atom(a) => rep.atom(*a, s)?,
            Op::Scale(k, a) => a.apply(rep, s)?.scaled(*k),
            Op::Sum(v) => {
                let mut acc = rep.grid.zero_state();
                for t in v {
                    acc.add_scaled(&t.apply(rep, s)?, c(1.0, 0.0));
                }
                acc
            }
            Op::Prod(v) => {
                let mut acc = s.clone();
                for t in v.iter().rev() {
                    acc = t.apply(rep, &acc)?;
                }
                acc
            }
            Op::Sym(a, b) => {
                let mut ab = a.apply(rep, &b.apply(rep, s)?)?;
                ab.add_scaled(&b.apply(rep, &a.apply(rep, s)?)?, c(1.0, 0.0));
                ab.scaled(c(0.5, 0.0))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comm(a: &SpinorMatrix, b: &SpinorMatrix) -> SpinorMatrix {
        let ab = mat_mul(a, b);
        let ba = mat_mul(b, a);
        let d = mat_add(&ab, &mat_scale(&ba, c(-1.0, 0.0)));
        mat_scale(&d, c(0.0, -1.0))
    }

    #[test]
    fn spinor_matrices_close_the_lorentz_algebra() {
        let e = |a: u8, b: u8| eta(a, b) as f64;
        for m in 0..4u8 {
            for n in 0..4u8 {
                for r in 0..4u8 {
                    for s in 0..4u8 {
                        let lhs = comm(&sigma_matrix(m, n), &sigma_matrix(r, s));
                        let mut rhs = [[ZERO; 2]; 2];
                        for (k, mat) in [
                            (e(n, r), sigma_matrix(m, s)),
                            (e(m, s), sigma_matrix(n, r)),
                            (-e(m, r), sigma_matrix(n, s)),
                            (-e(n, s), sigma_matrix(m, r)),
                        ] {
                            rhs = mat_add(&rhs, &mat_scale(&mat, c(k, 0.0)));
                        }
                        for i in 0..2 {
                            for j in 0..2 {
                                assert!((lhs[i][j] - rhs[i][j]).norm() < 1e-15, "{m}{n}{r}{s}");
                            }
                        }
                    }
                }
            }
        }
    }
}
