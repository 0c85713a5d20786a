use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ncalg::{Atom, NCPoly};
use crate::tables::{
    basis_b_from_fits, derived_candidates, derived_pairs, snap_fit, snap_rational, AnsatzFit, FitError,
    FitOracle, Manifest, TableEntry,
};

use super::grid::{DerivativeScheme, Grid, GridState};
use super::ops::{Op, Rep};
use super::RepError;

/// Largest norm fraction a packet may place where the mass window is below one.
pub const LEAK_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PacketFamily {
    /// Isotropic Gaussian with a constant spinor.
    Gaussian,
    /// Anisotropic Gaussian with a linear phase and a momentum-dependent spinor.
    Squeezed,
}

/// Parameters of one sample wavepacket.
#[derive(Clone, Debug, PartialEq)]
pub struct PacketSpec {
    pub center: [f64; 4],
    pub sigma: f64,
    pub spinor: [Complex64; 2],
    pub family: PacketFamily,
    /// Per-axis width factors and phase slopes (used by `Squeezed`).
    pub widths: [f64; 4],
    pub phase: [f64; 4],
}

impl PacketSpec {
    pub fn gaussian(center: [f64; 4], sigma: f64, spinor: [Complex64; 2]) -> Self {
        PacketSpec {
            center,
            sigma,
            spinor,
            family: PacketFamily::Gaussian,
            widths: [1.0; 4],
            phase: [0.0; 4],
        }
    }

    /// Radius of the region on which residuals are measured.
    pub fn interior_radius(&self) -> f64 {
        5.0 * self.sigma * self.widths.iter().cloned().fold(1.0, f64::max)
    }
}

/// Samples `ψ(p) = u(p) exp(−Σ (p^a − p̄^a)²/(2σ_a²) + i k·(p − p̄))`,
/// normalized, and rejects it if it leaks out of the mass window.
pub fn make_wavepacket(grid: &Grid, spec: &PacketSpec) -> Result<GridState, RepError> {
    let coords = grid.coords();
    let win = grid.window();
    let mut psi = grid.zero_state();
    for (k, p) in coords.iter().enumerate() {
        let mut expo = 0.0;
        let mut ph = 0.0;
        for a in 0..4 {
            let d = p[a] - spec.center[a];
            let s = spec.sigma * spec.widths[a];
            expo -= d * d / (2.0 * s * s);
            ph += spec.phase[a] * d;
        }
        let amp = Complex64::from_polar(expo.exp(), ph);
        let u = match spec.family {
            PacketFamily::Gaussian => spec.spinor,
            PacketFamily::Squeezed => {
                let t = (p[1] - spec.center[1]) / spec.sigma;
                [spec.spinor[0] * (1.0 + 0.3 * t), spec.spinor[1] * Complex64::new(1.0, 0.2 * t)]
            }
        };
        psi.psi[k] = [u[0] * amp, u[1] * amp];
    }
    let total = psi.norm_sq_masked(None);
    let outside: f64 = psi
        .psi
        .iter()
        .zip(win)
        .filter(|(_, &w)| w < 1.0)
        .map(|(v, _)| v[0].norm_sqr() + v[1].norm_sqr())
        .sum();
    let leak = if total > 0.0 { outside / total } else { 1.0 };
    let r = spec.interior_radius();
    let ball_ok = coords.iter().zip(win).all(|(p, &w)| {
        let d2: f64 = (0..4).map(|a| (p[a] - spec.center[a]).powi(2)).sum();
        d2 > r * r || w >= 1.0
    });
    if !(leak <= LEAK_TOLERANCE) || !ball_ok {
        return Err(RepError::Leak { leak });
    }
    let scale = 1.0 / (total * grid.cell_volume()).sqrt();
    Ok(psi.scaled(Complex64::new(scale, 0.0)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub n: usize,
    /// Half-width of each packet-centred box in units of the packet width.
    pub box_sigmas: f64,
    pub epsilon: f64,
    pub tol: f64,
    pub composite_tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub d_weight: f64,
    pub eps_sign: i64,
    pub scheme: DerivativeScheme,
    pub family: PacketFamily,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n: 32,
            box_sigmas: 6.5,
            epsilon: 0.5,
            tol: 1e-6,
            composite_tol: 1e-5,
            samples: 8,
            seed: 7,
            d_weight: 2.0,
            eps_sign: 1,
            scheme: DerivativeScheme::Spectral,
            family: PacketFamily::Gaussian,
        }
    }
}

fn random_spinor(rng: &mut ChaCha8Rng) -> [Complex64; 2] {
    let v: [Complex64; 2] = std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Reproducible sample packets well inside the forward timelike region.
pub fn default_packets(count: usize, seed: u64, family: PacketFamily) -> Vec<PacketSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let center = [
                rng.gen_range(2.2..2.8),
                rng.gen_range(-0.4..0.4),
                rng.gen_range(-0.4..0.4),
                rng.gen_range(-0.4..0.4),
            ];
            let sigma = rng.gen_range(0.15..0.19);
            let spinor = random_spinor(&mut rng);
            match family {
                PacketFamily::Gaussian => PacketSpec::gaussian(center, sigma, spinor),
                PacketFamily::Squeezed => PacketSpec {
                    center,
                    sigma,
                    spinor,
                    family,
                    widths: std::array::from_fn(|_| rng.gen_range(0.8..1.0)),
                    phase: std::array::from_fn(|_| rng.gen_range(-1.0..1.0) / sigma),
                },
            }
        })
        .collect()
}

/// What a check evaluates on a sample state.
#[derive(Clone, Debug, PartialEq)]
pub enum Probe {
    Apply(Op),
    Bracket(Op, Op),
}

impl Probe {
    pub fn eval(&self, rep: &Rep, s: &GridState) -> Result<GridState, RepError> {
        match self {
            Probe::Apply(op) => op.apply(rep, s),
            Probe::Bracket(a, b) => rep.commutator(a, b, s),
        }
    }
}

/// One operator identity `lhs ψ = rhs ψ` to be tested on every sample.
#[derive(Clone, Debug, PartialEq)]
pub struct EntryCheck {
    pub id: String,
    pub lhs: Probe,
    pub rhs: Probe,
    pub tol: f64,
}

impl EntryCheck {
    /// `(left, right) = bracket` for a table entry.
    pub fn table(e: &TableEntry, tol: f64) -> Self {
        EntryCheck {
            id: format!("table({},{})", e.left, e.right),
            lhs: Probe::Bracket(Op::atom(e.left), Op::atom(e.right)),
            rhs: Probe::Apply(Op::from_poly(&e.bracket)),
            tol,
        }
    }

    pub fn identity(id: impl Into<String>, lhs: Op, rhs: Op, tol: f64) -> Self {
        EntryCheck {
            id: id.into(),
            lhs: Probe::Apply(lhs),
            rhs: Probe::Apply(rhs),
            tol,
        }
    }

    pub fn bracket(id: impl Into<String>, a: Op, b: Op, rhs: Op, tol: f64) -> Self {
        EntryCheck {
            id: id.into(),
            lhs: Probe::Bracket(a, b),
            rhs: Probe::Apply(rhs),
            tol,
        }
    }

    /// Atoms whose images are reused; checks are ordered by this key so the
    /// derivative cache stays warm.
    fn order_key(&self) -> String {
        match &self.lhs {
            Probe::Bracket(_, b) => format!("0{b:?}"),
            Probe::Apply(a) => format!("1{a:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub coarse_n: usize,
    pub fine_n: usize,
    pub coarse_residual: f64,
    pub fine_residual: f64,
    pub ratio: f64,
    pub pass: bool,
}

struct Prepared {
    rep: Rep,
    psi: GridState,
    mask: Vec<f64>,
    psi_norm: f64,
}

/// Relative interior residual `‖m(a − b)‖ / max(‖m b‖, ‖m ψ‖)`.
fn relative_residual(a: &GridState, b: &GridState, mask: &[f64], psi_norm: f64) -> f64 {
    let d = a.sub(b).norm_sq_masked(Some(mask)).sqrt();
    let scale = b.norm_sq_masked(Some(mask)).sqrt().max(psi_norm);
    d / scale
}

/// The grid oracle over a fixed set of sample packets.
pub struct Oracle {
    pub config: OracleConfig,
    pub packets: Vec<PacketSpec>,
}

impl Oracle {
    pub fn new(config: OracleConfig) -> Self {
        let packets = default_packets(config.samples, config.seed, config.family);
        Oracle { config, packets }
    }

    pub fn with_packets(config: OracleConfig, packets: Vec<PacketSpec>) -> Self {
        Oracle { config, packets }
    }

    fn grid_for(&self, spec: &PacketSpec, n: usize) -> Result<Grid, RepError> {
        let half = self.config.box_sigmas * spec.sigma;
        Grid::new(n, spec.center, half, self.config.epsilon, self.config.scheme)
    }

    fn prepare(&self, spec: &PacketSpec, n: usize) -> Result<Prepared, RepError> {
        let grid = self.grid_for(spec, n)?;
        let psi = make_wavepacket(&grid, spec)?;
        let r2 = spec.interior_radius().powi(2);
        let mask: Vec<f64> = grid
            .coords()
            .iter()
            .map(|p| {
                let d2: f64 = (0..4).map(|a| (p[a] - spec.center[a]).powi(2)).sum();
                if d2 <= r2 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let psi_norm = psi.norm_sq_masked(Some(&mask)).sqrt();
        let rep = Rep::new(grid, self.config.d_weight, self.config.eps_sign);
        Ok(Prepared { rep, psi, mask, psi_norm })
    }

    /// Runs every check on every packet and reports the worst residual.
    pub fn run_checks(&self, checks: &[EntryCheck]) -> Result<Vec<CheckReport>, RepError> {
        let mut order: Vec<usize> = (0..checks.len()).collect();
        order.sort_by_key(|&i| checks[i].order_key());
        let mut worst = vec![0.0f64; checks.len()];
        for spec in &self.packets {
            let prep = self.prepare(spec, self.config.n)?;
            for &i in &order {
                let c = &checks[i];
                let l = c.lhs.eval(&prep.rep, &prep.psi)?;
                let r = c.rhs.eval(&prep.rep, &prep.psi)?;
                let res = relative_residual(&l, &r, &prep.mask, prep.psi_norm);
                worst[i] = if res.is_nan() { f64::NAN } else { worst[i].max(res) };
            }
        }
        Ok(checks
            .iter()
            .zip(worst)
            .map(|(c, w)| CheckReport {
                id: c.id.clone(),
                residual: w,
                tol: c.tol,
                pass: w <= c.tol,
                samples: self.packets.len(),
            })
            .collect())
    }

    pub fn check_entries(&self, entries: &[TableEntry]) -> Result<Vec<CheckReport>, RepError> {
        let checks: Vec<EntryCheck> = entries.iter().map(|e| EntryCheck::table(e, self.config.tol)).collect();
        self.run_checks(&checks)
    }

    /// Complex least squares of `(left, right)` onto each candidate list,
    /// accumulated over all packets and the interior of each grid.
    pub fn fit_many(
        &self,
        jobs: &[(Atom, Atom, Vec<NCPoly>)],
    ) -> Result<Vec<Result<(Vec<(f64, f64)>, f64, usize), FitError>>, RepError> {
        struct Acc {
            gram: DMatrix<Complex64>,
            rhs: DVector<Complex64>,
            tt: f64,
            scale: f64,
        }
        let mut accs: Vec<Acc> = jobs
            .iter()
            .map(|(_, _, c)| Acc {
                gram: DMatrix::zeros(c.len(), c.len()),
                rhs: DVector::zeros(c.len()),
                tt: 0.0,
                scale: 0.0,
            })
            .collect();
        let mut order: Vec<usize> = (0..jobs.len()).collect();
        order.sort_by_key(|&i| (jobs[i].1, jobs[i].0));
        for spec in &self.packets {
            let prep = self.prepare(spec, self.config.n)?;
            let m = &prep.mask;
            for &i in &order {
                let (l, r, cands) = &jobs[i];
                let t = prep.rep.commutator(&Op::atom(*l), &Op::atom(*r), &prep.psi)?;
                let cols: Vec<GridState> = cands
                    .iter()
                    .map(|c| Op::from_poly(c).apply(&prep.rep, &prep.psi))
                    .collect::<Result<_, _>>()?;
                let a = &mut accs[i];
                for (x, cx) in cols.iter().enumerate() {
                    for (y, cy) in cols.iter().enumerate() {
                        a.gram[(x, y)] += masked_inner(cx, cy, m);
                    }
                    a.rhs[x] += masked_inner(cx, &t, m);
                }
                let tn = t.norm_sq_masked(Some(m));
                a.tt += tn;
                a.scale += tn.max(prep.psi_norm * prep.psi_norm);
            }
        }
        Ok(jobs
            .iter()
            .zip(accs)
            .map(|((l, r, _), a)| solve_normal(*l, *r, a.gram, a.rhs, a.tt, a.scale, self.packets.len()))
            .collect())
    }

    /// Least-squares fit of one bracket (see [`Oracle::fit_many`]).
    pub fn fit_operator(
        &self,
        left: Atom,
        right: Atom,
        candidates: &[NCPoly],
    ) -> Result<(Vec<(f64, f64)>, f64, usize), FitError> {
        self.fit_many(&[(left, right, candidates.to_vec())])
            .map_err(|e| FitError::Oracle(e.to_string()))?
            .pop()
            .expect("one job")
    }
}

impl Oracle {
    /// Fits every derived basis-B bracket in one pass over the packets.
    pub fn fit_derived(&self) -> Result<Vec<AnsatzFit>, FitError> {
        let jobs: Vec<(Atom, Atom, Vec<NCPoly>)> = derived_pairs()
            .into_iter()
            .map(|(l, r)| (l, r, derived_candidates(l, r, self.config.eps_sign)))
            .collect();
        let raw = self.fit_many(&jobs).map_err(|e| FitError::Oracle(e.to_string()))?;
        jobs.into_iter()
            .zip(raw)
            .map(|((l, r, c), res)| snap_fit(l, r, c, res?, self.config.tol))
            .collect()
    }
}

fn masked_inner(a: &GridState, b: &GridState, mask: &[f64]) -> Complex64 {
    a.psi
        .iter()
        .zip(&b.psi)
        .zip(mask)
        .filter(|(_, &w)| w != 0.0)
        .map(|((x, y), _)| x[0].conj() * y[0] + x[1].conj() * y[1])
        .sum()
}

fn solve_normal(
    left: Atom,
    right: Atom,
    gram: DMatrix<Complex64>,
    rhs: DVector<Complex64>,
    tt: f64,
    scale: f64,
    samples: usize,
) -> Result<(Vec<(f64, f64)>, f64, usize), FitError> {
    let k = gram.nrows();
    let d: Vec<f64> = (0..k).map(|i| gram[(i, i)].re.sqrt()).collect();
    if d.iter().any(|&x| !(x > 0.0)) {
        return Err(FitError::RankDeficient(left, right));
    }
    let g = DMatrix::from_fn(k, k, |i, j| gram[(i, j)] / (d[i] * d[j]));
    let b = DVector::from_fn(k, |i, _| rhs[i] / d[i]);
    let svd = g.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-10 * smax {
        return Err(FitError::RankDeficient(left, right));
    }
    let y = svd
        .solve(&b, 0.0)
        .map_err(|e| FitError::Oracle(e.to_string()))?;
    let coef: Vec<Complex64> = (0..k).map(|i| y[i] / d[i]).collect();
    let cv = DVector::from_vec(coef.clone());
    let fit_sq = (cv.adjoint() * &gram * &cv)[(0, 0)].re;
    let cross = (cv.adjoint() * &rhs)[(0, 0)].re;
    let res_sq = (tt - 2.0 * cross + fit_sq).max(0.0);
    let residual = (res_sq / scale).sqrt();
    Ok((coef.iter().map(|c| (c.re, c.im)).collect(), residual, samples))
}

impl FitOracle for Oracle {
    fn least_squares(
        &self,
        left: Atom,
        right: Atom,
        candidates: &[NCPoly],
    ) -> Result<(Vec<(f64, f64)>, f64, usize), FitError> {
        self.fit_operator(left, right, candidates)
    }

    fn tolerance(&self) -> f64 {
        self.config.tol
    }
}

/// Fixes the additive weight `w` of `D = i(p·∂ + w)` by requiring `D` to be
/// hermitian on the sample packets; returns the mean raw value and its
/// rational snap.
pub fn calibrate_d_weight(oracle: &Oracle) -> Result<(f64, Option<BigRational>), RepError> {
    let mut acc = 0.0;
    for spec in &oracle.packets {
        let mut prep = oracle.prepare(spec, oracle.config.n)?;
        prep.rep.d_weight = 0.0;
        let d0 = prep.rep.d(&prep.psi);
        let ip = prep.psi.inner(&d0);
        acc += -ip.im / prep.psi.norm_sq_masked(None);
    }
    let w = acc / oracle.packets.len() as f64;
    Ok((w, snap_rational(w)))
}

/// Residual of `(X_0, M) = P_0 M⁻¹` on the first packet at `n` and `2n`
/// points per axis over the same box.
pub fn convergence_check(oracle: &Oracle, coarse_n: usize) -> Result<ConvergenceReport, RepError> {
    let spec = oracle.packets.first().ok_or(RepError::Fit("no sample packets".into()))?;
    let lhs = Probe::Bracket(Op::atom(Atom::X(0)), Op::atom(Atom::M));
    let rhs = Op::prod(vec![Op::atom(Atom::P(0)), Op::atom(Atom::Minv)]);
    let mut res = [0.0; 2];
    for (slot, n) in [coarse_n, 2 * coarse_n].into_iter().enumerate() {
        let prep = oracle.prepare(spec, n)?;
        let l = lhs.eval(&prep.rep, &prep.psi)?;
        let r = rhs.apply(&prep.rep, &prep.psi)?;
        res[slot] = relative_residual(&l, &r, &prep.mask, prep.psi_norm);
    }
    let ratio = res[0] / res[1].max(f64::MIN_POSITIVE);
    Ok(ConvergenceReport {
        coarse_n,
        fine_n: 2 * coarse_n,
        coarse_residual: res[0],
        fine_residual: res[1],
        ratio,
        pass: ratio >= 64.0 || res[1] <= 1e-10,
    })
}

/// Calibrates `D`, fits the derived brackets and assembles the basis-B
/// manifest from the results.
pub fn generate_manifest(oracle: &Oracle) -> Result<Manifest, RepError> {
    let (raw, snapped) = calibrate_d_weight(oracle)?;
    let d_weight = snapped.ok_or_else(|| RepError::Fit(format!("D weight {raw} is not a small rational")))?;
    let fits = oracle.fit_derived().map_err(|e| RepError::Fit(e.to_string()))?;
    let table = basis_b_from_fits(&fits, oracle.config.eps_sign).map_err(|e| RepError::Fit(e.to_string()))?;
    Ok(Manifest::from_table(&table, &d_weight, &fits))
}

fn eta_f(mu: u8) -> f64 {
    if mu == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Basis-B table entries plus the spin, position and `Y²` identities,
/// evaluated with their normal-form right-hand sides.
pub fn standard_checks(entries: &[TableEntry], tol: f64, composite_tol: f64) -> Vec<EntryCheck> {
    let at = Op::atom;
    let mut out: Vec<EntryCheck> = entries.iter().map(|e| EntryCheck::table(e, tol)).collect();
    for m in 0..4u8 {
        for n in m..4u8 {
            let mut rhs = vec![Op::scale(0.25, Op::prod(vec![at(Atom::P(m)), at(Atom::P(n)), at(Atom::Minv), at(Atom::Minv)]))];
            if m == n {
                rhs.push(Op::scale(-0.25 * eta_f(m), Op::Identity));
            }
            out.push(EntryCheck::identity(
                format!("spin product S_{m}.S_{n}"),
                Op::sym(at(Atom::S(m)), at(Atom::S(n))),
                Op::Sum(rhs),
                tol,
            ));
        }
    }
    let s2 = (0..4u8).map(|m| Op::scale(eta_f(m), Op::prod(vec![at(Atom::S(m)), at(Atom::S(m))]))).collect();
    out.push(EntryCheck::identity("S^2", Op::Sum(s2), Op::scale(-0.75, Op::Identity), tol));
    let sp = (0..4u8).map(|m| Op::scale(eta_f(m), Op::prod(vec![at(Atom::S(m)), at(Atom::P(m))]))).collect();
    out.push(EntryCheck::identity("S.P", Op::Sum(sp), Op::scale(0.0, Op::Identity), tol));
    for m in 0..4u8 {
        for n in 0..4u8 {
            let k = if m == n { -eta_f(m) } else { 0.0 };
            out.push(EntryCheck::bracket(format!("(P_{m},X_{n})"), at(Atom::P(m)), at(Atom::X(n)), Op::scale(k, Op::Identity), tol));
        }
    }
    for m in 0..4u8 {
        for n in m + 1..4u8 {
            // (X_m, X_n) = (S_m, S_n) M⁻²
            let rhs = Op::prod(vec![Op::Sum(vec![
                Op::prod(vec![at(Atom::S(m)), at(Atom::S(n))]),
                Op::scale(-1.0, Op::prod(vec![at(Atom::S(n)), at(Atom::S(m))])),
            ]), at(Atom::Minv), at(Atom::Minv)]);
            let rhs = Op::Scale(num_complex::Complex64::new(0.0, -1.0), Box::new(rhs));
            out.push(EntryCheck::bracket(format!("(X_{m},X_{n})"), at(Atom::X(m)), at(Atom::X(n)), rhs, tol));
        }
    }
    out.push(EntryCheck::bracket("(D,M)", at(Atom::D), at(Atom::M), at(Atom::M), tol));
    for m in 0..4u8 {
        out.push(EntryCheck::bracket(format!("(D,P_{m})"), at(Atom::D), at(Atom::P(m)), at(Atom::P(m)), tol));
    }
    out.push(EntryCheck::identity("Y^2", hexa_square_op(), Op::Identity, composite_tol));
    out
}

/// `Y² = −½(ZM + MZ) + η^{μν}Y_μY_ν` with `Y_μ = M·X_μ`, `Z = M·X² + ¾M⁻¹`.
fn hexa_square_op() -> Op {
    let at = Op::atom;
    let x2 = Op::Sum((0..4u8).map(|r| Op::scale(eta_f(r), Op::prod(vec![at(Atom::X(r)), at(Atom::X(r))]))).collect());
    let z = Op::Sum(vec![Op::sym(at(Atom::M), x2), Op::scale(0.75, at(Atom::Minv))]);
    let mut terms = vec![Op::scale(-1.0, Op::sym(z, at(Atom::M)))];
    for m in 0..4u8 {
        let y = Op::sym(at(Atom::M), at(Atom::X(m)));
        terms.push(Op::scale(eta_f(m), Op::prod(vec![y.clone(), y])));
    }
    Op::Sum(terms)
}
