//! Exit gate: one pass/fail line per acceptance criterion. Expected values
//! come from oracles written here (a 6×6 matrix realization of so(4,2),
//! closed forms, direct coordinate formulas), not from the engine's suites.

use num_bigint::BigInt;
use num_rational::BigRational;
use qhexa_cli::{eval_free, execute, parse, print_canonical};
use qhexa_core::conformal::{boost, eta6, inertial_mass_closed_form, AccelParams, HexaIndex, ObservableSet};
use qhexa_core::hexgeom::{
    conformal_map, hyperboloid_lift, hyperboloid_map, lift, metric_check, pair_invariant, project, rotate_hexa,
    HexaPoint, Hyperboloid, SpaceTimePoint,
};
use qhexa_core::ncalg::{minv_pow, Atom, Basis, GaussRational, NCPoly, RewriteSystem, Word};
use qhexa_core::repnum::{convergence_check, standard_checks, Oracle, OracleConfig};
use qhexa_core::tables;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

type Verdict = Result<String, String>;

fn err(e: impl Display) -> String {
    e.to_string()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn g(n: i64) -> GaussRational {
    GaussRational::from_int(n)
}

fn system(basis: Basis) -> Result<Arc<RewriteSystem>, String> {
    tables::system(basis).map_err(err)
}

fn observables(basis: Basis) -> Result<(Arc<RewriteSystem>, ObservableSet), String> {
    let rw = system(basis)?;
    let obs = match basis {
        Basis::A => ObservableSet::basis_a(&rw, tables::basis_b_table().map_err(err)?.epsilon_sign),
        Basis::B => ObservableSet::basis_b(&rw),
    }
    .map_err(err)?;
    Ok((rw, obs))
}

// ---- so(4,2) matrix oracle ----

type Mat = [[i64; 6]; 6];

fn metric(a: usize) -> i64 {
    eta6(HexaIndex::from_slot(a), HexaIndex::from_slot(a))
}

/// `(L_ab)_{rc} = δ_{ra} η_{bc} − δ_{rb} η_{ac}`, so `L_ab e_c = η_{bc} e_a − η_{ac} e_b`.
fn generator(a: usize, b: usize) -> Mat {
    let mut m = [[0; 6]; 6];
    m[a][b] += metric(b);
    m[b][a] -= metric(a);
    m
}

fn matmul(x: &Mat, y: &Mat) -> Mat {
    let mut out = [[0; 6]; 6];
    for r in 0..6 {
        for c in 0..6 {
            out[r][c] = (0..6).map(|k| x[r][k] * y[k][c]).sum();
        }
    }
    out
}

fn pairs() -> Vec<(usize, usize)> {
    (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect()
}

/// Coefficients of `[L_ab, L_cd]` on the `L_ef`, `e < f`.
fn structure(ab: (usize, usize), cd: (usize, usize)) -> Vec<((usize, usize), i64)> {
    let (x, y) = (generator(ab.0, ab.1), generator(cd.0, cd.1));
    let (xy, yx) = (matmul(&x, &y), matmul(&y, &x));
    let comm: Mat = std::array::from_fn(|r| std::array::from_fn(|c| xy[r][c] - yx[r][c]));
    let coeffs: Vec<_> = pairs()
        .into_iter()
        .map(|(e, f)| ((e, f), comm[e][f] / metric(f)))
        .filter(|&(_, k)| k != 0)
        .collect();
    let mut rebuilt = [[0; 6]; 6];
    for &((e, f), k) in &coeffs {
        let l = generator(e, f);
        for r in 0..6 {
            for c in 0..6 {
                rebuilt[r][c] += k * l[r][c];
            }
        }
    }
    assert_eq!(rebuilt, comm, "commutator outside the generator span");
    coeffs
}

fn jab(obs: &ObservableSet, a: usize, b: usize) -> &NCPoly {
    obs.j_at(HexaIndex::from_slot(a), HexaIndex::from_slot(b))
}

fn yv(obs: &ObservableSet, a: usize) -> &NCPoly {
    obs.y_at(HexaIndex::from_slot(a))
}

/// `Σ_r (L_ab)_{rc} Y_r`.
fn vector_action(obs: &ObservableSet, a: usize, b: usize, c: usize) -> NCPoly {
    let l = generator(a, b);
    let mut out = NCPoly::zero();
    for r in 0..6 {
        if l[r][c] != 0 {
            out.add_scaled(yv(obs, r), &g(l[r][c]), 0);
        }
    }
    out
}

fn so42_closure(basis: Basis) -> Result<(usize, Duration), String> {
    let start = Instant::now();
    let (rw, obs) = observables(basis)?;
    let gens = pairs();
    let mut n = 0;
    for (i, &ab) in gens.iter().enumerate() {
        for &cd in &gens[i + 1..] {
            let lhs = rw.commutator(jab(&obs, ab.0, ab.1), jab(&obs, cd.0, cd.1)).map_err(err)?;
            let mut rhs = NCPoly::zero();
            for ((e, f), k) in structure(ab, cd) {
                rhs.add_scaled(jab(&obs, e, f), &g(k), 0);
            }
            let rhs = rw.normalize(&rhs).map_err(err)?;
            check(lhs == rhs, || format!("{basis}: (J_{ab:?}, J_{cd:?}) residual {}", print_canonical(&(&lhs - &rhs))))?;
            n += 1;
        }
    }
    Ok((n, start.elapsed()))
}

fn criterion_1() -> Verdict {
    let mut parts = Vec::new();
    for basis in [Basis::A, Basis::B] {
        let (n, t) = so42_closure(basis)?;
        check(n == 105, || format!("{basis}: {n} brackets"))?;
        check(t <= Duration::from_secs(60), || format!("{basis}: {} exceeds 60 s", secs(t)))?;
        parts.push(format!("{basis} {n}/105 in {}", secs(t)));
    }
    Ok(parts.join(", "))
}

fn criterion_2() -> Verdict {
    let (rw, obs) = observables(Basis::B)?;
    let mut jy = 0;
    for (a, b) in pairs() {
        for c in 0..6 {
            let lhs = rw.commutator(jab(&obs, a, b), yv(&obs, c)).map_err(err)?;
            let rhs = rw.normalize(&vector_action(&obs, a, b, c)).map_err(err)?;
            check(lhs == rhs, || format!("(J_{a}{b}, Y_{c})"))?;
            jy += 1;
        }
    }
    let mut yy = 0;
    for (a, b) in pairs() {
        let lhs = rw.commutator(yv(&obs, a), yv(&obs, b)).map_err(err)?;
        check(lhs == rw.normalize(jab(&obs, a, b)).map_err(err)?, || format!("(Y_{a}, Y_{b})"))?;
        yy += 1;
    }
    check(jy == 90 && yy == 15, || format!("{jy} JY, {yy} YY"))?;
    Ok(format!("JY {jy}/90, YY {yy}/15 exact"))
}

fn criterion_3() -> Verdict {
    let (rw, obs) = observables(Basis::B)?;
    let mut y2 = NCPoly::zero();
    for a in 0..6 {
        y2.add_scaled(&rw.product(yv(&obs, a), yv(&obs, a)).map_err(err)?, &g(metric(a)), 0);
    }
    check(y2 == NCPoly::hbar(2), || format!("Y^2 = {}", print_canonical(&y2)))?;
    let mut s2 = NCPoly::zero();
    for m in 0..4u8 {
        let s = NCPoly::atom(Atom::S(m));
        s2.add_scaled(&rw.product(&s, &s).map_err(err)?, &g(if m == 0 { 1 } else { -1 }), 0);
    }
    let mut expect = NCPoly::zero();
    expect.add_scaled(&NCPoly::int(1), &GaussRational::ratio(-3, 4), 2);
    check(s2 == expect, || format!("S^2 = {}", print_canonical(&s2)))?;
    Ok("Y^2 = hbar^2, S^2 = -3/4 hbar^2".into())
}

fn eta4(m: usize) -> i64 {
    if m == 0 {
        1
    } else {
        -1
    }
}

fn criterion_4() -> Verdict {
    let (rw, obs) = observables(Basis::A)?;
    let mut px = 0;
    for m in 0..4 {
        for n in 0..4 {
            let c = rw.commutator(&obs.p[m], &obs.x[n]).map_err(err)?;
            let expect = if m == n { NCPoly::int(-eta4(m)) } else { NCPoly::zero() };
            check(c == expect, || format!("(P_{m}, X_{n}) = {}", print_canonical(&c)))?;
            px += 1;
        }
    }
    let mut xx = 0;
    let mut inverse = 0;
    for m in 0..4 {
        for n in m + 1..4 {
            let spin = rw.commutator(&obs.s[m], &obs.s[n]).map_err(err)?;
            let lhs = rw.commutator(&obs.x[m], &obs.x[n]).map_err(err)?;
            check(lhs == rw.product(&spin, &minv_pow(2)).map_err(err)?, || format!("(X_{m}, X_{n})"))?;
            xx += 1;
            let mut j = rw.sym_product(&obs.p[m], &obs.x[n]).map_err(err)?;
            j.sub_assign(&rw.sym_product(&obs.p[n], &obs.x[m]).map_err(err)?);
            j.add_assign(&spin);
            let stored = NCPoly::atom(Atom::J(m as u8, n as u8));
            check(rw.normalize(&j).map_err(err)? == stored, || format!("J_{m}{n} from P, X, S"))?;
            inverse += 1;
        }
    }
    let mut d = NCPoly::zero();
    for m in 0..4 {
        d.add_scaled(&rw.sym_product(&obs.p[m], &obs.x[m]).map_err(err)?, &g(eta4(m)), 0);
    }
    check(rw.normalize(&d).map_err(err)? == NCPoly::atom(Atom::D), || format!("P.X = {}", print_canonical(&d)))?;
    inverse += 1;
    check(px == 16 && xx == 6 && inverse == 7, || "component count".into())?;
    Ok(format!("PX {px}/16, XX {xx}/6, inverse {inverse}/7 in basis A"))
}

fn random_alpha(rng: &mut ChaCha8Rng) -> AccelParams {
    AccelParams::new(std::array::from_fn(|_| q(rng.gen_range(-6..=6), rng.gen_range(1..=5))))
}

/// `M − 2α^μ Y_μ + α²(Y_+ − Y_−)`.
fn inertial_mass(obs: &ObservableSet, a: &AccelParams) -> NCPoly {
    let mut out = NCPoly::atom(Atom::M);
    for mu in 0..4 {
        out.add_scaled(&obs.y[2 + mu], &GaussRational::real(&a.alpha[mu] * q(-2, 1)), 0);
    }
    let sq: BigRational = (0..4).map(|mu| &a.alpha[mu] * &a.alpha[mu] * q(eta4(mu), 1)).sum();
    out.add_scaled(&obs.y_diff(), &GaussRational::real(sq), 0);
    out
}

fn criterion_5() -> Verdict {
    let (rw, obs) = observables(Basis::B)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let alphas: Vec<AccelParams> = (0..5).map(|_| random_alpha(&mut rng)).collect();
    let m = NCPoly::atom(Atom::M);
    for a in &alphas {
        let r = boost(&rw, &obs, &m, a, 6).map_err(err)?;
        let expect = rw.normalize(&inertial_mass(&obs, a)).map_err(err)?;
        check(r.value == expect, || format!("boost(M) for {:?}", a.alpha))?;
        check(r.value == rw.normalize(&inertial_mass_closed_form(&obs, a)).map_err(err)?, || "library closed form".into())?;
        let order = if a.alpha_sq() == q(0, 1) { 1 } else { 2 };
        check(r.terminated && r.order == order, || format!("series stopped at {} (terminated {})", r.order, r.terminated))?;
    }
    let mut laws = 0;
    for i in 0..alphas.len() {
        let (a, b) = (&alphas[i], &alphas[(i + 1) % alphas.len()]);
        let mut targets = vec![m.clone()];
        targets.extend(obs.y.iter().cloned());
        for t in &targets {
            let once = boost(&rw, &obs, t, a, 6).map_err(err)?.value;
            let twice = boost(&rw, &obs, &once, b, 6).map_err(err)?.value;
            let direct = boost(&rw, &obs, t, &a.add(b), 6).map_err(err)?.value;
            check(twice == direct, || format!("group law for alpha#{i}"))?;
            laws += 1;
        }
    }
    Ok(format!("5 boosts match the closed form, order 2 detected, {laws} group-law checks"))
}

fn random_word_poly(rng: &mut ChaCha8Rng, atoms: &[Atom]) -> NCPoly {
    let mut p = NCPoly::zero();
    for _ in 0..2 {
        let len = rng.gen_range(1..=2);
        let word: Vec<Atom> = (0..len).map(|_| atoms[rng.gen_range(0..atoms.len())]).collect();
        p.add_term(Word::from_atoms(&word), 0, GaussRational::real(q(rng.gen_range(-3..=3), rng.gen_range(1..=3))));
    }
    p
}

fn criterion_6() -> Verdict {
    let (rw, obs) = observables(Basis::B)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut alphas = vec![
        AccelParams::zero(),
        AccelParams::from_ratios([(1, 2), (0, 1), (0, 1), (0, 1)]),
        AccelParams::from_ratios([(0, 1), (1, 3), (0, 1), (0, 1)]),
    ];
    alphas.extend((0..3).map(|_| random_alpha(&mut rng)));
    let atoms = Atom::all(Basis::B);
    let (mut eqs, mut conserved, mut leibniz) = (0, 0, 0);
    for (ai, a) in alphas.iter().enumerate() {
        let m_bar = rw.normalize(&inertial_mass(&obs, a)).map_err(err)?;
        let deriv = |f: &NCPoly| rw.commutator(f, &m_bar).map_err(err);
        let second = |f: &NCPoly| deriv(&deriv(f)?);
        let sq: BigRational = (0..4).map(|mu| &a.alpha[mu] * &a.alpha[mu] * q(eta4(mu), 1)).sum();
        for mu in 0..4 {
            let lower = &a.alpha[mu] * q(eta4(mu), 1);
            let expect = m_bar.scale(&GaussRational::real(lower * q(2, 1)));
            check(second(&obs.y[2 + mu])? == expect, || format!("alpha#{ai}: Y_{mu}''"))?;
            eqs += 1;
        }
        check(second(&NCPoly::atom(Atom::M))? == m_bar.scale(&GaussRational::real(sq * q(2, 1))), || {
            format!("alpha#{ai}: M''")
        })?;
        check(second(&obs.y_diff())? == m_bar.scale(&g(2)), || format!("alpha#{ai}: (Y_+ - Y_-)''"))?;
        eqs += 2;
        for mu in 0..4 {
            let p_bar = boost(&rw, &obs, &obs.p[mu], a, 6).map_err(err)?.value;
            check(deriv(&p_bar)?.is_zero(), || format!("alpha#{ai}: Pbar_{mu}'"))?;
            conserved += 1;
        }
        for m in 0..4 {
            for n in m + 1..4 {
                let j_bar = boost(&rw, &obs, &obs.j[m][n], a, 6).map_err(err)?.value;
                check(deriv(&j_bar)?.is_zero(), || format!("alpha#{ai}: Jbar_{m}{n}'"))?;
                conserved += 1;
            }
        }
        for _ in 0..3 {
            let (f, h) = (random_word_poly(&mut rng, &atoms), random_word_poly(&mut rng, &atoms));
            let lhs = deriv(&rw.product(&f, &h).map_err(err)?)?;
            let mut rhs = rw.product(&deriv(&f)?, &h).map_err(err)?;
            rhs.add_assign(&rw.product(&f, &deriv(&h)?).map_err(err)?);
            check(lhs == rhs, || format!("alpha#{ai}: Leibniz"))?;
            leibniz += 1;
        }
    }
    Ok(format!(
        "{eqs} free-fall equations over {} alphas, {conserved} conservation laws, {leibniz} Leibniz products",
        alphas.len()
    ))
}

fn criterion_7() -> Verdict {
    let (rw, obs) = observables(Basis::B)?;
    let mut n = 0;
    for a in 0..6 {
        for b in 0..6 {
            let inner = rw.commutator(yv(&obs, a), yv(&obs, b)).map_err(err)?;
            for c in 0..6 {
                let lhs = rw.commutator(&inner, yv(&obs, c)).map_err(err)?;
                let rhs = if a == b {
                    NCPoly::zero()
                } else if a < b {
                    vector_action(&obs, a, b, c)
                } else {
                    -&vector_action(&obs, b, a, c)
                };
                check(lhs == rw.normalize(&rhs).map_err(err)?, || format!("((Y_{a}, Y_{b}), Y_{c})"))?;
                n += 1;
            }
        }
    }
    check(n == 216, || format!("{n} components"))?;
    Ok(format!("YYY {n}/216 exact"))
}

fn criterion_8() -> Verdict {
    let mut parts = Vec::new();
    for basis in [Basis::A, Basis::B] {
        let rw = system(basis)?;
        let atoms = Atom::all(basis);
        let mut n = 0;
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                for k in j + 1..atoms.len() {
                    let (a, b, c) = (NCPoly::atom(atoms[i]), NCPoly::atom(atoms[j]), NCPoly::atom(atoms[k]));
                    let br = |x: &NCPoly, y: &NCPoly| rw.commutator(x, y).map_err(err);
                    let mut sum = br(&a, &br(&b, &c)?)?;
                    sum.add_assign(&br(&b, &br(&c, &a)?)?);
                    sum.add_assign(&br(&c, &br(&a, &b)?)?);
                    check(sum.is_zero(), || format!("{basis}: ({}, {}, {})", atoms[i], atoms[j], atoms[k]))?;
                    n += 1;
                }
            }
        }
        parts.push(format!("{basis} {n} triples"));
    }
    Ok(parts.join(", "))
}

fn criterion_9() -> Verdict {
    let table = tables::basis_b_table().map_err(err)?;
    check(table.entries.len() == 91, || format!("{} table entries", table.entries.len()))?;
    let config = OracleConfig::default();
    check(config.n == 32 && config.samples >= 8, || "oracle defaults changed".into())?;
    let checks = standard_checks(&table.entries, 1e-6, 1e-5);
    let has = |prefix: &str| checks.iter().filter(|c| c.id.starts_with(prefix)).count();
    check(has("spin product") == 10 && has("S^2") == 1 && has("(P_") == 16 && has("(X_") >= 6 && has("Y^2") == 1, || {
        "check list is missing identities".into()
    })?;
    let oracle = Oracle::new(config);
    let start = Instant::now();
    let rows = oracle.run_checks(&checks).map_err(err)?;
    let elapsed = start.elapsed();
    let failed: Vec<String> = rows.iter().filter(|r| !r.pass).map(|r| format!("{} {:.2e}", r.id, r.residual)).collect();
    check(failed.is_empty(), || format!("failed: {failed:?}"))?;
    check(elapsed <= Duration::from_secs(600), || format!("{} exceeds 10 min", secs(elapsed)))?;
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let conv_oracle = Oracle::new(OracleConfig {
        samples: 1,
        ..OracleConfig::default()
    });
    let conv = convergence_check(&conv_oracle, 24).map_err(err)?;
    check(conv.ratio >= 64.0, || format!("convergence ratio {:.1}", conv.ratio))?;
    Ok(format!(
        "{} checks on {} packets at n=32 in {}, worst {worst:.2e}; refinement {}->{} ratio {:.0}",
        rows.len(),
        oracle.packets.len(),
        secs(elapsed),
        conv.coarse_n,
        conv.fine_n,
        conv.ratio
    ))
}

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| ETA[i] * a[i] * b[i]).sum()
}

/// `x' = (x − αx²)/σ`, `λ' = λσ`, `σ = 1 − 2α·x + α²x²`.
fn sct(x: &[f64; 4], lam: f64, a: &[f64; 4]) -> ([f64; 4], f64) {
    let sigma = 1.0 - 2.0 * dot(a, x) + dot(a, a) * dot(x, x);
    (std::array::from_fn(|i| (x[i] - a[i] * dot(x, x)) / sigma), lam * sigma)
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(1.0)
}

fn sample_point(rng: &mut ChaCha8Rng, a: &[f64; 4]) -> ([f64; 4], f64) {
    loop {
        let x: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.5..1.5));
        let lam = rng.gen_range(0.3..2.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let sigma = 1.0 - 2.0 * dot(a, &x) + dot(a, a) * dot(&x, &x);
        if sigma.abs() > 0.05 {
            return (x, lam);
        }
    }
}

fn criterion_10() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let samples = 1000;
    let (mut quad, mut diagram, mut inv, mut hyper, mut ratio_range) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, (f64::MAX, 0.0f64));
    for _ in 0..samples {
        let a: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-0.4..0.4));
        let (x, lam) = sample_point(&mut rng, &a);
        let (x2, lam2) = sample_point(&mut rng, &a);
        let p = SpaceTimePoint::new(x, lam).map_err(err)?;
        let y = lift(&p);
        quad = quad.max(y.square().abs() / y.max_abs().powi(2).max(1.0));

        let (xe, le) = sct(&x, lam, &a);
        let mapped = conformal_map(&p, &a).map_err(err)?;
        let via = project(&rotate_hexa(&y, &a)).map_err(err)?;
        let scale = xe.iter().fold(le.abs(), |m, v| m.max(v.abs()));
        for i in 0..4 {
            diagram = diagram.max(rel(mapped.x[i], xe[i], scale)).max(rel(via.x[i], xe[i], scale));
        }
        diagram = diagram.max(rel(mapped.lam, le, scale)).max(rel(via.lam, le, scale));

        let q = SpaceTimePoint::new(x2, lam2).map_err(err)?;
        let before = pair_invariant(&y, &lift(&q));
        let after = pair_invariant(&lift(&mapped), &lift(&conformal_map(&q, &a).map_err(err)?));
        let rotated = pair_invariant(&rotate_hexa(&y, &a), &rotate_hexa(&lift(&q), &a));
        let s = y.max_abs() * lift(&q).max_abs();
        inv = inv.max(rel(after, before, s.max(before.abs()))).max(rel(rotated, before, s));

        let rho_sq: f64 = rng.gen_range(0.05..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let k_sq = -rho_sq.signum() * rng.gen_range(0.1..2.0);
        let h = Hyperboloid::new(x, rho_sq, k_sq).map_err(err)?;
        if let Ok(hm) = hyperboloid_map(&h, &a) {
            let direct = hyperboloid_lift(&hm).map_err(err)?;
            let turned = rotate_hexa(&hyperboloid_lift(&h).map_err(err)?, &a);
            hyper = hyper.max(projective_gap(&direct, &turned));
        }

        let small: [f64; 4] = std::array::from_fn(|i| x[i] / 3.0);
        let accel: [f64; 4] = std::array::from_fn(|i| a[i] * 0.75);
        if (1.0 - 2.0 * dot(&accel, &small) + dot(&accel, &accel) * dot(&small, &small)).abs() > 0.2 {
            let dx: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0) * 1e-2);
            let r = metric_check(&SpaceTimePoint::new(small, lam.abs()).map_err(err)?, &dx, &accel).map_err(err)?;
            if let Some(ratio) = r.ratio {
                ratio_range = (ratio_range.0.min(ratio), ratio_range.1.max(ratio));
            } else {
                check(r.pass, || "metric defect without a ratio".into())?;
            }
        }
    }
    check(quad <= 1e-12, || format!("quadric {quad:.2e}"))?;
    check(diagram <= 1e-9, || format!("commuting diagram {diagram:.2e}"))?;
    check(inv <= 1e-9, || format!("pair invariance {inv:.2e}"))?;
    check(hyper <= 1e-9, || format!("hyperboloid square {hyper:.2e}"))?;
    check(ratio_range.0 >= 3.5 && ratio_range.1 <= 4.5, || format!("metric ratios {ratio_range:?}"))?;
    Ok(format!(
        "{samples} samples: quadric {quad:.1e}, diagram {diagram:.1e}, invariance {inv:.1e}, hyperboloid {hyper:.1e}, metric ratio {:.3}..{:.3}",
        ratio_range.0, ratio_range.1
    ))
}

/// Distance between two six-vectors after the best common rescaling.
fn projective_gap(u: &HexaPoint, v: &HexaPoint) -> f64 {
    let uv: f64 = (0..6).map(|i| u.y[i] * v.y[i]).sum();
    let uu: f64 = (0..6).map(|i| u.y[i] * u.y[i]).sum();
    let k = uv / uu;
    (0..6).map(|i| (k * u.y[i] - v.y[i]).abs()).fold(0.0, f64::max) / v.max_abs().max(1.0)
}

fn random_poly(rng: &mut ChaCha8Rng, atoms: &[Atom]) -> NCPoly {
    let mut p = NCPoly::zero();
    for _ in 0..rng.gen_range(0..=6) {
        let word: Vec<Atom> = (0..rng.gen_range(0..=4)).map(|_| atoms[rng.gen_range(0..atoms.len())]).collect();
        let re = q(rng.gen_range(-40..=40), rng.gen_range(1..=12));
        let im = q(rng.gen_range(-40..=40), rng.gen_range(1..=12));
        p.add_term(Word::from_atoms(&word), rng.gen_range(0..=3), GaussRational::new(re, im));
    }
    p
}

fn cli(args: &[&str]) -> qhexa_cli::Outcome {
    execute(std::iter::once("qhexa").chain(args.iter().copied()))
}

fn criterion_11() -> Verdict {
    let mut atoms = Atom::all(Basis::A);
    atoms.extend(Atom::all(Basis::B));
    atoms.sort();
    atoms.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..1000 {
        let p = random_poly(&mut rng, &atoms);
        let text = print_canonical(&p);
        let back = eval_free(&parse(&text).map_err(|e| format!("#{i} {text}: {e}"))?).map_err(err)?;
        check(back == p, || format!("#{i} round trip of {text}"))?;
    }
    let report = ["--format", "json", "--seed", "3", "alg", "verify", "--suite", "traY"];
    let (a, b) = (cli(&report), cli(&report));
    check(a.code == 0 && a.stdout == b.stdout && !a.stdout.is_empty(), || "reports differ between runs".into())?;
    let codes = [
        (cli(&["alg", "commute", "P_0", "X_0"]).code, 0),
        (cli(&["alg", "verify", "--suite", "CY", "--spin-term", "printed"]).code, 1),
        (cli(&["alg", "normalize", "X_0 . X_1 . X_2"]).code, 2),
        (cli(&["alg", "verify", "--suite", "nope"]).code, 2),
        (cli(&["rep", "check", "--grid", "23"]).code, 2),
        (cli(&["--step-bound", "1", "alg", "commute", "X_0", "X_1"]).code, 3),
    ];
    for (i, &(got, want)) in codes.iter().enumerate() {
        check(got == want, || format!("exit case #{i}: {got} instead of {want}"))?;
    }
    Ok(format!("1000 round trips, byte-identical reports, {} exit codes honored", codes.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("so(4,2) closure", criterion_1),
        ("vector law", criterion_2),
        ("Casimir identities", criterion_3),
        ("localization", criterion_4),
        ("finite transformations", criterion_5),
        ("free fall", criterion_6),
        ("covariant Newton law", criterion_7),
        ("Jacobi suites", criterion_8),
        ("grid oracle", criterion_9),
        ("classical geometry", criterion_10),
        ("command line", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {} ({name})", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match verdict {
            Ok(detail) => println!("{label}: PASS [{}] {detail}", secs(start.elapsed())),
            Err(why) => {
                failures += 1;
                println!("{label}: FAIL [{}] {why}", secs(start.elapsed()));
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
