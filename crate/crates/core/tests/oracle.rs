//! Grid oracle checks. Grids at n = 32 hold about a gigabyte of derivative
//! images, so everything runs inside one test.

use num_complex::Complex64;
use qhexa_core::ncalg::{Atom, NCPoly};
use qhexa_core::repnum::{
    calibrate_d_weight, default_packets, make_wavepacket, DerivativeScheme, EntryCheck, Grid, Oracle, OracleConfig,
    Op, PacketFamily, PacketSpec, Rep, RepError,
};
use qhexa_core::tables::{self, derived_candidates, snap_fit};

fn one_packet(family: PacketFamily) -> OracleConfig {
    OracleConfig {
        samples: 1,
        family,
        ..OracleConfig::default()
    }
}

fn entry_checks(pairs: &[(Atom, Atom)], tol: f64) -> Vec<EntryCheck> {
    let table = tables::basis_b_table().unwrap();
    pairs
        .iter()
        .map(|&(l, r)| {
            let e = table.entries.iter().find(|e| e.left == l && e.right == r).unwrap();
            EntryCheck::table(e, tol)
        })
        .collect()
}

fn bad_inputs() {
    let err = Grid::new(23, [2.5, 0.0, 0.0, 0.0], 1.0, 0.5, DerivativeScheme::Spectral).unwrap_err();
    assert!(matches!(err, RepError::BadGrid { n: 23, .. }));
    assert!(Grid::new(32, [2.5, 0.0, 0.0, 0.0], 1.0, 0.0, DerivativeScheme::Spectral).is_err());

    // p² = 0.28 lies below the mass window ε = 0.5.
    let grid = Grid::new(24, [0.8, 0.6, 0.0, 0.0], 1.0, 0.5, DerivativeScheme::Spectral).unwrap();
    let near_cone = PacketSpec::gaussian([0.8, 0.6, 0.0, 0.0], 0.15, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    assert!(matches!(make_wavepacket(&grid, &near_cone), Err(RepError::Leak { .. })));

    let c_atom = Op::atom(Atom::C(0));
    let grid = Grid::new(24, [2.5, 0.0, 0.0, 0.0], 1.0, 0.5, DerivativeScheme::Spectral).unwrap();
    let rep = Rep::new(grid.clone(), 2.0, 1);
    let psi = grid.zero_state();
    assert!(matches!(c_atom.apply(&rep, &psi), Err(RepError::Unrepresented(_))));
}

fn calibration() {
    let oracle = Oracle::new(OracleConfig {
        n: 24,
        ..one_packet(PacketFamily::Gaussian)
    });
    let (w, snapped) = calibrate_d_weight(&oracle).unwrap();
    assert!((w - 2.0).abs() < 1e-6, "D weight {w}");
    assert_eq!(snapped.unwrap(), num_rational::BigRational::from_integer(2.into()));
}

fn linearity() {
    let specs = default_packets(2, 3, PacketFamily::Squeezed);
    let grid = Grid::new(24, specs[0].center, 6.5 * specs[0].sigma, 0.5, DerivativeScheme::Spectral).unwrap();
    let psi = make_wavepacket(&grid, &specs[0]).unwrap();
    let mut shifted = specs[0].clone();
    shifted.spinor = [shifted.spinor[1], -shifted.spinor[0]];
    let phi = make_wavepacket(&grid, &shifted).unwrap();
    let rep = Rep::new(grid, 2.0, 1);
    let k = Complex64::new(0.5, -2.0);
    let mut combo = psi.clone();
    combo.add_scaled(&phi, k);
    for a in [Atom::X(0), Atom::X(2), Atom::D, Atom::J(1, 3), Atom::S(1)] {
        let lhs = rep.atom(a, &combo).unwrap();
        let mut rhs = rep.atom(a, &psi).unwrap();
        rhs.add_scaled(&rep.atom(a, &phi).unwrap(), k);
        let rel = lhs.sub(&rhs).norm() / rhs.norm();
        assert!(rel < 1e-12, "{a}: {rel}");
    }
}

fn entries_on_one_packet() {
    let pairs = [
        (Atom::X(0), Atom::M),
        (Atom::X(3), Atom::Minv),
        (Atom::X(1), Atom::S(2)),
        (Atom::X(2), Atom::X(1)),
        (Atom::S(1), Atom::S(0)),
        (Atom::S(3), Atom::P(0)),
    ];
    let spectral = Oracle::new(one_packet(PacketFamily::Gaussian));
    for r in spectral.run_checks(&entry_checks(&pairs, 1e-6)).unwrap() {
        assert!(r.pass, "{} residual {:.3e}", r.id, r.residual);
    }
    // Eighth-order differences zero the field outside the box; they are
    // less accurate but still consistent.
    let fd = Oracle::new(OracleConfig {
        scheme: DerivativeScheme::Central8,
        ..one_packet(PacketFamily::Gaussian)
    });
    let fd_rows = fd.run_checks(&entry_checks(&pairs[..1], 1e-3)).unwrap();
    assert!(fd_rows[0].pass, "Central8 residual {:.3e}", fd_rows[0].residual);
}

fn squeezed_fits_reproduce_the_table() {
    let oracle = Oracle::new(OracleConfig {
        samples: 2,
        ..one_packet(PacketFamily::Squeezed)
    });
    let table = tables::basis_b_table().unwrap();
    for (l, r) in [(Atom::X(0), Atom::M), (Atom::X(2), Atom::S(1)), (Atom::S(2), Atom::S(1))] {
        let cands = derived_candidates(l, r, table.epsilon_sign);
        let raw = oracle.fit_operator(l, r, &cands).unwrap();
        let fit = snap_fit(l, r, cands, raw, 1e-6).unwrap();
        let fitted = fit
            .candidates
            .iter()
            .zip(&fit.coefficients)
            .fold(NCPoly::zero(), |acc, (c, q)| acc + c.scale_rational(q));
        let stored = &table.entries.iter().find(|e| e.left == l && e.right == r).unwrap().bracket;
        assert_eq!(&table.system.normalize(&fitted).unwrap(), stored, "({l},{r})");
    }
}

#[test]
fn grid_oracle() {
    bad_inputs();
    calibration();
    linearity();
    entries_on_one_packet();
    squeezed_fits_reproduce_the_table();
}
