//! Fixed workloads shared by the engine benchmarks.

use qhexa_core::ncalg::{Atom, Basis, GaussRational, NCPoly, Word};
use qhexa_core::repnum::{default_packets, make_wavepacket, DerivativeScheme, Grid, GridState, PacketFamily};

/// Deterministic products of `len` basis atoms with small integer coefficients.
pub fn words(basis: Basis, count: usize, len: usize) -> Vec<NCPoly> {
    let atoms = Atom::all(basis);
    (0..count)
        .map(|k| {
            let mut p = NCPoly::zero();
            for t in 0..3 {
                let word: Vec<Atom> = (0..len).map(|i| atoms[(7 * k + 5 * t + 3 * i * i + i) % atoms.len()]).collect();
                p.add_term(Word::from_atoms(&word), 0, GaussRational::from_int(1 + t as i64));
            }
            p
        })
        .collect()
}

/// A normalized sample packet on an `n⁴` spectral grid centred on it.
pub fn packet(n: usize) -> (Grid, GridState) {
    let spec = default_packets(1, 7, PacketFamily::Gaussian).remove(0);
    let grid = Grid::new(n, spec.center, 6.5 * spec.sigma, 0.5, DerivativeScheme::Spectral).expect("valid grid");
    let psi = make_wavepacket(&grid, &spec).expect("packet fits the grid");
    (grid, psi)
}
