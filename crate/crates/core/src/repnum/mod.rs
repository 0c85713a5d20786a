//! Momentum-space spinor representation on a 4d grid, used as a
//! numerical oracle for the bracket tables.
//!
//! States are two-component spinor fields of the contravariant momentum
//! `p^μ`, sampled on a periodic box centred on a wavepacket. Momenta and
//! masses act by multiplication, `X_μ`, `D` and `J_{μν}` through first
//! derivatives (spectral by default), and ℏ is set to one.

mod grid;
mod ops;
mod oracle;
mod spectral;

pub use grid::{DerivativeScheme, Grid, GridState};
pub use ops::{sigma_matrix, Op, Rep, SpinorMatrix};
pub use oracle::{
    calibrate_d_weight, convergence_check, default_packets, generate_manifest, make_wavepacket, standard_checks,
    CheckReport,
    ConvergenceReport, EntryCheck, Oracle, OracleConfig, PacketFamily, PacketSpec, Probe,
    LEAK_TOLERANCE,
};
pub use spectral::{derivative, gradient};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("grid needs n >= 24 (even) and epsilon > 0, got n={n}, epsilon={epsilon}")]
    BadGrid { n: usize, epsilon: f64 },
    #[error("wavepacket leaks outside the mass-shell window: fraction {leak:.3e} of the norm lies where p^2 < epsilon or p^0 <= 0")]
    Leak { leak: f64 },
    #[error("operator contains {0}, which has no grid representation")]
    Unrepresented(String),
    #[error("{0}")]
    Fit(String),
}
