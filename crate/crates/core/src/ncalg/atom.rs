//! Generator atoms and their total order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// A single generator symbol.
///
/// The derived order (variant first, then indices) is the global atom
/// rank. It restricts to `M⁻¹ < M < P < J < D < C` on basis A and to
/// `M⁻¹ < M < P < S < X` on basis B, so one order serves both systems.
/// `J` always stores its indices with the first strictly below the second.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Minv,
    M,
    P(u8),
    J(u8, u8),
    S(u8),
    D,
    X(u8),
    C(u8),
}

/// Which generating set an atom or polynomial lives in.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Basis {
    /// `{P, J, D, C, M, M⁻¹}`: the conformal generators.
    A,
    /// `{P, X, S, M, M⁻¹}`: localization and spin observables.
    B,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::A => "A",
            Basis::B => "B",
        })
    }
}

impl FromStr for Basis {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Basis::A),
            "B" | "b" => Ok(Basis::B),
            _ => Err(AlgebraError::UnknownBasis(s.to_string())),
        }
    }
}

fn check_index(kind: &str, i: u8) -> Result<(), AlgebraError> {
    if i < 4 {
        Ok(())
    } else {
        Err(AlgebraError::MalformedAtom(format!("{kind}_{i}")))
    }
}

impl Atom {
    pub fn p(mu: u8) -> Result<Atom, AlgebraError> {
        check_index("P", mu).map(|_| Atom::P(mu))
    }

    pub fn x(mu: u8) -> Result<Atom, AlgebraError> {
        check_index("X", mu).map(|_| Atom::X(mu))
    }

    pub fn s(mu: u8) -> Result<Atom, AlgebraError> {
        check_index("S", mu).map(|_| Atom::S(mu))
    }

    pub fn c(mu: u8) -> Result<Atom, AlgebraError> {
        check_index("C", mu).map(|_| Atom::C(mu))
    }

    /// `J_{μν}` as a sign and a stored atom: `J_{νμ}` maps to `−J_{μν}`.
    pub fn j(mu: u8, nu: u8) -> Result<(i8, Atom), AlgebraError> {
        if mu > 3 || nu > 3 || mu == nu {
            return Err(AlgebraError::MalformedAtom(format!("J_{mu}{nu}")));
        }
        Ok(if mu < nu {
            (1, Atom::J(mu, nu))
        } else {
            (-1, Atom::J(nu, mu))
        })
    }

    /// Checks the index invariants of an atom built directly from its variant.
    pub fn validate(self) -> Result<Atom, AlgebraError> {
        let ok = match self {
            Atom::P(i) | Atom::X(i) | Atom::S(i) | Atom::C(i) => i < 4,
            Atom::J(a, b) => a < b && b < 4,
            Atom::D | Atom::M | Atom::Minv => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(AlgebraError::MalformedAtom(format!("{self:?}")))
        }
    }

    pub fn in_basis(self, basis: Basis) -> bool {
        match self {
            Atom::Minv | Atom::M | Atom::P(_) => true,
            Atom::J(..) | Atom::D | Atom::C(_) => basis == Basis::A,
            Atom::S(_) | Atom::X(_) => basis == Basis::B,
        }
    }

    /// All atoms of a basis in increasing rank.
    pub fn all(basis: Basis) -> Vec<Atom> {
        let mut out = vec![Atom::Minv, Atom::M];
        out.extend((0..4).map(Atom::P));
        match basis {
            Basis::A => {
                for a in 0..4 {
                    for b in a + 1..4 {
                        out.push(Atom::J(a, b));
                    }
                }
                out.push(Atom::D);
                out.extend((0..4).map(Atom::C));
            }
            Basis::B => {
                out.extend((0..4).map(Atom::S));
                out.extend((0..4).map(Atom::X));
            }
        }
        out
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Minv => f.write_str("Minv"),
            Atom::M => f.write_str("M"),
            Atom::P(i) => write!(f, "P_{i}"),
            Atom::X(i) => write!(f, "X_{i}"),
            Atom::S(i) => write!(f, "S_{i}"),
            Atom::C(i) => write!(f, "C_{i}"),
            Atom::J(a, b) => write!(f, "J_{a}{b}"),
            Atom::D => f.write_str("D"),
        }
    }
}

impl FromStr for Atom {
    type Err = AlgebraError;

    /// Parses the stored spelling only; `J_10` is rejected here because it
    /// is not a stored atom (the expression parser handles the sign flip).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::MalformedAtom(s.to_string());
        match s {
            "M" => return Ok(Atom::M),
            "Minv" => return Ok(Atom::Minv),
            "D" => return Ok(Atom::D),
            _ => {}
        }
        let (head, idx) = s.split_once('_').ok_or_else(bad)?;
        let digits: Vec<u8> = idx
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
            .collect::<Result<_, _>>()?;
        let atom = match (head, digits.as_slice()) {
            ("P", [i]) => Atom::P(*i),
            ("X", [i]) => Atom::X(*i),
            ("S", [i]) => Atom::S(*i),
            ("C", [i]) => Atom::C(*i),
            ("J", [a, b]) => Atom::J(*a, *b),
            _ => return Err(bad()),
        };
        atom.validate().map_err(|_| bad())
    }
}

impl Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Minkowski metric `diag(1,−1,−1,−1)` on indices 0..4.
pub fn eta(mu: u8, nu: u8) -> i64 {
    match (mu, nu) {
        (0, 0) => 1,
        (a, b) if a == b => -1,
        _ => 0,
    }
}

/// Totally antisymmetric symbol with `ε_{0123} = sign`.
pub fn levi_civita(idx: [u8; 4], sign: i64) -> i64 {
    let mut v = idx;
    for i in 0..4 {
        for j in i + 1..4 {
            if v[i] == v[j] {
                return 0;
            }
        }
    }
    let mut parity = 1;
    for i in 0..4 {
        while v[i] as usize != i {
            let t = v[i] as usize;
            v.swap(i, t);
            parity = -parity;
        }
    }
    parity * sign
}
