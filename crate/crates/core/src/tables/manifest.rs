//! Versioned document holding the basis-B table and its calibration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ncalg::{Atom, Coefficient, GaussRational, NCPoly, Word};

use super::{basis_b_from_entries, AnsatzFit, BasisTable, Provenance, TableEntry, TableError};

pub const MANIFEST_VERSION: u32 = 1;

const EMBEDDED: &str = include_str!("../../data/basis_b_manifest.json");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ManifestError {
    #[error("manifest version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("manifest is missing entry {0}")]
    MissingEntry(String),
}

/// Integer that serializes as a JSON number when it fits in `i64` and as a
/// decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntDoc(pub BigInt);

impl Serialize for IntDoc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.collect_str(&self.0),
        }
    }
}

impl<'de> Deserialize<'de> for IntDoc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            I(i64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::I(v) => Ok(IntDoc(v.into())),
            Raw::S(s) => s.parse().map(IntDoc).map_err(serde::de::Error::custom),
        }
    }
}

fn ratio_doc(q: &BigRational) -> [IntDoc; 2] {
    [IntDoc(q.numer().clone()), IntDoc(q.denom().clone())]
}

fn ratio_from_doc(d: &[IntDoc; 2]) -> Result<BigRational, ManifestError> {
    if d[1].0.is_zero() {
        return Err(ManifestError::Malformed("zero denominator".into()));
    }
    let q = BigRational::new(d[0].0.clone(), d[1].0.clone());
    if q.numer() != &d[0].0 || q.denom() != &d[1].0 {
        return Err(ManifestError::Malformed(format!(
            "fraction {}/{} is not reduced with a positive denominator",
            d[0].0, d[1].0
        )));
    }
    Ok(q)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffDoc {
    pub re: [IntDoc; 2],
    pub im: [IntDoc; 2],
    pub hbar: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub coeff: CoeffDoc,
    pub word: Vec<Atom>,
}

/// Structured form of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDoc {
    pub terms: Vec<TermDoc>,
}

impl From<&NCPoly> for PolyDoc {
    fn from(p: &NCPoly) -> Self {
        PolyDoc {
            terms: p
                .terms()
                .map(|(m, c)| TermDoc {
                    coeff: CoeffDoc {
                        re: ratio_doc(&c.re),
                        im: ratio_doc(&c.im),
                        hbar: m.hbar,
                    },
                    word: m.word.atoms().to_vec(),
                })
                .collect(),
        }
    }
}

impl PolyDoc {
    pub fn to_poly(&self) -> Result<NCPoly, ManifestError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let c = GaussRational::new(ratio_from_doc(&t.coeff.re)?, ratio_from_doc(&t.coeff.im)?);
            if c.is_zero() {
                return Err(ManifestError::Malformed("zero coefficient stored".into()));
            }
            terms.push((Coefficient::new(c, t.coeff.hbar), Word::from_atoms(&t.word)));
        }
        let p = NCPoly::make_poly(terms).map_err(|e| ManifestError::Malformed(e.to_string()))?;
        if p.len() != self.terms.len() {
            return Err(ManifestError::Malformed("duplicate terms".into()));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("polynomial documents always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, ManifestError> {
        serde_json::from_str(s).map_err(|e| ManifestError::Malformed(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub left: Atom,
    pub right: Atom,
    pub bracket: PolyDoc,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    #[serde(rename = "D_weight")]
    pub d_weight: [IntDoc; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitDoc {
    pub left: Atom,
    pub right: Atom,
    pub candidates: Vec<PolyDoc>,
    pub coefficients: Vec<[IntDoc; 2]>,
    pub raw: Vec<[f64; 2]>,
    pub residual: f64,
    pub samples: usize,
}

/// The fitted basis-B table as a reproducible document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: u32,
    pub epsilon_convention: String,
    pub entries: Vec<ManifestEntry>,
    pub calibration: Calibration,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<FitDoc>,
}

impl Manifest {
    pub fn from_table(table: &BasisTable, d_weight: &BigRational, fits: &[AnsatzFit]) -> Self {
        Manifest {
            version: MANIFEST_VERSION,
            epsilon_convention: if table.epsilon_sign > 0 { "+1" } else { "-1" }.into(),
            entries: table
                .entries
                .iter()
                .map(|e| ManifestEntry {
                    left: e.left,
                    right: e.right,
                    bracket: PolyDoc::from(&e.bracket),
                    provenance: e.provenance.clone(),
                })
                .collect(),
            calibration: Calibration {
                d_weight: ratio_doc(d_weight),
            },
            fits: fits
                .iter()
                .map(|f| FitDoc {
                    left: f.left,
                    right: f.right,
                    candidates: f.candidates.iter().map(PolyDoc::from).collect(),
                    coefficients: f.coefficients.iter().map(ratio_doc).collect(),
                    raw: f.raw.iter().map(|&(a, b)| [a, b]).collect(),
                    residual: f.residual,
                    samples: f.samples,
                })
                .collect(),
        }
    }

    pub fn embedded() -> Result<Self, ManifestError> {
        Self::from_json(EMBEDDED)
    }

    pub fn embedded_text() -> &'static str {
        EMBEDDED
    }

    pub fn from_json(s: &str) -> Result<Self, ManifestError> {
        let m: Manifest = serde_json::from_str(s).map_err(|e| ManifestError::Malformed(e.to_string()))?;
        if m.version != MANIFEST_VERSION {
            return Err(ManifestError::Version {
                found: m.version,
                expected: MANIFEST_VERSION,
            });
        }
        if m.epsilon_convention != "+1" && m.epsilon_convention != "-1" {
            return Err(ManifestError::Malformed(format!(
                "epsilon_convention {:?}",
                m.epsilon_convention
            )));
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifests always serialize");
        s.push('\n');
        s
    }

    pub fn epsilon_sign(&self) -> i64 {
        if self.epsilon_convention == "-1" {
            -1
        } else {
            1
        }
    }

    pub fn d_weight(&self) -> Result<BigRational, ManifestError> {
        ratio_from_doc(&self.calibration.d_weight)
    }

    pub fn table_entries(&self) -> Result<Vec<TableEntry>, ManifestError> {
        self.entries
            .iter()
            .map(|e| {
                if e.left <= e.right {
                    return Err(ManifestError::Malformed(format!(
                        "entry ({}, {}) must have left above right",
                        e.left, e.right
                    )));
                }
                Ok(TableEntry {
                    left: e.left,
                    right: e.right,
                    bracket: e.bracket.to_poly()?,
                    provenance: e.provenance.clone(),
                })
            })
            .collect()
    }

    pub fn to_table(&self) -> Result<BasisTable, TableError> {
        basis_b_from_entries(self.table_entries()?, self.epsilon_sign())
    }

    pub fn fits(&self) -> Result<Vec<AnsatzFit>, ManifestError> {
        self.fits
            .iter()
            .map(|f| {
                Ok(AnsatzFit {
                    left: f.left,
                    right: f.right,
                    candidates: f.candidates.iter().map(|c| c.to_poly()).collect::<Result<_, _>>()?,
                    coefficients: f.coefficients.iter().map(ratio_from_doc).collect::<Result<_, _>>()?,
                    raw: f.raw.iter().map(|r| (r[0], r[1])).collect(),
                    residual: f.residual,
                    samples: f.samples,
                })
            })
            .collect()
    }
}
