use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::RepError;

pub type Spinor = [Complex64; 2];

/// How first derivatives along a grid axis are taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivativeScheme {
    /// FFT on the periodic box.
    Spectral,
    /// Centred 8th-order finite differences, zero outside the box.
    Central8,
}

/// Pointwise fields shared by every state on a grid.
#[derive(Debug)]
pub(crate) struct Fields {
    /// Contravariant coordinates `p^μ`.
    pub coords: Vec<[f64; 4]>,
    /// Window-weighted `M`, `M⁻¹`, `M⁻²` and `d(M⁻²)/d(p²)`.
    pub m: Vec<f64>,
    pub minv: Vec<f64>,
    pub minv2: Vec<f64>,
    pub dminv2: Vec<f64>,
    pub window: Vec<f64>,
}

/// A periodic box of `n⁴` momentum nodes centred on `center`.
#[derive(Clone, Debug)]
pub struct Grid {
    pub n: usize,
    pub center: [f64; 4],
    pub half_width: f64,
    pub epsilon: f64,
    pub scheme: DerivativeScheme,
    pub(crate) fields: Arc<Fields>,
}

/// `C²` step rising from 0 at `p² = ε/2` to 1 at `p² = ε`, restricted to `p⁰ > 0`.
fn window(s: f64, p0: f64, eps: f64) -> (f64, f64) {
    if p0 <= 0.0 || s <= 0.5 * eps {
        return (0.0, 0.0);
    }
    if s >= eps {
        return (1.0, 0.0);
    }
    let t = (s - 0.5 * eps) / (0.5 * eps);
    let w = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    let dw = 30.0 * t * t * (1.0 - t) * (1.0 - t) / (0.5 * eps);
    (w, dw)
}

impl Grid {
    pub fn new(
        n: usize,
        center: [f64; 4],
        half_width: f64,
        epsilon: f64,
        scheme: DerivativeScheme,
    ) -> Result<Self, RepError> {
        if n < 24 || n % 2 != 0 || !(epsilon > 0.0) || !(half_width > 0.0) {
            return Err(RepError::BadGrid { n, epsilon });
        }
        let h = 2.0 * half_width / n as f64;
        let len = n * n * n * n;
        let coords: Vec<[f64; 4]> = (0..len)
            .into_par_iter()
            .map(|idx| {
                let mut c = [0.0; 4];
                let mut r = idx;
                for axis in (0..4).rev() {
                    let i = r % n;
                    r /= n;
                    c[axis] = center[axis] + (i as f64 - (n / 2) as f64) * h;
                }
                c
            })
            .collect();
        let mut m = vec![0.0; len];
        let mut minv = vec![0.0; len];
        let mut minv2 = vec![0.0; len];
        let mut dminv2 = vec![0.0; len];
        let mut win = vec![0.0; len];
        for (k, c) in coords.iter().enumerate() {
            let s = c[0] * c[0] - c[1] * c[1] - c[2] * c[2] - c[3] * c[3];
            let (w, dw) = window(s, c[0], epsilon);
            if w == 0.0 {
                continue;
            }
            let r = s.sqrt();
            m[k] = w * r;
            minv[k] = w / r;
            minv2[k] = w * w / s;
            dminv2[k] = 2.0 * w * dw / s - w * w / (s * s);
            win[k] = w;
        }
        Ok(Grid {
            n,
            center,
            half_width,
            epsilon,
            scheme,
            fields: Arc::new(Fields {
                coords,
                m,
                minv,
                minv2,
                dminv2,
                window: win,
            }),
        })
    }

    pub fn with_scheme(&self, scheme: DerivativeScheme) -> Grid {
        Grid {
            scheme,
            ..self.clone()
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(4)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(4)
    }

    pub fn coords(&self) -> &[[f64; 4]] {
        &self.fields.coords
    }

    pub fn window(&self) -> &[f64] {
        &self.fields.window
    }

    pub fn index(&self, i: [usize; 4]) -> usize {
        ((i[0] * self.n + i[1]) * self.n + i[2]) * self.n + i[3]
    }

    pub fn zero_state(&self) -> GridState {
        GridState {
            psi: vec![[Complex64::new(0.0, 0.0); 2]; self.len()],
        }
    }
}

/// Two-component spinor field on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridState {
    pub psi: Vec<Spinor>,
}

impl GridState {
    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// `Σ |ψ|² · mask`, without the cell volume.
    pub fn norm_sq_masked(&self, mask: Option<&[f64]>) -> f64 {
        self.psi
            .par_iter()
            .enumerate()
            .map(|(k, v)| {
                let w = mask.map_or(1.0, |m| m[k]);
                w * (v[0].norm_sqr() + v[1].norm_sqr())
            })
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq_masked(None).sqrt()
    }

    /// `Σ conj(self)·other`, without the cell volume.
    pub fn inner(&self, other: &GridState) -> Complex64 {
        self.psi
            .par_iter()
            .zip(other.psi.par_iter())
            .map(|(a, b)| a[0].conj() * b[0] + a[1].conj() * b[1])
            .sum()
    }

    pub fn scaled(&self, c: Complex64) -> GridState {
        GridState {
            psi: self.psi.par_iter().map(|v| [v[0] * c, v[1] * c]).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &GridState, c: Complex64) {
        self.psi.par_iter_mut().zip(other.psi.par_iter()).for_each(|(a, b)| {
            a[0] += b[0] * c;
            a[1] += b[1] * c;
        });
    }

    pub fn sub(&self, other: &GridState) -> GridState {
        let mut out = self.clone();
        out.add_scaled(other, Complex64::new(-1.0, 0.0));
        out
    }

    /// Multiplies by a real scalar field.
    pub fn times_field(&self, f: &[f64]) -> GridState {
        GridState {
            psi: self
                .psi
                .par_iter()
                .zip(f.par_iter())
                .map(|(v, &s)| [v[0] * s, v[1] * s])
                .collect(),
        }
    }

    /// Content hash used to reuse derivative work on identical inputs.
    pub(crate) fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0x9e37_79b9_7f4a_7c15 ^ self.psi.len() as u64;
        for v in &self.psi {
            for c in v {
                for x in [c.re.to_bits(), c.im.to_bits()] {
                    h = (h ^ x).wrapping_mul(0x1000_0000_01b3).rotate_left(23);
                }
            }
        }
        h
    }
}
