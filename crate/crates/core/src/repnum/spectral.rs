use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::{DerivativeScheme, Grid, GridState};

const CENTRAL8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const BATCH: usize = 64;

struct Plans {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    ik: Vec<Complex64>,
}

fn plans(grid: &Grid) -> Plans {
    let n = grid.n;
    let mut planner = FftPlanner::new();
    let dk = 2.0 * PI / (n as f64 * grid.spacing());
    let ik = (0..n)
        .map(|j| {
            let m = if j < n / 2 {
                j as f64
            } else if j == n / 2 {
                0.0
            } else {
                j as f64 - n as f64
            };
            Complex64::new(0.0, m * dk / n as f64)
        })
        .collect();
    Plans {
        fwd: planner.plan_fft_forward(n),
        inv: planner.plan_fft_inverse(n),
        ik,
    }
}

/// `∂ψ/∂p^axis` on the grid.
pub fn derivative(grid: &Grid, state: &GridState, axis: usize) -> GridState {
    assert!(axis < 4);
    let n = grid.n;
    let stride = n.pow(3 - axis as u32);
    let block = n * stride;
    let mut out = grid.zero_state();
    let pl = match grid.scheme {
        DerivativeScheme::Spectral => Some(plans(grid)),
        DerivativeScheme::Central8 => None,
    };
    let inv_h = 1.0 / grid.spacing();
    out.psi
        .par_chunks_mut(block)
        .zip(state.psi.par_chunks(block))
        .for_each(|(dst, src)| {
            let mut buf = vec![Complex64::new(0.0, 0.0); n * BATCH];
            let mut scratch = Vec::new();
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let mut inner0 = 0;
            while inner0 < stride {
                let count = BATCH.min(stride - inner0);
                for comp in 0..2 {
                    match &pl {
                        Some(p) => {
                            for l in 0..count {
                                for i in 0..n {
                                    buf[l * n + i] = src[i * stride + inner0 + l][comp];
                                }
                            }
                            let data = &mut buf[..count * n];
                            let need = p.fwd.get_inplace_scratch_len().max(p.inv.get_inplace_scratch_len());
                            if scratch.len() < need {
                                scratch.resize(need, Complex64::new(0.0, 0.0));
                            }
                            p.fwd.process_with_scratch(data, &mut scratch);
                            for chunk in data.chunks_mut(n) {
                                for (v, k) in chunk.iter_mut().zip(&p.ik) {
                                    *v *= k;
                                }
                            }
                            p.inv.process_with_scratch(data, &mut scratch);
                            for l in 0..count {
                                for i in 0..n {
                                    dst[i * stride + inner0 + l][comp] = buf[l * n + i];
                                }
                            }
                        }
                        None => {
                            for l in 0..count {
                                for i in 0..n {
                                    line[i] = src[i * stride + inner0 + l][comp];
                                }
                                for i in 0..n {
                                    let mut acc = Complex64::new(0.0, 0.0);
                                    for (k, c) in CENTRAL8.iter().enumerate() {
                                        let d = k + 1;
                                        let up = if i + d < n { line[i + d] } else { Complex64::new(0.0, 0.0) };
                                        let down = if i >= d { line[i - d] } else { Complex64::new(0.0, 0.0) };
                                        acc += (up - down) * *c;
                                    }
                                    dst[i * stride + inner0 + l][comp] = acc * inv_h;
                                }
                            }
                        }
                    }
                }
                inner0 += count;
            }
        });
    out
}

/// All four partial derivatives.
pub fn gradient(grid: &Grid, state: &GridState) -> [GridState; 4] {
    std::array::from_fn(|a| derivative(grid, state, a))
}
