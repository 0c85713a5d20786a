//! Classical hexaspherical geometry.
//!
//! Points of Minkowski space with a conformal factor are lifted to the
//! quadric `y² = 0` of a 6d space with metric `diag(−1, 1, 1, −1, −1, −1)`
//! over the slots `(−, +, 0, 1, 2, 3)`. Accelerated-frame changes act on
//! the lift as linear rotations. Hyperboloids (center and signed squared
//! radius) are lifted off the quadric. Squared quantities stay signed and
//! are never square-rooted, except to pick the real scale of a
//! hyperboloid lift.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal::AccelParams;

/// Exact-construction tolerance.
pub const EXACT_TOL: f64 = 1e-12;
/// Composed-map tolerance.
pub const COMPOSED_TOL: f64 = 1e-9;

const ETA4: [f64; 4] = [1.0, -1.0, -1.0, -1.0];
const ETA6: [f64; 6] = [-1.0, 1.0, 1.0, -1.0, -1.0, -1.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("conformal factor must be nonzero")]
    ZeroFactor,
    #[error("point at infinity: y_- + y_+ = 0")]
    PointAtInfinity,
    #[error("conformal horizon: denominator {0:.3e} vanishes")]
    Horizon(f64),
    #[error("degenerate hyperboloid: rho^2 = 0 (lift the center as a point instead)")]
    DegenerateRadius,
    #[error("lambda^2 = {0} is not positive, so the lift has no real scale")]
    NonRealScale(f64),
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| ETA4[i] * a[i] * b[i]).sum()
}

fn lower(x: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| ETA4[i] * x[i])
}

/// A spacetime point `x^μ` with its conformal factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub x: [f64; 4],
    pub lam: f64,
}

impl SpaceTimePoint {
    pub fn new(x: [f64; 4], lam: f64) -> Result<Self, GeomError> {
        if lam == 0.0 {
            return Err(GeomError::ZeroFactor);
        }
        Ok(SpaceTimePoint { x, lam })
    }

    pub fn interval(&self) -> f64 {
        dot4(&self.x, &self.x)
    }
}

/// Lower-index 6d coordinates `y_a` over `(−, +, 0, 1, 2, 3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HexaPoint {
    pub y: [f64; 6],
}

impl HexaPoint {
    pub fn minus(&self) -> f64 {
        self.y[0]
    }

    pub fn plus(&self) -> f64 {
        self.y[1]
    }

    pub fn mu(&self, mu: usize) -> f64 {
        self.y[2 + mu]
    }

    /// `η^{ab} y_a y'_b`.
    pub fn dot(&self, other: &HexaPoint) -> f64 {
        (0..6).map(|i| ETA6[i] * self.y[i] * other.y[i]).sum()
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    pub fn sub(&self, other: &HexaPoint) -> HexaPoint {
        HexaPoint {
            y: std::array::from_fn(|i| self.y[i] - other.y[i]),
        }
    }

    pub fn scaled(&self, k: f64) -> HexaPoint {
        HexaPoint {
            y: std::array::from_fn(|i| k * self.y[i]),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn from_parts(sum: f64, diff: f64, low: [f64; 4]) -> HexaPoint {
        // sum = y_- + y_+, diff = y_+ - y_-
        HexaPoint {
            y: [(sum - diff) / 2.0, (sum + diff) / 2.0, low[0], low[1], low[2], low[3]],
        }
    }
}

/// Hyperboloid `(x − ω)² + ρ² = 0` with scale `k² = y²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperboloid {
    /// Center `ω^μ`, upper index.
    pub omega: [f64; 4],
    pub rho_sq: f64,
    pub k_sq: f64,
    pub lam_sq: f64,
}

impl Hyperboloid {
    /// Builds with `λ² = −k²/ρ²`.
    pub fn new(omega: [f64; 4], rho_sq: f64, k_sq: f64) -> Result<Self, GeomError> {
        if rho_sq == 0.0 {
            return Err(GeomError::DegenerateRadius);
        }
        Ok(Hyperboloid {
            omega,
            rho_sq,
            k_sq,
            lam_sq: -k_sq / rho_sq,
        })
    }
}

/// `1 − 2α_μx^μ + α²x²`.
pub fn conformal_denominator(x: &[f64; 4], alpha: &[f64; 4]) -> f64 {
    1.0 - 2.0 * dot4(alpha, x) + dot4(alpha, alpha) * dot4(x, x)
}

pub fn lift(p: &SpaceTimePoint) -> HexaPoint {
    let low = lower(&p.x);
    HexaPoint::from_parts(-p.lam, p.lam * p.interval(), std::array::from_fn(|i| p.lam * low[i]))
}

pub fn project(y: &HexaPoint) -> Result<SpaceTimePoint, GeomError> {
    let lam = -(y.minus() + y.plus());
    if lam == 0.0 {
        return Err(GeomError::PointAtInfinity);
    }
    Ok(SpaceTimePoint {
        x: std::array::from_fn(|i| ETA4[i] * y.mu(i) / lam),
        lam,
    })
}

/// Change to the frame accelerated by `α^μ`.
pub fn conformal_map(p: &SpaceTimePoint, alpha: &[f64; 4]) -> Result<SpaceTimePoint, GeomError> {
    let den = conformal_denominator(&p.x, alpha);
    if den == 0.0 {
        return Err(GeomError::Horizon(den));
    }
    let x2 = p.interval();
    Ok(SpaceTimePoint {
        x: std::array::from_fn(|i| (p.x[i] - x2 * alpha[i]) / den),
        lam: den * p.lam,
    })
}

/// The 6d rotation induced by [`conformal_map`].
pub fn rotate_hexa(y: &HexaPoint, alpha: &[f64; 4]) -> HexaPoint {
    let diff = y.plus() - y.minus();
    let a_low = lower(alpha);
    let a_dot_y: f64 = (0..4).map(|i| alpha[i] * y.mu(i)).sum();
    // y_- and y_+ both move by half the change of their sum.
    let shift = a_dot_y - 0.5 * dot4(alpha, alpha) * diff;
    HexaPoint {
        y: [
            y.minus() + shift,
            y.plus() + shift,
            y.mu(0) - a_low[0] * diff,
            y.mu(1) - a_low[1] * diff,
            y.mu(2) - a_low[2] * diff,
            y.mu(3) - a_low[3] * diff,
        ],
    }
}

/// `(y − y')²`.
pub fn pair_invariant(y: &HexaPoint, y2: &HexaPoint) -> f64 {
    y.sub(y2).square()
}

/// Lift with the positive real scale `λ = √(λ²)`.
pub fn hyperboloid_lift(h: &Hyperboloid) -> Result<HexaPoint, GeomError> {
    if h.rho_sq == 0.0 {
        return Err(GeomError::DegenerateRadius);
    }
    if !(h.lam_sq > 0.0) {
        return Err(GeomError::NonRealScale(h.lam_sq));
    }
    let lam = h.lam_sq.sqrt();
    let low = lower(&h.omega);
    let w = dot4(&h.omega, &h.omega) + h.rho_sq;
    Ok(HexaPoint::from_parts(-lam, lam * w, std::array::from_fn(|i| lam * low[i])))
}

/// Center and radius in the accelerated frame; `k²` is unchanged.
pub fn hyperboloid_map(h: &Hyperboloid, alpha: &[f64; 4]) -> Result<Hyperboloid, GeomError> {
    let w = dot4(&h.omega, &h.omega) + h.rho_sq;
    let q = 1.0 - 2.0 * dot4(alpha, &h.omega) + dot4(alpha, alpha) * w;
    if q == 0.0 {
        return Err(GeomError::Horizon(q));
    }
    Ok(Hyperboloid {
        omega: std::array::from_fn(|i| (h.omega[i] - alpha[i] * w) / q),
        rho_sq: h.rho_sq / (q * q),
        k_sq: h.k_sq,
        lam_sq: h.lam_sq * q * q,
    })
}

/// Finite-difference comparison of `(dy)²` with `λ²(dx)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub point: [f64; 4],
    pub lam: f64,
    pub defect: f64,
    pub defect_half: f64,
    pub ratio: Option<f64>,
    pub pass: bool,
}

/// Starts from an inertial point `p` with constant factor `p.lam`, moves to
/// the frame accelerated by `α`, and differentiates the lift of the
/// resulting factor field along `dx` there, at step `dx` and `dx/2`.
pub fn metric_check(p: &SpaceTimePoint, dx: &[f64; 4], alpha: &[f64; 4]) -> Result<MetricReport, GeomError> {
    let center = conformal_map(p, alpha)?;
    let back = [-alpha[0], -alpha[1], -alpha[2], -alpha[3]];
    let lift_at = |xbar: [f64; 4]| -> Result<HexaPoint, GeomError> {
        let inertial = conformal_map(&SpaceTimePoint { x: xbar, lam: 1.0 }, &back)?;
        let lam = p.lam * conformal_denominator(&inertial.x, alpha);
        Ok(lift(&SpaceTimePoint { x: xbar, lam }))
    };
    let defect_at = |scale: f64| -> Result<f64, GeomError> {
        let step: [f64; 4] = std::array::from_fn(|i| scale * dx[i]);
        let fwd = lift_at(std::array::from_fn(|i| center.x[i] + step[i]))?;
        let bwd = lift_at(std::array::from_fn(|i| center.x[i] - step[i]))?;
        let dy = fwd.sub(&bwd).scaled(0.5);
        let expect = center.lam * center.lam * dot4(&step, &step);
        let norm = center.lam * center.lam * step.iter().map(|v| v * v).sum::<f64>();
        Ok((dy.square() - expect).abs() / norm)
    };
    let defect = defect_at(1.0)?;
    let defect_half = defect_at(0.5)?;
    let floor = 1e-12;
    let ratio = (defect_half > floor).then(|| defect / defect_half);
    let pass = match ratio {
        Some(r) => (3.5..=4.5).contains(&r),
        None => defect <= 4.0 * floor,
    };
    Ok(MetricReport {
        point: center.x,
        lam: center.lam,
        defect,
        defect_half,
        ratio,
        pass,
    })
}

/// Floating-point view of exact acceleration parameters.
pub fn alpha_f64(a: &AccelParams) -> [f64; 4] {
    use num_traits::ToPrimitive;
    std::array::from_fn(|i| a.alpha[i].to_f64().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_examples() {
        let y = lift(&SpaceTimePoint::new([0.0; 4], 1.0).unwrap());
        assert_eq!(y.y, [-0.5, -0.5, 0.0, 0.0, 0.0, 0.0]);
        let y = lift(&SpaceTimePoint::new([1.0, 0.0, 0.0, 0.0], 2.0).unwrap());
        assert_eq!(y.y, [-2.0, 0.0, 2.0, 0.0, 0.0, 0.0]);
        assert_eq!(y.square(), 0.0);
    }

    #[test]
    fn hyperboloid_example() {
        let h = Hyperboloid::new([0.0; 4], -1.0, 1.0).unwrap();
        let y = hyperboloid_lift(&h).unwrap();
        assert_eq!(y.y, [0.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(y.square(), 1.0);
        assert_eq!(Hyperboloid::new([0.0; 4], 0.0, 0.0), Err(GeomError::DegenerateRadius));
    }
}
