//! Gaussian rationals and ℏ-graded coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact element of Q(i).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiply by the imaginary unit.
    pub fn mul_i(&self) -> Self {
        Self {
            re: -self.im.clone(),
            im: self.re.clone(),
        }
    }

    /// Divide by the imaginary unit.
    pub fn div_i(&self) -> Self {
        Self {
            re: self.im.clone(),
            im: -self.re.clone(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self {
            re: &self.re * q,
            im: &self.im * q,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Exact inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Self {
            re: &self.re / &norm,
            im: -(&self.im / &norm),
        })
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

impl Default for GaussRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            _ => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "({} {} {}i)", self.re, sign, self.im.abs())
            }
        }
    }
}

impl Add for &GaussRational {
    type Output = GaussRational;
    fn add(self, rhs: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussRational {
    type Output = GaussRational;
    fn sub(self, rhs: &GaussRational) -> GaussRational {
        GaussRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussRational {
    type Output = GaussRational;
    fn mul(self, rhs: &GaussRational) -> GaussRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussRational::real(&self.re * &rhs.re);
        }
        GaussRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, rhs: &GaussRational) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, rhs: &GaussRational) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl From<i64> for GaussRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for GaussRational {
    fn from(q: BigRational) -> Self {
        Self::real(q)
    }
}

/// A Gaussian rational multiplying a power of ℏ.
///
/// ℏ is a formal grading symbol and is never evaluated. The zero
/// coefficient is always stored with `hbar_pow == 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Coefficient {
    value: GaussRational,
    hbar_pow: u32,
}

impl Coefficient {
    pub fn new(value: GaussRational, hbar_pow: u32) -> Self {
        if value.is_zero() {
            Self::zero()
        } else {
            Self { value, hbar_pow }
        }
    }

    pub fn zero() -> Self {
        Self {
            value: GaussRational::zero(),
            hbar_pow: 0,
        }
    }

    pub fn one() -> Self {
        Self {
            value: GaussRational::one(),
            hbar_pow: 0,
        }
    }

    pub fn int(n: i64) -> Self {
        Self::new(GaussRational::from_int(n), 0)
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(GaussRational::ratio(num, den), 0)
    }

    /// `i ℏ`, the factor carried by every commutator.
    pub fn i_hbar() -> Self {
        Self::new(GaussRational::i(), 1)
    }

    pub fn value(&self) -> &GaussRational {
        &self.value
    }

    pub fn hbar_pow(&self) -> u32 {
        self.hbar_pow
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn with_hbar(mut self, k: u32) -> Self {
        if !self.is_zero() {
            self.hbar_pow = k;
        }
        self
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        Coefficient::new(&self.value * &rhs.value, self.hbar_pow + rhs.hbar_pow)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_and_signed() {
        let q = GaussRational::ratio(4, -6);
        assert_eq!(q.re, BigRational::new((-2).into(), 3.into()));
        assert!(q.re.denom().is_positive());
    }

    #[test]
    fn zero_coefficient_is_unique() {
        let z = Coefficient::new(GaussRational::zero(), 5);
        assert_eq!(z, Coefficient::zero());
        assert_eq!(z.hbar_pow(), 0);
    }

    #[test]
    fn i_algebra() {
        let i = GaussRational::i();
        assert_eq!(&i * &i, GaussRational::from_int(-1));
        assert_eq!(i.div_i(), GaussRational::one());
        let z = GaussRational::new(BigRational::from_integer(3.into()), BigRational::from_integer(4.into()));
        assert_eq!(&z * &z.inv().unwrap(), GaussRational::one());
    }
}
