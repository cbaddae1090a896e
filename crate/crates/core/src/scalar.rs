//! Field elements used throughout the crate.
//!
//! Everything downstream is written against [`Scalar`], so the same code runs
//! over `f64`, `Complex64`, exact rationals and exact complex rationals.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex32, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact complex rational.
pub type ExactComplex = Complex<BigRational>;

/// Comparison tolerance for floating scalars. Exact scalars ignore it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-9, abs: 1e-12 }
    }
}

impl Tolerance {
    pub const ZERO: Tolerance = Tolerance { rel: 0.0, abs: 0.0 };

    pub fn new(rel: f64, abs: f64) -> Self {
        Tolerance { rel, abs }
    }

    /// Absolute threshold for a quantity whose natural size is `scale`.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic is exact; comparisons then ignore tolerances.
    const EXACT: bool;

    fn conj(&self) -> Self;

    /// Size estimate used for pivoting and tolerance scaling.
    fn magnitude(&self) -> f64;

    fn from_i64(v: i64) -> Self;

    /// Converts an exact complex value. `None` when the value has a nonzero
    /// imaginary part and `Self` is real.
    fn from_exact(re: &BigRational, im: &BigRational) -> Option<Self>;

    /// Numeric value as a complex double, if it has one.
    fn to_complex64(&self) -> Option<Complex64>;

    fn is_zero_within(&self, tol: &Tolerance, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol.threshold(scale)
        }
    }

    fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        if Self::EXACT {
            self == other
        } else {
            let scale = self.magnitude().max(other.magnitude());
            (self.clone() - other.clone()).magnitude() <= tol.threshold(scale)
        }
    }

    fn from_exact_complex(v: &ExactComplex) -> Option<Self> {
        Self::from_exact(&v.re, &v.im)
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }
}

/// Scalars with a total order, needed by the DC checks and metric scans.
pub trait RealScalar: Scalar + PartialOrd {
    fn as_f64(&self) -> f64;
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn exact_complex(re: BigRational, im: BigRational) -> ExactComplex {
    Complex::new(re, im)
}

macro_rules! real_float {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            fn conj(&self) -> Self {
                *self
            }
            fn magnitude(&self) -> f64 {
                self.abs() as f64
            }
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn from_exact(re: &BigRational, im: &BigRational) -> Option<Self> {
                if !im.is_zero() {
                    return None;
                }
                Some(rational_to_f64(re) as $t)
            }
            fn to_complex64(&self) -> Option<Complex64> {
                Some(Complex64::new(*self as f64, 0.0))
            }
        }

        impl RealScalar for $t {
            fn as_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

real_float!(f32);
real_float!(f64);

macro_rules! complex_float {
    ($t:ty, $f:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;
            fn conj(&self) -> Self {
                Complex::conj(self)
            }
            fn magnitude(&self) -> f64 {
                self.norm() as f64
            }
            fn from_i64(v: i64) -> Self {
                Complex::new(v as $f, 0.0)
            }
            fn from_exact(re: &BigRational, im: &BigRational) -> Option<Self> {
                Some(Complex::new(rational_to_f64(re) as $f, rational_to_f64(im) as $f))
            }
            fn to_complex64(&self) -> Option<Complex64> {
                Some(Complex64::new(self.re as f64, self.im as f64))
            }
        }
    };
}

complex_float!(Complex32, f32);
complex_float!(Complex64, f64);

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn conj(&self) -> Self {
        self.clone()
    }
    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.abs())
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_exact(re: &BigRational, im: &BigRational) -> Option<Self> {
        if im.is_zero() {
            Some(re.clone())
        } else {
            None
        }
    }
    fn to_complex64(&self) -> Option<Complex64> {
        Some(Complex64::new(rational_to_f64(self), 0.0))
    }
}

impl RealScalar for BigRational {
    fn as_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl Scalar for ExactComplex {
    const EXACT: bool = true;
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.re).hypot(rational_to_f64(&self.im))
    }
    fn from_i64(v: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }
    fn from_exact(re: &BigRational, im: &BigRational) -> Option<Self> {
        Some(Complex::new(re.clone(), im.clone()))
    }
    fn to_complex64(&self) -> Option<Complex64> {
        Some(Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im)))
    }
}
