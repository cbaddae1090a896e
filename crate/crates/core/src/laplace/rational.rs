use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Poly;
use crate::error::{Error, Result};
use crate::scalar::{ExactComplex, RealScalar, Scalar};

/// `num(s) / den(s)` with a monic denominator and no common factor.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction<F> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: RealScalar> RationalFunction<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivideByZero);
        }
        if num.is_zero() {
            return Ok(RationalFunction { num, den: Poly::one() });
        }
        let g = num.gcd(&den);
        let (num, den) =
            if g.degree().unwrap_or(0) > 0 { (num.div_rem(&g)?.0, den.div_rem(&g)?.0) } else { (num, den) };
        let lc = den.lc();
        Ok(RationalFunction { num: num.scale(&lc.recip()), den: den.monic() })
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RationalFunction { num: p, den: Poly::one() }
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    /// The identity function `s`.
    pub fn s() -> Self {
        Self::from_poly(Poly::s())
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_zero_fn(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        if o.num.is_zero() {
            return Err(Error::DivideByZero);
        }
        Self::new(self.num.clone() * o.den.clone(), self.den.clone() * o.num.clone())
    }

    /// `self(inner(s))`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let m = self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0));
        let (p, q) = (&inner.num, &inner.den);
        let homogenize = |f: &Poly<F>| {
            f.coeffs().iter().enumerate().fold(Poly::zero(), |acc, (k, c)| acc + (p.pow(k) * q.pow(m - k)).scale(c))
        };
        Self::new(homogenize(&self.num), homogenize(&self.den))
    }

    /// `None` at a pole.
    pub fn eval(&self, s: Complex64) -> Option<Complex64> {
        let d = self.den.eval_c(s);
        if d.norm() == 0.0 {
            return None;
        }
        Some(self.num.eval_c(s) / d)
    }

    /// `deg num - deg den`; `None` for the zero function.
    pub fn degree_gap(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap_or(0) as i64)
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative() * self.den.clone() - self.num.clone() * self.den.derivative();
        Self::new(n, self.den.clone() * self.den.clone()).expect("nonzero denominator")
    }

    pub fn to_f64(&self) -> RationalFunction<f64> {
        RationalFunction { num: self.num.to_f64(), den: self.den.to_f64() }
    }
}

impl<F: RealScalar> Add for RationalFunction<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num + o.num, self.den).expect("nonzero denominator");
        }
        Self::new(self.num * o.den.clone() + o.num * self.den.clone(), self.den * o.den).expect("nonzero denominator")
    }
}

impl<F: RealScalar> Sub for RationalFunction<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<F: RealScalar> Neg for RationalFunction<F> {
    type Output = Self;
    fn neg(self) -> Self {
        RationalFunction { num: -self.num, den: self.den }
    }
}

impl<F: RealScalar> Mul for RationalFunction<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.num * o.num, self.den * o.den).expect("nonzero denominator")
    }
}

impl<F: RealScalar> Div for RationalFunction<F> {
    type Output = Self;
    /// Panics on division by the zero function, like integer division.
    fn div(self, o: Self) -> Self {
        self.checked_div(&o).expect("division by the zero rational function")
    }
}

impl<F: RealScalar> Zero for RationalFunction<F> {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: RealScalar> One for RationalFunction<F> {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

/// Rational functions with real coefficients form a field, so the whole
/// cofactor machinery runs over them. Conjugation is the identity, which is
/// the conjugate on the real axis of `s`.
impl<F: RealScalar> Scalar for RationalFunction<F> {
    const EXACT: bool = F::EXACT;
    fn conj(&self) -> Self {
        self.clone()
    }
    fn magnitude(&self) -> f64 {
        if self.num.is_zero() {
            0.0
        } else {
            self.num.norm() / self.den.norm()
        }
    }
    fn from_i64(v: i64) -> Self {
        Self::constant(F::from_i64(v))
    }
    fn from_exact(re: &BigRational, im: &BigRational) -> Option<Self> {
        F::from_exact(re, im).map(Self::constant)
    }
    fn to_complex64(&self) -> Option<Complex64> {
        None
    }
}

impl RationalFunction<BigRational> {
    /// `(g + s c) / (r + s l)`.
    pub fn gcrl(g: &BigRational, c: &BigRational, r: &BigRational, l: &BigRational) -> Result<Self> {
        Self::new(Poly::linear(g.clone(), c.clone()), Poly::linear(r.clone(), l.clone()))
    }

    /// Value at an exact complex point, `None` at a pole.
    pub fn eval_exact(&self, s: &ExactComplex) -> Option<ExactComplex> {
        let ev = |p: &Poly<BigRational>| {
            p.coeffs().iter().rev().fold(ExactComplex::zero(), |acc, c| {
                acc * s.clone() + ExactComplex::new(c.clone(), BigRational::zero())
            })
        };
        let d = ev(&self.den);
        if d.is_zero() {
            return None;
        }
        Some(ev(&self.num) / d)
    }
}

impl<F: RealScalar + fmt::Display> fmt::Display for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
