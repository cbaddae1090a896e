use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// Relative size below which float coefficients are treated as zero during
/// Euclidean division chains.
pub const GCD_TOL: f64 = 1e-10;

/// Polynomial in `s` with coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

fn abs<F: RealScalar>(x: &F) -> F {
    if *x < F::zero() {
        -x.clone()
    } else {
        x.clone()
    }
}

/// -1, 0 or 1.
pub(crate) fn sign<F: RealScalar>(x: &F) -> i32 {
    if x.is_zero() {
        0
    } else if *x > F::zero() {
        1
    } else {
        -1
    }
}

impl<F: RealScalar> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: F) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(F::one())
    }

    /// The polynomial `s`.
    pub fn s() -> Self {
        Poly::new(vec![F::zero(), F::one()])
    }

    /// `a + b s`.
    pub fn linear(a: F, b: F) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn scale(&self, c: &F) -> Self {
        Poly::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().recip())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * F::from_i64(k as i64)).collect())
    }

    pub fn eval(&self, x: &F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.as_f64())
    }

    pub fn to_f64(&self) -> Poly<f64> {
        Poly::new(self.coeffs.iter().map(|c| c.as_f64()).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Poly::one(), |acc, _| acc * self.clone())
    }

    /// `self(inner(s))`.
    pub fn compose(&self, inner: &Poly<F>) -> Self {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| acc * inner.clone() + Poly::constant(c.clone()))
    }

    /// Largest coefficient magnitude.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Drops float coefficients that are negligible next to `reference`.
    fn trimmed(mut self, reference: f64) -> Self {
        if !F::EXACT {
            let thr = GCD_TOL * reference;
            for c in &mut self.coeffs {
                if c.magnitude() <= thr {
                    *c = F::zero();
                }
            }
        }
        Poly::new(self.coeffs)
    }

    pub fn div_rem(&self, d: &Poly<F>) -> Result<(Poly<F>, Poly<F>)> {
        let dd = d.degree().ok_or(Error::DivideByZero)?;
        let lc = d.lc();
        let mut r = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&n| n >= dd) else {
            return Ok((Poly::zero(), self.clone()));
        };
        let mut q = vec![F::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let f = r[k + dd].clone() / lc.clone();
            for (i, c) in d.coeffs.iter().enumerate() {
                r[k + i] = r[k + i].clone() - f.clone() * c.clone();
            }
            r[k + dd] = F::zero();
            q[k] = f;
        }
        Ok((Poly::new(q), Poly::new(r)))
    }

    /// Monic greatest common divisor. Float inputs drop remainder
    /// coefficients below a relative threshold.
    pub fn gcd(&self, other: &Poly<F>) -> Poly<F> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            let r = r.trimmed(a.norm().max(b.norm()));
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `self = lc * Π f_i^i` with each
    /// `f_i` monic and square-free. Returns the nonconstant `(f_i, i)`.
    pub fn squarefree(&self) -> Vec<(Poly<F>, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.div_rem(&a).expect("nonzero").0;
        let mut c = fp.div_rem(&a).expect("nonzero").0;
        let mut d = c - b.derivative();
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            b = b.div_rem(&g).expect("nonzero").0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&g).expect("nonzero").0;
            d = c - b.derivative();
            i += 1;
        }
        out
    }

    /// Number of distinct real roots in the open interval `(0, ∞)`, by a
    /// Sturm sequence.
    pub fn positive_root_count(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let mut p = self.clone();
        while p.coeff(0).is_zero() && !p.is_zero() {
            p = Poly::new(p.coeffs[1..].to_vec());
        }
        let reference = p.norm();
        let mut chain = vec![p.clone(), p.derivative()];
        while let Some(last) = chain.last().filter(|l| !l.is_zero()) {
            let prev = &chain[chain.len() - 2];
            let (_, r) = prev.div_rem(last).expect("nonzero");
            let r = (-r).trimmed(reference);
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        let changes = |signs: Vec<i32>| {
            let s: Vec<i32> = signs.into_iter().filter(|&x| x != 0).collect();
            s.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_zero = changes(chain.iter().map(|q| sign(&q.coeff(0))).collect());
        let at_inf = changes(chain.iter().map(|q| sign(&q.lc())).collect());
        at_zero.saturating_sub(at_inf)
    }

    /// Real and imaginary parts of `p(jω)` as polynomials in `ω`.
    pub fn at_j_omega(&self) -> (Poly<F>, Poly<F>) {
        let mut re = Vec::new();
        let mut im = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            // j^k cycles through 1, j, -1, -j.
            let (r, i) = match k % 4 {
                0 => (c.clone(), F::zero()),
                1 => (F::zero(), c.clone()),
                2 => (-c.clone(), F::zero()),
                _ => (F::zero(), -c.clone()),
            };
            re.push(r);
            im.push(i);
        }
        (Poly::new(re), Poly::new(im))
    }

    /// Keeps the even-degree coefficients as a polynomial in `u = s^2`.
    pub fn even_part_in_square(&self) -> Poly<F> {
        Poly::new(self.coeffs.iter().step_by(2).cloned().collect())
    }

    pub fn abs_coeffs_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| abs(c) == *c)
    }
}

impl<F: RealScalar> Add for Poly<F> {
    type Output = Poly<F>;
    fn add(self, o: Poly<F>) -> Poly<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl<F: RealScalar> Sub for Poly<F> {
    type Output = Poly<F>;
    fn sub(self, o: Poly<F>) -> Poly<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl<F: RealScalar> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<F: RealScalar> Mul for Poly<F> {
    type Output = Poly<F>;
    fn mul(self, o: Poly<F>) -> Poly<F> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<F: RealScalar + fmt::Display> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = *c < F::zero();
            let mag = abs(c);
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = mag == F::one();
            match (k, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "s")?,
                (1, false) => write!(f, "{mag} s")?,
                (_, true) => write!(f, "s^{k}")?,
                (_, false) => write!(f, "{mag} s^{k}")?,
            }
        }
        Ok(())
    }
}
