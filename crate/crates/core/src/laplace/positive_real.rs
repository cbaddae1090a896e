use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::poly::Poly;
use super::rational::RationalFunction;
use super::roots::{roots, Root, CLUSTER_TOL};
use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// Relative distance from the imaginary axis below which a root counts as
/// lying on it.
pub const AXIS_TOL: f64 = CLUSTER_TOL;

pub fn on_axis(z: Complex64) -> bool {
    z.re.abs() <= AXIS_TOL * z.norm().max(1.0)
}

fn in_right_half(z: Complex64) -> bool {
    z.re > AXIS_TOL * z.norm().max(1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleZeroReport {
    pub poles: Vec<Root>,
    pub zeros: Vec<Root>,
    /// `(pole, residue)` at every simple finite pole.
    pub residues: Vec<(Complex64, Complex64)>,
    /// `deg num - deg den`: positive for a pole at infinity, negative for a
    /// zero there.
    pub degree_gap: i64,
}

/// `num(p) / den'(p)` at each simple root `p` of `den`.
fn simple_residues<F: RealScalar>(num: &Poly<F>, den: &Poly<F>, den_roots: &[Root]) -> Vec<(Complex64, Complex64)> {
    let d = den.derivative();
    den_roots
        .iter()
        .filter(|r| r.multiplicity == 1)
        .map(|r| (r.value, num.eval_c(r.value) / d.eval_c(r.value)))
        .collect()
}

pub fn poles_zeros<F: RealScalar>(f: &RationalFunction<F>) -> Result<PoleZeroReport> {
    if f.num().is_zero() {
        return Err(Error::PreconditionViolated("the zero function has no pole-zero description".into()));
    }
    let poles = if f.den().degree() == Some(0) { Vec::new() } else { roots(f.den())? };
    let zeros = if f.num().degree() == Some(0) { Vec::new() } else { roots(f.num())? };
    let residues = simple_residues(f.num(), f.den(), &poles);
    Ok(PoleZeroReport { degree_gap: f.degree_gap().expect("nonzero"), poles, zeros, residues })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrVerdict {
    pub positive_real: bool,
    pub reason: Option<String>,
    /// A point with `Re s >= 0` where the property visibly fails, when one
    /// was found.
    pub witness: Option<Complex64>,
}

impl PrVerdict {
    fn pass() -> Self {
        PrVerdict { positive_real: true, reason: None, witness: None }
    }
}

fn log_grid(count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |k| 10f64.powf(-3.0 + 6.0 * k as f64 / (count - 1) as f64))
}

/// Searches the closed right half-plane for `Re f(s) < 0`.
fn find_negative_real_part(f: &RationalFunction<f64>) -> Option<Complex64> {
    for r in log_grid(49) {
        for t in 0..=24 {
            let theta = -FRAC_PI_2 + std::f64::consts::PI * t as f64 / 24.0;
            let s = Complex64::from_polar(r, theta);
            if let Some(v) = f.eval(s) {
                if v.re < -1e-9 * v.norm().max(1.0) {
                    return Some(s);
                }
            }
        }
    }
    None
}

/// `Re[num(jω) conj(den(jω))]` as a polynomial in `u = ω^2`.
pub fn real_part_numerator<F: RealScalar>(f: &RationalFunction<F>) -> Poly<F> {
    let (br, bi) = f.num().at_j_omega();
    let (ar, ai) = f.den().at_j_omega();
    (br * ar + bi * ai).even_part_in_square()
}

/// True when `e(u) >= 0` for all `u >= 0`: every odd-multiplicity factor is
/// free of positive roots and the leading coefficient is positive.
fn nonnegative_on_half_line<F: RealScalar>(e: &Poly<F>) -> bool {
    if e.is_zero() {
        return true;
    }
    if e.lc() < F::zero() {
        return false;
    }
    e.squarefree().iter().filter(|(_, m)| m % 2 == 1).all(|(g, _)| g.positive_root_count() == 0)
}

/// The positive-real battery: right half-plane poles and zeros, degree gap,
/// imaginary-axis poles of `f` and `1/f`, the sign of `Re f(jω)`, and a
/// sampled angle contraction `|arg f(s)| <= |arg s|`.
pub fn is_positive_real<F: RealScalar>(f: &RationalFunction<F>) -> Result<PrVerdict> {
    let ff = f.to_f64();
    let fail = |reason: String, witness: Option<Complex64>| {
        Ok(PrVerdict {
            positive_real: false,
            reason: Some(reason),
            witness: witness.or_else(|| find_negative_real_part(&ff)),
        })
    };
    if f.num().is_zero() {
        return fail("the zero function".into(), None);
    }
    if f.num().lc() < F::zero() {
        return fail("negative at large real s".into(), Some(Complex64::new(1e6, 0.0)));
    }
    let pz = poles_zeros(f)?;
    if let Some(r) = pz.poles.iter().find(|r| in_right_half(r.value)) {
        return fail(format!("pole at {} in the right half-plane", r.value), Some(r.value));
    }
    if let Some(r) = pz.zeros.iter().find(|r| in_right_half(r.value)) {
        return fail(format!("zero at {} in the right half-plane", r.value), Some(r.value));
    }
    if pz.degree_gap.abs() > 1 {
        return fail(format!("degrees differ by {}", pz.degree_gap), None);
    }
    let recip_residues = simple_residues(f.den(), f.num(), &pz.zeros);
    for (roots, residues, what) in [(&pz.poles, &pz.residues, "pole"), (&pz.zeros, &recip_residues, "zero")] {
        for r in roots.iter().filter(|r| on_axis(r.value)) {
            if r.multiplicity > 1 {
                return fail(format!("{what} of multiplicity {} on the imaginary axis", r.multiplicity), None);
            }
            let res = residues.iter().find(|(p, _)| *p == r.value).map(|(_, v)| *v).expect("simple root");
            if res.re <= 0.0 || res.im.abs() > CLUSTER_TOL * res.norm() {
                return fail(format!("{what} at {} has residue {res}", r.value), None);
            }
        }
    }
    if !nonnegative_on_half_line(&real_part_numerator(f)) {
        return fail("real part negative somewhere on the imaginary axis".into(), None);
    }
    for r in log_grid(25) {
        for t in 0..=12 {
            let theta = -FRAC_PI_2 + std::f64::consts::PI * t as f64 / 12.0;
            let s = Complex64::from_polar(r, theta);
            let Some(v) = ff.eval(s) else { continue };
            if v.norm() == 0.0 || ff.den().eval_c(s).norm() < 1e-9 {
                continue;
            }
            if v.arg().abs() > theta.abs() + 1e-7 {
                return fail(format!("angle of f({s}) exceeds that of s"), Some(s));
            }
        }
    }
    Ok(PrVerdict::pass())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReactanceReport {
    pub reactance: bool,
    pub reason: Option<String>,
    /// Finite `ω` with a pole of `f(jω)`, ascending.
    pub poles: Vec<f64>,
    /// Finite `ω` with a zero of `f(jω)`, ascending.
    pub zeros: Vec<f64>,
    pub interleaved: bool,
    /// `dX/dω > 0` at every sample between and beyond the critical points.
    pub increasing: bool,
}

/// Checks that a positive-real `f` is lossless on the imaginary axis, that
/// `X(ω) = Im f(jω)` rises between poles, and that poles and zeros alternate.
pub fn is_reactance_function<F: RealScalar>(f: &RationalFunction<F>) -> Result<ReactanceReport> {
    if !is_positive_real(f)?.positive_real {
        return Err(Error::NotPositiveReal);
    }
    let e = real_part_numerator(f);
    let lossless = if F::EXACT { e.is_zero() } else { e.norm() <= 1e-10 * f.num().norm() * f.den().norm() };
    let pz = poles_zeros(f)?;
    let omegas = |rs: &[Root]| {
        let mut w: Vec<f64> = rs.iter().filter(|r| on_axis(r.value)).map(|r| r.value.im).collect();
        w.sort_by(f64::total_cmp);
        w
    };
    let (poles, zeros) = (omegas(&pz.poles), omegas(&pz.zeros));
    let mut marks: Vec<(f64, bool)> =
        poles.iter().map(|&w| (w, true)).chain(zeros.iter().map(|&w| (w, false))).collect();
    marks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let interleaved = marks.windows(2).all(|w| w[0].1 != w[1].1);

    let df = f.to_f64().derivative();
    let mut samples: Vec<f64> = marks.windows(2).map(|w| (w[0].0 + w[1].0) / 2.0).collect();
    let span = marks.iter().map(|m| m.0.abs()).fold(1.0, f64::max);
    samples.extend([-2.0 * span, 2.0 * span]);
    if marks.is_empty() {
        samples.push(0.5);
    }
    let increasing = samples.iter().all(|&w| df.eval(Complex64::new(0.0, w)).is_some_and(|d| d.re > 0.0));

    let reason = if !lossless {
        Some("real part on the imaginary axis is not identically zero".to_string())
    } else if !interleaved {
        Some("poles and zeros do not alternate".to_string())
    } else if !increasing {
        Some("reactance is not increasing".to_string())
    } else {
        None
    };
    Ok(ReactanceReport { reactance: reason.is_none(), reason, poles, zeros, interleaved, increasing })
}
