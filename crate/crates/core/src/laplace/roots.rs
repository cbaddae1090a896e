use num_complex::Complex64;

use super::poly::Poly;
use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// Roots closer than this (relative) are merged into one of higher
/// multiplicity when the polynomial is inexact.
pub const CLUSTER_TOL: f64 = 1e-7;

const MAX_ITER: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn eval_with_derivative(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = c(0.0);
    let mut d = c(0.0);
    for &a in p.iter().rev() {
        d = d * z + v;
        v = v * z + a;
    }
    (v, d)
}

/// All complex roots of a polynomial with float coefficients (ascending),
/// with repetition, by Aberth iteration followed by Newton polishing.
pub fn roots_f64(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let mut p: Vec<f64> = coeffs.to_vec();
    while p.last() == Some(&0.0) {
        p.pop();
    }
    if p.is_empty() {
        return Err(Error::RootFindingFailed("the zero polynomial has every root".into()));
    }
    let mut out = Vec::new();
    while p.len() > 1 && p[0] == 0.0 {
        p.remove(0);
        out.push(c(0.0));
    }
    let n = p.len() - 1;
    match n {
        0 => return Ok(out),
        1 => {
            out.push(c(-p[0] / p[1]));
            return Ok(out);
        }
        2 => {
            let (a, b, cc) = (p[2], p[1], p[0]);
            let disc = Complex64::new(b * b - 4.0 * a * cc, 0.0).sqrt();
            // Pick the sign that avoids cancellation.
            let q = if b >= 0.0 { -(c(b) + disc) / 2.0 } else { -(c(b) - disc) / 2.0 };
            if q.norm() == 0.0 {
                out.extend([c(0.0), c(0.0)]);
            } else {
                out.extend([q / a, c(cc) / q]);
            }
            return Ok(out);
        }
        _ => {}
    }
    let lead = p[n];
    let monic: Vec<f64> = p.iter().map(|x| x / lead).collect();
    let radius = 1.0 + monic[..n].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let r0 = radius.min((monic[0].abs()).powf(1.0 / n as f64).max(1e-3));
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(r0, std::f64::consts::TAU * k as f64 / n as f64 + 0.4)).collect();
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let mut largest = 0.0f64;
        for i in 0..n {
            let (v, d) = eval_with_derivative(&monic, z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (c(1.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                largest = largest.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if largest < 1e-15 {
            converged = true;
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..3 {
            let (v, d) = eval_with_derivative(&monic, *zi);
            if d.norm() == 0.0 || v.norm() == 0.0 {
                break;
            }
            let next = *zi - v / d;
            if !next.is_finite() {
                break;
            }
            *zi = next;
        }
    }
    if !converged {
        // Slow convergence near multiple roots still leaves usable values;
        // reject only when the residual is large.
        let scale = monic.iter().map(|x| x.abs()).fold(1.0, f64::max);
        let bad = z
            .iter()
            .any(|zi| eval_with_derivative(&monic, *zi).0.norm() > 1e-6 * scale * zi.norm().max(1.0).powi(n as i32));
        if bad {
            return Err(Error::RootFindingFailed(format!("no convergence for degree {n}")));
        }
    }
    out.extend(z);
    Ok(pair_conjugates(out))
}

/// Snaps nearly real roots onto the axis and makes complex roots appear in
/// exact conjugate pairs.
fn pair_conjugates(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    for r in &mut roots {
        if r.im.abs() <= 1e-10 * r.norm().max(1.0) {
            r.im = 0.0;
        }
    }
    let mut used = vec![false; roots.len()];
    let mut out = Vec::with_capacity(roots.len());
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if roots[i].im == 0.0 {
            out.push(roots[i]);
            continue;
        }
        let target = roots[i].conj();
        let partner = (0..roots.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (roots[a] - target).norm().total_cmp(&(roots[b] - target).norm()));
        match partner {
            Some(j) => {
                used[j] = true;
                let m = (roots[i] + roots[j].conj()) / 2.0;
                let m = if m.im > 0.0 { m } else { m.conj() };
                out.extend([m, m.conj()]);
            }
            None => out.push(roots[i]),
        }
    }
    out
}

fn cluster(roots: Vec<Complex64>, tol: f64) -> Vec<Root> {
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for r in roots {
        match out.iter_mut().find(|(v, m)| (*v / *m as f64 - r).norm() <= tol * r.norm().max(1.0)) {
            Some((v, m)) => {
                *v += r;
                *m += 1;
            }
            None => out.push((r, 1)),
        }
    }
    out.into_iter().map(|(v, m)| Root { value: v / m as f64, multiplicity: m }).collect()
}

/// Distinct roots with multiplicities. Exact coefficients go through a
/// square-free decomposition so multiplicities are exact; float
/// coefficients are clustered.
pub fn roots<F: RealScalar>(p: &Poly<F>) -> Result<Vec<Root>> {
    if p.is_zero() {
        return Err(Error::RootFindingFailed("the zero polynomial has every root".into()));
    }
    let mut out = if F::EXACT {
        let mut out = Vec::new();
        for (factor, m) in p.squarefree() {
            let coeffs: Vec<f64> = factor.coeffs().iter().map(|c| c.as_f64()).collect();
            for r in roots_f64(&coeffs)? {
                out.push(Root { value: r, multiplicity: m });
            }
        }
        out
    } else {
        let coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.as_f64()).collect();
        cluster(roots_f64(&coeffs)?, CLUSTER_TOL)
    };
    out.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;

    #[test]
    fn cubic_with_complex_pair() {
        // (s + 2)(s^2 + 2s + 5): roots -2, -1 ± 2j
        let r = roots_f64(&[10.0, 9.0, 4.0, 1.0]).unwrap();
        assert_eq!(r.len(), 3);
        for want in [Complex64::new(-2.0, 0.0), Complex64::new(-1.0, 2.0), Complex64::new(-1.0, -2.0)] {
            assert!(r.iter().any(|z| (z - want).norm() < 1e-12), "{r:?}");
        }
    }

    #[test]
    fn exact_multiplicities() {
        // s (s + 1)^2
        let p = Poly::new(vec![rational(0, 1), rational(1, 1), rational(2, 1), rational(1, 1)]);
        let r = roots::<BigRational>(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].value + 1.0).norm() < 1e-12);
        assert_eq!(r[1].multiplicity, 1);
    }

    #[test]
    fn float_clustering() {
        let r = roots(&Poly::new(vec![1.0, 2.0, 1.0])).unwrap();
        assert_eq!(r, vec![Root { value: Complex64::new(-1.0, 0.0), multiplicity: 2 }]);
    }

    #[test]
    fn wilkinson_like_degree_eight() {
        let mut p = Poly::new(vec![1.0]);
        for k in 1..=8 {
            p = p * Poly::new(vec![-(k as f64), 1.0]);
        }
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 8);
        for (k, root) in r.iter().enumerate() {
            assert!((root.value.re - (k + 1) as f64).abs() < 1e-8, "{r:?}");
        }
    }
}
