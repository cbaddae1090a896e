//! Behavioural properties of solved networks, written as checkers: DC
//! orientability and metrics, impedance sensitivity, AC complex power flow,
//! phase-angle assignment and current-phase spread.

mod dc;
mod phase;
mod power;

use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::scalar::RealScalar;

pub use dc::{
    bridge_separates, check_dc_orientability, check_metric, impedance_from_branch_voltages, metric_table, rayleigh_fd,
    rayleigh_sensitivity, triangle_equalities, DcOrientation, MetricReport, DEFAULT_THETAS,
};
pub use phase::{assign_phase_angles, check_dendromorphic, DendroReport, PhaseAssignment};
pub use power::{
    branch_power, check_cone, propagate_voltage, BranchPowerFlow, ConeReport, Direction, FlowEnd, PowerFlowReport,
};

/// A complex value viewed through magnitude and phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phasor(pub Complex64);

impl Phasor {
    pub fn from_polar(r: f64, phi: f64) -> Self {
        Phasor(Complex64::from_polar(r, phi))
    }
    pub fn magnitude(&self) -> f64 {
        self.0.norm()
    }
    /// `None` for the zero phasor, whose phase is indeterminate.
    pub fn phase(&self) -> Option<f64> {
        if self.0 == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(self.0.arg())
        }
    }
    pub fn re(&self) -> f64 {
        self.0.re
    }
    pub fn im(&self) -> f64 {
        self.0.im
    }
}

/// Conductance, susceptance, resistance and reactance of one immittance.
#[derive(Clone, Debug, PartialEq)]
pub struct ImmittanceComponents<R> {
    pub g: R,
    pub b: R,
    pub r: R,
    pub x: R,
}

/// Components of an admittance `y = G + jB` together with `1/y = R + jX`.
pub fn gbrx<R: RealScalar>(y: &Complex<R>) -> Result<ImmittanceComponents<R>> {
    let (g, b) = (y.re.clone(), y.im.clone());
    let (r, x) = reciprocal_parts(&g, &b)?;
    Ok(ImmittanceComponents { g, b, r, x })
}

/// Components of an impedance `z = R + jX` together with `1/z = G + jB`.
pub fn gbrx_from_impedance<R: RealScalar>(z: &Complex<R>) -> Result<ImmittanceComponents<R>> {
    let (r, x) = (z.re.clone(), z.im.clone());
    let (g, b) = reciprocal_parts(&r, &x)?;
    Ok(ImmittanceComponents { g, b, r, x })
}

/// `(a - jb) / (a^2 + b^2)` split into parts.
fn reciprocal_parts<R: RealScalar>(a: &R, b: &R) -> Result<(R, R)> {
    let den = a.square() + b.square();
    if den.is_zero() {
        return Err(Error::ZeroImmittance);
    }
    Ok((a.clone() / den.clone(), -(b.clone() / den)))
}

/// Parameters of an element with `y = (g + s c) / (r + s l)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gcrl {
    pub g: f64,
    pub c: f64,
    pub r: f64,
    pub l: f64,
}

impl Gcrl {
    pub fn admittance(&self, omega: f64) -> Complex64 {
        Complex64::new(self.g, omega * self.c) / Complex64::new(self.r, omega * self.l)
    }

    /// All four components at `s = jω` in closed form.
    pub fn components(&self, omega: f64) -> Result<ImmittanceComponents<f64>> {
        let Gcrl { g, c, r, l } = *self;
        let w2 = omega * omega;
        let zden = r * r + w2 * l * l;
        let yden = g * g + w2 * c * c;
        if zden == 0.0 || yden == 0.0 {
            return Err(Error::ZeroImmittance);
        }
        let active = r * g + w2 * l * c;
        Ok(ImmittanceComponents {
            g: active / zden,
            b: omega * (r * c - g * l) / zden,
            r: active / yden,
            x: omega * (g * l - r * c) / yden,
        })
    }

    /// `d|y|/dω` in closed form; its sign is that of `r²c² - g²l²`.
    pub fn magnitude_derivative(&self, omega: f64) -> f64 {
        let Gcrl { g, c, r, l } = *self;
        let y = self.admittance(omega).norm();
        let zden = r * r + omega * omega * l * l;
        omega / y * (r * r * c * c - g * g * l * l) / (zden * zden)
    }
}

/// A set of phase angles `[lo, hi]` with either end optionally open.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl PhaseInterval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        PhaseInterval { lo, hi, lo_closed: true, hi_closed: true }
    }

    /// `[lo, hi)`.
    pub fn closed_open(lo: f64, hi: f64) -> Self {
        PhaseInterval { lo, hi, lo_closed: true, hi_closed: false }
    }

    /// `(lo, hi]`.
    pub fn open_closed(lo: f64, hi: f64) -> Self {
        PhaseInterval { lo, hi, lo_closed: false, hi_closed: true }
    }

    /// The single angle 0.
    pub fn trivial() -> Self {
        Self::closed(0.0, 0.0)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `{-θ : θ in self}`.
    pub fn negated(&self) -> Self {
        PhaseInterval { lo: -self.hi, hi: -self.lo, lo_closed: self.hi_closed, hi_closed: self.lo_closed }
    }

    /// Membership modulo 2π. Closed ends are widened by `tol`.
    pub fn contains(&self, angle: f64, tol: f64) -> bool {
        let tau = std::f64::consts::TAU;
        [angle, angle - tau, angle + tau].iter().any(|&a| {
            let above = if self.lo_closed { a >= self.lo - tol } else { a > self.lo };
            let below = if self.hi_closed { a <= self.hi + tol } else { a < self.hi };
            above && below
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn capacitor_reactance() {
        let (w, c) = (50.0, 1e-3);
        let k = gbrx(&Complex64::new(0.0, w * c)).unwrap();
        assert!((k.b - w * c).abs() < 1e-15);
        assert!((k.x + 1.0 / (w * c)).abs() < 1e-12);
        assert_eq!(k.r, 0.0);
    }

    #[test]
    fn conductance_only() {
        let k = gbrx(&Complex::new(rational(4, 1), rational(0, 1))).unwrap();
        assert_eq!(k.r, rational(1, 4));
        assert_eq!(k.x, rational(0, 1));
        assert_eq!(gbrx(&Complex::new(rational(0, 1), rational(0, 1))), Err(Error::ZeroImmittance));
    }

    #[test]
    fn exact_round_trip() {
        let y = Complex::new(rational(3, 7), rational(-2, 5));
        let k = gbrx(&y).unwrap();
        let back = gbrx_from_impedance(&Complex::new(k.r.clone(), k.x.clone())).unwrap();
        assert_eq!((back.g, back.b), (y.re, y.im));
    }

    #[test]
    fn gcrl_matches_direct_division() {
        let e = Gcrl { g: 0.3, c: 2.0, r: 1.5, l: 0.25 };
        let w = 3.0;
        let k = e.components(w).unwrap();
        let y = e.admittance(w);
        assert!((k.g - y.re).abs() < 1e-14 && (k.b - y.im).abs() < 1e-14);
        let z = y.inv();
        assert!((k.r - z.re).abs() < 1e-14 && (k.x - z.im).abs() < 1e-14);
    }

    #[test]
    fn interval_membership() {
        let i = PhaseInterval::closed_open(-PI, 0.0);
        assert!(i.contains(-FRAC_PI_2, 0.0));
        assert!(i.contains(PI, 0.0));
        assert!(!i.contains(0.0, 0.0));
        let neg = i.negated();
        assert!(neg.contains(FRAC_PI_2, 0.0) && neg.contains(PI, 0.0) && !neg.contains(0.0, 0.0));
        assert!(PhaseInterval::trivial().contains(1e-13, 1e-12));
        assert_eq!(Phasor(Complex64::new(0.0, 0.0)).phase(), None);
        let p = Phasor::from_polar(2.0, 0.5);
        assert!((p.re() - 2.0 * 0.5f64.cos()).abs() < 1e-15 && (p.im() - 2.0 * 0.5f64.sin()).abs() < 1e-15);
    }
}
