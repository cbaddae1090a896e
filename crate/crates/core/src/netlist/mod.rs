//! The textual network description and its in-memory model.
//!
//! ```text
//! # comment
//! node NAME
//! branch NAME A B y=CPLX                      current y*(v_A - v_B) flows A -> B
//! branch NAME A B g=.. c=.. r=.. l=..         y = (g + s c) / (r + s l)
//! isrc NAME Q P i=CPLX                        injects at P, extracts at Q
//! vsrc NAME P Q v=CPLX                        v_P - v_Q = V
//! vccs NAME J K ctrl=P,Q gain=CPLX            draws gain*(v_P - v_Q) from J into K
//! cccs NAME J K ctrl=BRANCH gain=CPLX
//! vcvs NAME P Q ctrl=A,B gain=CPLX series=CPLX
//! ccvs NAME P Q ctrl=BRANCH gain=CPLX series=CPLX
//! omega REAL
//! sigma REAL
//! ```
//!
//! All numbers are kept as exact rationals; decimal literals convert exactly.

mod number;
mod parse;

use std::fmt::Write as _;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::ExactComplex;

pub use number::{format_complex, format_real, parse_complex, parse_real};
pub use parse::parse;

/// Source line of an element. Compares equal to every other line so that
/// models can be compared regardless of layout.
#[derive(Clone, Copy, Debug, Default)]
pub struct Line(pub usize);

impl PartialEq for Line {
    fn eq(&self, _: &Line) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ElementValue {
    Direct(ExactComplex),
    /// `y = (g + s c) / (r + s l)`.
    Gcrl {
        g: BigRational,
        c: BigRational,
        r: BigRational,
        l: BigRational,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchElem {
    pub name: String,
    /// 1-based node indices.
    pub head: usize,
    pub tail: usize,
    pub value: ElementValue,
    pub line: Line,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SourceKind {
    /// Current `i` leaves node `from` and enters node `to`.
    Current {
        from: usize,
        to: usize,
        i: ExactComplex,
    },
    /// `v_pos - v_neg = v`.
    Voltage {
        pos: usize,
        neg: usize,
        v: ExactComplex,
    },
    Vccs {
        pos: usize,
        neg: usize,
        ctrl: (usize, usize),
        gain: ExactComplex,
    },
    /// `branch` is a 0-based index into `Netlist::branches`.
    Cccs {
        pos: usize,
        neg: usize,
        branch: usize,
        gain: ExactComplex,
    },
    Vcvs {
        pos: usize,
        neg: usize,
        ctrl: (usize, usize),
        gain: ExactComplex,
        series: ExactComplex,
    },
    Ccvs {
        pos: usize,
        neg: usize,
        branch: usize,
        gain: ExactComplex,
        series: ExactComplex,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceElem {
    pub name: String,
    pub kind: SourceKind,
    pub line: Line,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Netlist {
    pub nodes: Vec<String>,
    pub branches: Vec<BranchElem>,
    pub sources: Vec<SourceElem>,
    pub omega: Option<BigRational>,
    pub sigma: Option<BigRational>,
}

/// Checks the constraints on `(g, c, r, l)`; returns the reason on failure.
pub fn gcrl_problem(g: &BigRational, c: &BigRational, r: &BigRational, l: &BigRational) -> Option<String> {
    if [g, c, r, l].iter().any(|v| v.is_negative()) {
        return Some("g, c, r, l must be nonnegative".into());
    }
    if (g + c).is_zero() {
        return Some("g + c must be nonzero".into());
    }
    if (r + l).is_zero() {
        return Some("r + l must be nonzero".into());
    }
    if !(l * c).is_zero() && (g * l - r * c).is_zero() {
        return Some("g l - r c must be nonzero when l c is nonzero".into());
    }
    None
}

impl Netlist {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// 1-based index of a node name.
    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name).map(|i| i + 1)
    }

    pub fn branch_index(&self, name: &str) -> Option<usize> {
        self.branches.iter().position(|b| b.name == name)
    }

    pub fn source_index(&self, name: &str) -> Option<usize> {
        self.sources.iter().position(|s| s.name == name)
    }

    pub fn has_gcrl(&self) -> bool {
        self.branches.iter().any(|b| matches!(b.value, ElementValue::Gcrl { .. }))
    }

    /// `sigma + j omega` when either is set.
    pub fn frequency(&self) -> Option<ExactComplex> {
        if self.omega.is_none() && self.sigma.is_none() {
            return None;
        }
        Some(Complex::new(
            self.sigma.clone().unwrap_or_else(BigRational::zero),
            self.omega.clone().unwrap_or_else(BigRational::zero),
        ))
    }

    /// The same netlist with every GCRL branch replaced by its admittance at `s`.
    pub fn eval_elements(&self, s: &ExactComplex) -> Result<Netlist> {
        let mut out = self.clone();
        for b in &mut out.branches {
            if let ElementValue::Gcrl { g, c, r, l } = &b.value {
                let s = s.clone();
                let num = Complex::new(g.clone(), BigRational::zero()) + s.clone() * c.clone();
                let den = Complex::new(r.clone(), BigRational::zero()) + s * l.clone();
                if den.is_zero() {
                    return Err(Error::PoleAtS(b.name.clone()));
                }
                b.value = ElementValue::Direct(num / den);
            }
        }
        Ok(out)
    }

    /// Text that parses back to an identical model.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let node = |k: usize| self.nodes[k - 1].as_str();
        for n in &self.nodes {
            let _ = writeln!(out, "node {n}");
        }
        for b in &self.branches {
            let _ = write!(out, "branch {} {} {} ", b.name, node(b.head), node(b.tail));
            match &b.value {
                ElementValue::Direct(y) => {
                    let _ = writeln!(out, "y={}", format_complex(y));
                }
                ElementValue::Gcrl { g, c, r, l } => {
                    let _ = writeln!(
                        out,
                        "g={} c={} r={} l={}",
                        format_real(g),
                        format_real(c),
                        format_real(r),
                        format_real(l)
                    );
                }
            }
        }
        for s in &self.sources {
            let line = match &s.kind {
                SourceKind::Current { from, to, i } => {
                    format!("isrc {} {} {} i={}", s.name, node(*from), node(*to), format_complex(i))
                }
                SourceKind::Voltage { pos, neg, v } => {
                    format!("vsrc {} {} {} v={}", s.name, node(*pos), node(*neg), format_complex(v))
                }
                SourceKind::Vccs { pos, neg, ctrl, gain } => format!(
                    "vccs {} {} {} ctrl={},{} gain={}",
                    s.name,
                    node(*pos),
                    node(*neg),
                    node(ctrl.0),
                    node(ctrl.1),
                    format_complex(gain)
                ),
                SourceKind::Cccs { pos, neg, branch, gain } => format!(
                    "cccs {} {} {} ctrl={} gain={}",
                    s.name,
                    node(*pos),
                    node(*neg),
                    self.branches[*branch].name,
                    format_complex(gain)
                ),
                SourceKind::Vcvs { pos, neg, ctrl, gain, series } => format!(
                    "vcvs {} {} {} ctrl={},{} gain={} series={}",
                    s.name,
                    node(*pos),
                    node(*neg),
                    node(ctrl.0),
                    node(ctrl.1),
                    format_complex(gain),
                    format_complex(series)
                ),
                SourceKind::Ccvs { pos, neg, branch, gain, series } => format!(
                    "ccvs {} {} {} ctrl={} gain={} series={}",
                    s.name,
                    node(*pos),
                    node(*neg),
                    self.branches[*branch].name,
                    format_complex(gain),
                    format_complex(series)
                ),
            };
            out.push_str(&line);
            out.push('\n');
        }
        if let Some(w) = &self.omega {
            let _ = writeln!(out, "omega {}", format_real(w));
        }
        if let Some(s) = &self.sigma {
            let _ = writeln!(out, "sigma {}", format_real(s));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact_complex, rational};

    #[test]
    fn capacitor_inductor_resistor_at_jw() {
        let nl = parse("branch C1 a b c=2 r=1\nbranch L1 a b g=1 l=4\nbranch R1 a b g=3 r=1\n").unwrap();
        let w = rational(5, 1);
        let s = exact_complex(rational(0, 1), w);
        let e = nl.eval_elements(&s).unwrap();
        let y = |k: usize| match &e.branches[k].value {
            ElementValue::Direct(y) => y.clone(),
            _ => unreachable!(),
        };
        assert_eq!(y(0), exact_complex(rational(0, 1), rational(10, 1)));
        assert_eq!(y(1), exact_complex(rational(0, 1), rational(-1, 20)));
        assert_eq!(y(2), exact_complex(rational(3, 1), rational(0, 1)));
    }

    #[test]
    fn pole_at_s_reported() {
        let nl = parse("branch X a b g=1 c=1 l=1\n").unwrap();
        let s = exact_complex(rational(0, 1), rational(0, 1));
        assert_eq!(nl.eval_elements(&s), Err(Error::PoleAtS("X".into())));
    }

    #[test]
    fn frequency_from_omega_and_sigma() {
        let nl = parse("branch b a c y=1\nomega 2\n").unwrap();
        assert_eq!(nl.frequency(), Some(exact_complex(rational(0, 1), rational(2, 1))));
        let nl = parse("branch b a c y=1\n").unwrap();
        assert_eq!(nl.frequency(), None);
    }
}
