use num_complex::Complex64;

use super::PhaseInterval;
use crate::admittance::build;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::scalar::Tolerance;
use crate::solve::{impedance_table, GroundedSolution};

#[derive(Clone, Debug, PartialEq)]
pub struct BranchPowerFlow {
    pub name: String,
    /// Branch current from head to tail.
    pub current: Complex64,
    /// `v_head conj(i)`: power leaving the head node into the branch.
    pub s_plus: Complex64,
    /// `v_tail conj(i)`: power leaving the branch into the tail node.
    pub s_minus: Complex64,
    /// `1/y`, absent for a zero admittance.
    pub z: Option<Complex64>,
    /// `x p - r q` at the head.
    pub mu: f64,
    /// `x p - r q` at the tail.
    pub mu_tail: f64,
    /// Largest residual among the per-branch power and voltage identities.
    pub identity_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerFlowReport {
    pub branches: Vec<BranchPowerFlow>,
    /// Per node: power leaving through branches minus power delivered by
    /// sources.
    pub node_residuals: Vec<Complex64>,
    pub scale: f64,
}

impl PowerFlowReport {
    pub fn max_node_residual(&self) -> f64 {
        self.node_residuals.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }
    pub fn max_identity_residual(&self) -> f64 {
        self.branches.iter().map(|b| b.identity_residual).fold(0.0, f64::max)
    }
}

fn identity_residual(vp: Complex64, vm: Complex64, i: Complex64, sp: Complex64, sm: Complex64, z: Complex64) -> f64 {
    let (r, x) = (z.re, z.im);
    let i2 = i.norm_sqr();
    let dv2 = vp.norm_sqr() - vm.norm_sqr();
    let zz = r * r + x * x;
    [
        (sp.re - sm.re) - r * i2,
        (sp.im - sm.im) - x * i2,
        sp.norm_sqr() - vp.norm_sqr() * i2,
        sm.norm_sqr() - vm.norm_sqr() * i2,
        dv2 - (r * (sp.re + sm.re) + x * (sp.im + sm.im)),
        dv2 - (2.0 * (r * sp.re + x * sp.im) - zz * i2),
        dv2 - (2.0 * (r * sm.re + x * sm.im) + zz * i2),
    ]
    .iter()
    .fold(0.0, |m: f64, v| m.max(v.abs()))
}

/// Complex power at both ends of every branch plus the node balance.
pub fn branch_power(
    net: &Network<Complex64>,
    sol: &GroundedSolution<Complex64>,
    tol: &Tolerance,
) -> Result<PowerFlowReport> {
    let n = net.n();
    if sol.v.len() != n {
        return Err(Error::DimensionMismatch(format!("{} voltages for {} nodes", sol.v.len(), n)));
    }
    if !net.voltage_sources.is_empty() || !net.dependent_sources.is_empty() {
        return Err(Error::PreconditionViolated("only current sources are supported here".into()));
    }
    let y = build(net);
    let inj = net.injections();
    let yv = y.mul_vec(&sol.v)?;
    let iscale = inj.iter().chain(&yv).map(|c| c.norm()).fold(0.0, f64::max);
    for (k, (a, b)) in yv.iter().zip(&inj).enumerate() {
        if (a - b).norm() > tol.threshold(iscale) {
            return Err(Error::InconsistentSolution(format!("node {} residual {}", k + 1, (a - b).norm())));
        }
    }
    let v = |k: usize| sol.v[k - 1];
    let mut balance = vec![Complex64::new(0.0, 0.0); n];
    let mut branches = Vec::with_capacity(net.branches.len());
    for b in &net.branches {
        let (vp, vm) = (v(b.head), v(b.tail));
        let i = b.y * (vp - vm);
        let (sp, sm) = (vp * i.conj(), vm * i.conj());
        balance[b.head - 1] += sp;
        balance[b.tail - 1] -= sm;
        let z = if b.y.norm() == 0.0 { None } else { Some(b.y.inv()) };
        let (mu, mu_tail, res) = match z {
            Some(z) => {
                (z.im * sp.re - z.re * sp.im, z.im * sm.re - z.re * sm.im, identity_residual(vp, vm, i, sp, sm, z))
            }
            None => (0.0, 0.0, 0.0),
        };
        branches.push(BranchPowerFlow {
            name: b.name.clone(),
            current: i,
            s_plus: sp,
            s_minus: sm,
            z,
            mu,
            mu_tail,
            identity_residual: res,
        });
    }
    for s in &net.current_sources {
        // The source delivers v conj(I) into `to` and draws it from `from`.
        balance[s.to - 1] -= v(s.to) * s.value.conj();
        balance[s.from - 1] += v(s.from) * s.value.conj();
    }
    let scale = branches.iter().map(|b| b.s_plus.norm().max(b.s_minus.norm())).fold(0.0, f64::max);
    Ok(PowerFlowReport { branches, node_residuals: balance, scale })
}

/// Which end of the branch `j -> k` the known flow refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowEnd {
    AtJ,
    AtK,
}

/// Which end's voltage magnitude is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `|v_j|` known, `|v_k|` wanted.
    JToK,
    /// `|v_k|` known, `|v_j|` wanted.
    KToJ,
}

/// Far-end voltage magnitude from the near-end magnitude, the flow
/// `p + jq` leaving the near end, and `z = r + jx`.
fn from_sending(v: f64, p: f64, q: f64, r: f64, x: f64) -> Vec<f64> {
    if p == 0.0 && q == 0.0 {
        return vec![v];
    }
    let i2 = (p * p + q * q) / (v * v);
    let (pf, qf) = (p - r * i2, q - x * i2);
    vec![((pf * pf + qf * qf) / i2).sqrt()]
}

/// Roots of `u^2 - (v^2 - 2(r p + x q)) u + (r^2 + x^2)(p^2 + q^2) = 0`
/// in `u = |v_far|^2`, where `p + jq` arrives at the far end.
fn from_receiving(v: f64, p: f64, q: f64, r: f64, x: f64) -> Result<Vec<f64>> {
    let b = v * v - 2.0 * (r * p + x * q);
    let c = (r * r + x * x) * (p * p + q * q);
    let disc = b * b - 4.0 * c;
    let slack = 1e-12 * b * b;
    if disc < -slack {
        return Err(Error::NoRealRoot);
    }
    let root = disc.max(0.0).sqrt();
    let mut us: Vec<f64> = if root == 0.0 { vec![b / 2.0] } else { vec![(b + root) / 2.0, (b - root) / 2.0] };
    us.retain(|u| *u >= -slack.sqrt());
    if us.is_empty() {
        return Err(Error::NoRealRoot);
    }
    Ok(us.into_iter().map(|u| u.max(0.0).sqrt()).collect())
}

/// Candidate magnitudes at the unknown end of a branch `j -> k` with
/// impedance `z`, given the magnitude at the other end and one end's flow
/// `s = p + jq` in the `j -> k` sense. A sending-end flow gives one value,
/// a receiving-end flow up to two, largest first.
pub fn propagate_voltage(v_known: f64, s: Complex64, z: Complex64, end: FlowEnd, dir: Direction) -> Result<Vec<f64>> {
    if v_known <= 0.0 {
        return Err(Error::PreconditionViolated("the known voltage magnitude must be positive".into()));
    }
    let (r, x) = (z.re, z.im);
    match (dir, end) {
        (Direction::JToK, FlowEnd::AtJ) => Ok(from_sending(v_known, s.re, s.im, r, x)),
        (Direction::JToK, FlowEnd::AtK) => from_receiving(v_known, s.re, s.im, r, x),
        (Direction::KToJ, FlowEnd::AtK) => Ok(from_sending(v_known, -s.re, -s.im, r, x)),
        (Direction::KToJ, FlowEnd::AtJ) => from_receiving(v_known, -s.re, -s.im, r, x),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeReport {
    /// Pairs `j < k` whose `Z_jk` has a phase outside `-I`.
    pub offending: Vec<(usize, usize)>,
}

impl ConeReport {
    pub fn holds(&self) -> bool {
        self.offending.is_empty()
    }
}

/// With every branch admittance phase in `interval`, checks that every
/// nonzero transfer impedance has its phase in the negated interval.
pub fn check_cone(net: &Network<Complex64>, interval: &PhaseInterval, angle_tol: f64) -> Result<ConeReport> {
    if interval.width() > std::f64::consts::PI {
        return Err(Error::PreconditionViolated("the interval is wider than π".into()));
    }
    for b in &net.branches {
        if b.y.norm() != 0.0 && !interval.contains(b.y.arg(), angle_tol) {
            return Err(Error::PhaseOutsideInterval(b.name.clone()));
        }
    }
    let z = impedance_table(&build(net))?;
    let neg = interval.negated();
    let mut offending = Vec::new();
    let scale = z.max_magnitude();
    for j in 0..z.rows() {
        for k in j + 1..z.rows() {
            let v = z[(j, k)];
            if v.norm() > 1e-12 * scale && !neg.contains(v.arg(), angle_tol) {
                offending.push((j + 1, k + 1));
            }
        }
    }
    Ok(ConeReport { offending })
}
