use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::poly::Poly;
use super::positive_real::{is_positive_real, on_axis, poles_zeros};
use super::rational::RationalFunction;
use super::roots::roots;
use crate::admittance::build;
use crate::error::{Error, Result};
use crate::netlist::{ElementValue, Netlist};
use crate::network::Network;
use crate::solve::{driving_point_impedance, transfer_impedance};

pub type ExactRf = RationalFunction<BigRational>;

/// A branch admittance `p(s) / q(s)` with both parts of degree at most one.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchPolys {
    pub p: Poly<BigRational>,
    pub q: Poly<BigRational>,
    /// Both `g` and `r` are positive.
    pub lossy: bool,
}

/// Splits every branch into its `p` and `q` polynomials. Real direct
/// branches count as constant conductances.
pub fn branch_polys(nl: &Netlist) -> Result<Vec<BranchPolys>> {
    nl.branches
        .iter()
        .map(|b| match &b.value {
            ElementValue::Gcrl { g, c, r, l } => Ok(BranchPolys {
                p: Poly::linear(g.clone(), c.clone()),
                q: Poly::linear(r.clone(), l.clone()),
                lossy: g.is_positive() && r.is_positive(),
            }),
            ElementValue::Direct(y) if y.im.is_zero() && !y.re.is_negative() => {
                Ok(BranchPolys { p: Poly::constant(y.re.clone()), q: Poly::one(), lossy: y.re.is_positive() })
            }
            ElementValue::Direct(_) => Err(Error::PreconditionViolated(format!(
                "branch '{}' needs (g, c, r, l) form or a nonnegative real value",
                b.name
            ))),
        })
        .collect()
}

fn rf_network(nl: &Netlist, polys: &[BranchPolys]) -> Result<Network<ExactRf>> {
    let mut net = Network::new(nl.node_count());
    net.node_names = nl.nodes.clone();
    for (b, bp) in nl.branches.iter().zip(polys) {
        net.add_branch(b.name.clone(), b.head, b.tail, RationalFunction::new(bp.p.clone(), bp.q.clone())?);
    }
    Ok(net)
}

/// The network over the field of rational functions of `s`.
pub fn network_over_s(nl: &Netlist) -> Result<Network<ExactRf>> {
    rf_network(nl, &branch_polys(nl)?)
}

fn product(polys: &[BranchPolys], ids: &[usize], numerator: bool) -> Poly<BigRational> {
    ids.iter().fold(Poly::one(), |acc, &i| acc * if numerator { polys[i].p.clone() } else { polys[i].q.clone() })
}

fn complement(m: usize, used: &[usize]) -> Vec<usize> {
    (0..m).filter(|i| !used.contains(i)).collect()
}

/// Sum over spanning trees of the tree `p` product times the cotree `q`
/// product.
pub fn c_polynomial(nl: &Netlist) -> Result<Poly<BigRational>> {
    let polys = branch_polys(nl)?;
    let net = rf_network(nl, &polys)?;
    let m = polys.len();
    Ok(net
        .graph()
        .spanning_trees()?
        .iter()
        .fold(Poly::zero(), |acc, t| acc + product(&polys, t, true) * product(&polys, &complement(m, t), false)))
}

fn check_pair(n: usize, j: usize, k: usize) -> Result<()> {
    for x in [j, k] {
        if x == 0 || x > n {
            return Err(Error::IndexOutOfRange { index: x, size: n });
        }
    }
    Ok(())
}

/// `Z_jk(s)` from pairs of disjoint trees over the tree polynomial.
pub fn network_impedance_trees(nl: &Netlist, j: usize, k: usize) -> Result<ExactRf> {
    let polys = branch_polys(nl)?;
    let net = rf_network(nl, &polys)?;
    check_pair(net.n(), j, k)?;
    let g = net.graph();
    if !g.is_connected(&[]) {
        return Err(Error::Disconnected);
    }
    if j == k {
        return Ok(ExactRf::zero());
    }
    let m = polys.len();
    let num = g.tree_pairs(j, k)?.iter().fold(Poly::zero(), |acc, (a, b)| {
        let used: Vec<usize> = a.iter().chain(b).copied().collect();
        acc + product(&polys, a, true) * product(&polys, b, true) * product(&polys, &complement(m, &used), false)
    });
    RationalFunction::new(num, c_polynomial(nl)?)
}

/// `Z_jk(s)` from the cofactors of `Y(s)`.
pub fn network_impedance_cofactor(nl: &Netlist, j: usize, k: usize) -> Result<ExactRf> {
    let net = network_over_s(nl)?;
    check_pair(net.n(), j, k)?;
    if !net.graph().is_connected(&[]) {
        return Err(Error::Disconnected);
    }
    driving_point_impedance(&build(&net), j, k)
}

/// `Z_jk(s)` through tree pairs, confirmed against the cofactor route.
pub fn network_impedance_s(nl: &Netlist, j: usize, k: usize) -> Result<ExactRf> {
    let trees = network_impedance_trees(nl, j, k)?;
    let cof = network_impedance_cofactor(nl, j, k)?;
    if trees != cof {
        return Err(Error::InconsistentSolution(format!("tree route {trees} differs from cofactor route {cof}")));
    }
    Ok(trees)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SprVerdict {
    /// Verdict from the branch transfer-impedance criteria.
    pub criteria: bool,
    /// Verdict from `Z_jk(s)` itself: positive-real with no finite poles
    /// or zeros on the imaginary axis.
    pub direct: bool,
    pub reason: Option<String>,
}

fn has_axis_root(p: &Poly<BigRational>) -> Result<bool> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(false);
    }
    Ok(roots(p)?.iter().any(|r| on_axis(r.value)))
}

/// Strict positive-realness of `Z_jk(s)`, decided twice.
pub fn is_strictly_positive_real(nl: &Netlist, j: usize, k: usize) -> Result<SprVerdict> {
    let polys = branch_polys(nl)?;
    let z = network_impedance_s(nl, j, k)?;
    if j == k {
        return Err(Error::EqualIndices(j));
    }
    let net = rf_network(nl, &polys)?;
    let y = build(&net);
    let mut reason = None;
    let mut poles_ok = true;
    let mut witness = false;
    for (b, bp) in nl.branches.iter().zip(&polys) {
        let tz = transfer_impedance(&y, b.head, b.tail, j, k)?;
        if has_axis_root(tz.den())? {
            poles_ok = false;
            reason
                .get_or_insert_with(|| format!("transfer impedance of branch '{}' has an imaginary-axis pole", b.name));
        }
        if bp.lossy && !tz.is_zero_fn() && !has_axis_root(tz.num())? {
            witness = true;
        }
    }
    if poles_ok && !witness {
        reason = Some("no lossy branch carries a current free of imaginary-axis zeros".into());
    }
    let criteria = poles_ok && witness;

    let pr = is_positive_real(&z)?;
    let pz = poles_zeros(&z)?;
    let axis = pz.poles.iter().chain(&pz.zeros).any(|r| on_axis(r.value));
    let direct = pr.positive_real && !axis;
    if reason.is_none() && !direct {
        reason = Some("impedance has an imaginary-axis pole or zero".into());
    }
    Ok(SprVerdict { criteria, direct, reason: if criteria && direct { None } else { reason } })
}

/// `q_δ(s)` of the first branch directly between `j` and `k`, if any.
pub fn direct_branch_q(nl: &Netlist, j: usize, k: usize) -> Result<Option<Poly<BigRational>>> {
    let polys = branch_polys(nl)?;
    Ok(nl
        .branches
        .iter()
        .zip(polys)
        .find(|(b, _)| (b.head == j && b.tail == k) || (b.head == k && b.tail == j))
        .map(|(_, bp)| bp.q))
}

/// `true` when `d` divides `p` exactly.
pub fn divides(d: &Poly<BigRational>, p: &Poly<BigRational>) -> Result<bool> {
    Ok(p.div_rem(d)?.1.is_zero())
}

/// Convenience for tests and the CLI: `1 / (s c)`.
pub fn capacitor_impedance(c: &BigRational) -> Result<ExactRf> {
    RationalFunction::new(Poly::one(), Poly::linear(BigRational::zero(), c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse;
    use crate::scalar::rational;
    use num_complex::Complex64;

    #[test]
    fn single_capacitor() {
        let nl = parse("branch C a b c=2 r=1\n").unwrap();
        assert_eq!(network_impedance_s(&nl, 1, 2).unwrap(), capacitor_impedance(&rational(2, 1)).unwrap());
    }

    #[test]
    fn lc_ladder() {
        // series L from a to b, then C and L in parallel from b to ground g
        let nl = parse("branch L1 a b g=1 l=1\nbranch C1 b g c=1 r=1\nbranch L2 b g g=1 l=1\n").unwrap();
        let z = network_impedance_s(&nl, 1, 3).unwrap();
        let want = RationalFunction::new(
            Poly::new(vec![rational(0, 1), rational(2, 1), rational(0, 1), rational(1, 1)]),
            Poly::new(vec![rational(1, 1), rational(0, 1), rational(1, 1)]),
        )
        .unwrap();
        assert_eq!(z, want);
        let w = 3.0;
        let v = z.eval(Complex64::new(0.0, w)).unwrap();
        assert!(v.re.abs() < 1e-12);
        let spr = is_strictly_positive_real(&nl, 1, 3).unwrap();
        assert!(!spr.criteria && !spr.direct);
    }

    #[test]
    fn series_branch_q_divides() {
        let nl = parse("branch A a b g=1 c=1 r=2 l=1\nbranch B b c g=2 r=1\nbranch C a c g=1 c=3 r=1 l=2\n").unwrap();
        let z = network_impedance_s(&nl, 1, 2).unwrap();
        let q = direct_branch_q(&nl, 1, 2).unwrap().unwrap();
        assert!(divides(&q, z.num()).unwrap());
        let c = c_polynomial(&nl).unwrap();
        assert!(roots(&c).unwrap().iter().all(|r| r.value.re <= 1e-9));
    }

    #[test]
    fn lossy_rc_is_strictly_positive_real() {
        let nl = parse("branch A a b g=1 c=1 r=1\nbranch B b c g=2 c=1 r=1\nbranch C a c g=1 r=3\n").unwrap();
        let v = is_strictly_positive_real(&nl, 1, 3).unwrap();
        assert!(v.criteria && v.direct, "{v:?}");
    }

    #[test]
    fn complex_direct_value_rejected() {
        let nl = parse("branch A a b y=1+1j\n").unwrap();
        assert!(matches!(network_impedance_s(&nl, 1, 2), Err(Error::PreconditionViolated(_))));
        let nl = parse("branch A a b y=1\nbranch B c d y=1\n").unwrap();
        assert_eq!(network_impedance_s(&nl, 1, 3), Err(Error::Disconnected));
    }
}
