use crate::admittance::build;
use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::linalg::Matrix;
use crate::network::Network;
use crate::scalar::{RealScalar, Scalar, Tolerance};
use crate::solve::{driving_point_impedance, solve_grounded, transfer_impedance, GroundedSolution};

/// Angles tried by default when looking for a metric `Re(e^{-jθ} Z)`.
pub const DEFAULT_THETAS: [f64; 5] = [
    0.0,
    std::f64::consts::FRAC_PI_4,
    std::f64::consts::FRAC_PI_2,
    -std::f64::consts::FRAC_PI_4,
    -std::f64::consts::FRAC_PI_2,
];

fn nonzero_graph<T: Scalar>(net: &Network<T>) -> MultiGraph {
    let mut g = MultiGraph::new(net.n());
    for (id, b) in net.branches.iter().enumerate() {
        if !b.y.is_zero() && b.head != b.tail {
            g.add_edge(id, b.head, b.tail).expect("endpoints checked");
        }
    }
    g
}

fn same_component(comps: &[Vec<usize>], a: usize, b: usize) -> bool {
    comps.iter().any(|c| c.contains(&a) && c.contains(&b))
}

/// True when every path of nonzero branches between `p` and `r` passes
/// through `q`.
pub fn bridge_separates<T: Scalar>(net: &Network<T>, q: usize, p: usize, r: usize) -> bool {
    if q == p || q == r {
        return true;
    }
    !same_component(&nonzero_graph(net).components_without_nodes(&[q]), p, r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DcOrientation {
    /// Nodes with `v_k > v_p` or `v_k < v_q`.
    pub violations: Vec<usize>,
    /// Nodes other than `p` at the voltage of `p`.
    pub equal_to_p: Vec<usize>,
    /// Nodes other than `q` at the voltage of `q`.
    pub equal_to_q: Vec<usize>,
    /// Nodes whose equality with `p` or `q` disagrees with the separation
    /// topology.
    pub bridge_mismatches: Vec<usize>,
}

impl DcOrientation {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.bridge_mismatches.is_empty()
    }
}

fn le<R: RealScalar>(a: &R, b: &R, thr: f64) -> bool {
    if R::EXACT {
        a <= b
    } else {
        a.as_f64() <= b.as_f64() + thr
    }
}

fn close<R: RealScalar>(a: &R, b: &R, thr: f64) -> bool {
    le(a, b, thr) && le(b, a, thr)
}

/// With one source driving current from `q` into `p` through nonnegative
/// conductances, every node voltage lies between `v_q` and `v_p`.
pub fn check_dc_orientability<R: RealScalar>(
    net: &Network<R>,
    sol: &GroundedSolution<R>,
    p: usize,
    q: usize,
    tol: &Tolerance,
) -> Result<DcOrientation> {
    let n = net.n();
    for x in [p, q] {
        if x == 0 || x > n {
            return Err(Error::IndexOutOfRange { index: x, size: n });
        }
    }
    if p == q {
        return Err(Error::EqualIndices(p));
    }
    if sol.v.len() != n {
        return Err(Error::DimensionMismatch(format!("{} voltages for {} nodes", sol.v.len(), n)));
    }
    let bad = |m: &str| Err(Error::PreconditionViolated(m.into()));
    if let Some(b) = net.branches.iter().find(|b| b.y < R::zero()) {
        return bad(&format!("branch '{}' has a negative admittance", b.name));
    }
    if !net.voltage_sources.is_empty() || !net.dependent_sources.is_empty() || net.current_sources.len() != 1 {
        return bad("exactly one independent current source is required");
    }
    let s = &net.current_sources[0];
    let drives = (s.from == q && s.to == p && s.value > R::zero()) || (s.from == p && s.to == q && s.value < R::zero());
    if !drives {
        return bad("the source must drive a positive current from q into p");
    }
    let g = nonzero_graph(net);
    if !g.is_connected(&[]) {
        return bad("nonzero branches do not connect the network");
    }

    let scale = sol.v.iter().map(|v| v.magnitude()).fold(0.0, f64::max);
    let thr = tol.threshold(scale);
    let (vp, vq) = (sol.at(p), sol.at(q));
    let without_p = g.components_without_nodes(&[p]);
    let without_q = g.components_without_nodes(&[q]);
    let mut out =
        DcOrientation { violations: vec![], equal_to_p: vec![], equal_to_q: vec![], bridge_mismatches: vec![] };
    for k in 1..=n {
        let vk = sol.at(k);
        if !(le(vk, vp, thr) && le(vq, vk, thr)) {
            out.violations.push(k);
        }
        let at_p = k != p && close(vk, vp, thr);
        let at_q = k != q && close(vk, vq, thr);
        if at_p {
            out.equal_to_p.push(k);
        }
        if at_q {
            out.equal_to_q.push(k);
        }
        let cut_from_q = k != p && !same_component(&without_p, k, q);
        let cut_from_p = k != q && !same_component(&without_q, k, p);
        if at_p != cut_from_q || at_q != cut_from_p {
            out.bridge_mismatches.push(k);
        }
    }
    Ok(out)
}

/// `d_jk = Re(e^{-jθ} Z_jk)` for a full impedance table.
pub fn metric_table<T: Scalar>(z: &Matrix<T>, theta: f64) -> Result<Matrix<f64>> {
    if !z.is_square() {
        return Err(Error::NotSquare { rows: z.rows(), cols: z.cols() });
    }
    let (c, s) = (theta.cos(), theta.sin());
    let mut d = Matrix::zeros(z.rows(), z.cols());
    for r in 0..z.rows() {
        for k in 0..z.cols() {
            let v = z[(r, k)].to_complex64().ok_or_else(|| Error::Unrepresentable(format!("{:?}", z[(r, k)])))?;
            d[(r, k)] = v.re * c + v.im * s;
        }
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub theta: f64,
    /// 1-based `(p, q, r)` with `d_pq + d_qr < d_pr`.
    pub violations: Vec<(usize, usize, usize)>,
    /// Pairs `j < k` with `d_jk <= 0`.
    pub nonpositive: Vec<(usize, usize)>,
    /// Pairs where `d` is not symmetric.
    pub asymmetric: Vec<(usize, usize)>,
}

impl MetricReport {
    pub fn is_metric(&self) -> bool {
        self.violations.is_empty() && self.nonpositive.is_empty() && self.asymmetric.is_empty()
    }
}

/// Scans every ordered triple of distinct nodes for a triangle violation.
pub fn check_metric<T: Scalar>(z: &Matrix<T>, theta: f64, tol: &Tolerance) -> Result<MetricReport> {
    let d = metric_table(z, theta)?;
    let n = d.rows();
    let thr = tol.threshold(d.max_magnitude());
    let mut report = MetricReport { theta, violations: vec![], nonpositive: vec![], asymmetric: vec![] };
    for p in 0..n {
        for r in 0..n {
            if p == r {
                continue;
            }
            if p < r {
                if d[(p, r)] <= thr {
                    report.nonpositive.push((p + 1, r + 1));
                }
                if (d[(p, r)] - d[(r, p)]).abs() > thr {
                    report.asymmetric.push((p + 1, r + 1));
                }
            }
            for q in 0..n {
                if q != p && q != r && d[(p, q)] + d[(q, r)] < d[(p, r)] - thr {
                    report.violations.push((p + 1, q + 1, r + 1));
                }
            }
        }
    }
    Ok(report)
}

/// Triples `(p, q, r)` with `p < r` and `d_pq + d_qr = d_pr`.
pub fn triangle_equalities(d: &Matrix<f64>, tol: &Tolerance) -> Vec<(usize, usize, usize)> {
    let n = d.rows();
    let thr = tol.threshold(d.max_magnitude());
    let mut out = Vec::new();
    for p in 0..n {
        for r in p + 1..n {
            for q in 0..n {
                if q != p && q != r && (d[(p, q)] + d[(q, r)] - d[(p, r)]).abs() <= thr {
                    out.push((p + 1, q + 1, r + 1));
                }
            }
        }
    }
    out
}

/// `∂Z_jk/∂y_α = -tz(pq; jk)^2` for a branch `α` between `p` and `q`.
pub fn rayleigh_sensitivity<T: Scalar>(y: &Matrix<T>, j: usize, k: usize, p: usize, q: usize) -> Result<T> {
    Ok(-transfer_impedance(y, p, q, j, k)?.square())
}

/// Central difference of `Z_jk` in the admittance of branch `alpha`.
pub fn rayleigh_fd<T: Scalar>(net: &Network<T>, j: usize, k: usize, alpha: usize, h: T) -> Result<T> {
    let b = net.branches.get(alpha).ok_or_else(|| Error::UnknownBranch(format!("#{alpha}")))?;
    let at = |v: T| {
        let mut m = net.clone();
        m.branches[alpha].y = v;
        driving_point_impedance(&build(&m), j, k)
    };
    let up = at(b.y.clone() + h.clone())?;
    let down = at(b.y.clone() - h.clone())?;
    Ok((up - down) / (h.clone() + h))
}

/// `Σ |v_α|^2 conj(y_α)` under a unit current from `k` into `j`.
pub fn impedance_from_branch_voltages<T: Scalar>(net: &Network<T>, j: usize, k: usize) -> Result<T> {
    let n = net.n();
    for x in [j, k] {
        if x == 0 || x > n {
            return Err(Error::IndexOutOfRange { index: x, size: n });
        }
    }
    if j == k {
        return Ok(T::zero());
    }
    let mut i = vec![T::zero(); n];
    i[j - 1] = T::one();
    i[k - 1] = -T::one();
    let sol = solve_grounded(&build(net), &i, k, &Tolerance::default())?;
    Ok(net.branches.iter().fold(T::zero(), |acc, b| {
        let v = sol.at(b.head).clone() - sol.at(b.tail).clone();
        acc + v.clone() * v.conj() * b.y.conj()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::solve::{impedance_table, solve_network};
    use num_rational::BigRational;

    fn chain() -> Network<BigRational> {
        let mut net = Network::new(4);
        net.add_branch("a", 1, 2, rational(1, 1))
            .add_branch("b", 2, 3, rational(2, 1))
            .add_branch("c", 3, 4, rational(3, 1))
            .add_current_source("I", 4, 1, rational(1, 1));
        net
    }

    #[test]
    fn chain_is_monotone() {
        let net = chain();
        let sol = solve_network(&net, 4, &Tolerance::ZERO).unwrap();
        let r = check_dc_orientability(&net, &sol, 1, 4, &Tolerance::ZERO).unwrap();
        assert!(r.holds());
        assert!(r.equal_to_p.is_empty() && r.equal_to_q.is_empty());
        assert!(sol.v.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn pendant_node_sits_at_terminal_voltage() {
        let mut net = chain();
        net.add_branch("d", 1, 5, rational(1, 1)).node_names.push("5".into());
        let sol = solve_network(&net, 4, &Tolerance::ZERO).unwrap();
        let r = check_dc_orientability(&net, &sol, 1, 4, &Tolerance::ZERO).unwrap();
        assert_eq!(r.equal_to_p, vec![5]);
        assert!(r.holds());
        assert!(bridge_separates(&net, 1, 5, 4));
    }

    #[test]
    fn wrong_source_direction_rejected() {
        let net = chain();
        let sol = solve_network(&net, 4, &Tolerance::ZERO).unwrap();
        assert!(matches!(
            check_dc_orientability(&net, &sol, 4, 1, &Tolerance::ZERO),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn resistive_chain_is_metric_with_path_equalities() {
        let net = chain();
        let z = impedance_table(&build(&net)).unwrap();
        let rep = check_metric(&z, 0.0, &Tolerance::default()).unwrap();
        assert!(rep.is_metric());
        let eq = triangle_equalities(&metric_table(&z, 0.0).unwrap(), &Tolerance::default());
        assert!(eq.contains(&(1, 2, 3)) && eq.contains(&(1, 3, 4)) && !eq.contains(&(1, 4, 2)));
    }

    #[test]
    fn sensitivity_of_own_pair_is_minus_z_squared() {
        let net = chain();
        let y = build(&net);
        let z = driving_point_impedance(&y, 2, 3).unwrap();
        assert_eq!(rayleigh_sensitivity(&y, 2, 3, 2, 3).unwrap(), -(z.clone() * z));
    }

    #[test]
    fn branch_voltage_sum_gives_impedance() {
        let net = chain();
        let y = build(&net);
        assert_eq!(impedance_from_branch_voltages(&net, 1, 4).unwrap(), driving_point_impedance(&y, 1, 4).unwrap());
    }
}
