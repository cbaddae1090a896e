use std::collections::VecDeque;

use num_complex::Complex64;

use super::power::branch_power;
use super::PhaseInterval;
use crate::admittance::build;
use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::network::Network;
use crate::scalar::Tolerance;
use crate::solve::{solve_grounded, GroundedSolution};

/// Cycle consistency tolerance for the unwrapped angles.
const ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseAssignment {
    pub ground: usize,
    /// Unwrapped angle per node, `None` at zero voltage.
    pub delta: Vec<Option<f64>>,
    pub zero_voltage_nodes: Vec<usize>,
    /// Source terminals (the end away from ground).
    pub source_terminals: Vec<usize>,
    /// Terminals whose source delivers positive active power.
    pub generators: Vec<usize>,
    /// Nodes attaining the largest angle.
    pub max_nodes: Vec<usize>,
    /// The largest angle sits on a generator terminal, or on a source
    /// terminal when no source generates.
    pub max_at_generator: bool,
    /// For each maximal node that is not such a terminal: a path to one
    /// along branches carrying no active power, or an empty vector if none
    /// exists.
    pub zero_flow_paths: Vec<Vec<usize>>,
    /// Branches whose angle drop disagrees in sign with their active power.
    pub sign_violations: Vec<String>,
    /// Largest distance of `δ_k` from `arg v_k` modulo 2π.
    pub congruence_residual: f64,
}

impl PhaseAssignment {
    pub fn holds(&self) -> bool {
        self.max_at_generator && self.sign_violations.is_empty() && self.zero_flow_paths.iter().all(|p| !p.is_empty())
    }
}

fn wrap(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = a.rem_euclid(tau);
    if r > std::f64::consts::PI {
        r - tau
    } else {
        r
    }
}

/// Unwrapped voltage angles for an inductive flow grounded at `sol.ground`.
///
/// Each branch between nonzero-voltage nodes contributes the angle drop
/// `atan2(μ, Re(v_j conj(v_k)))`, which equals `arcsin(μ / |v_j||v_k|)`
/// whenever `Re(v_j conj(v_k)) >= 0`; otherwise the principal drop is moved
/// by 2π to agree in sign with the active power.
pub fn assign_phase_angles(
    net: &Network<Complex64>,
    sol: &GroundedSolution<Complex64>,
    tol: &Tolerance,
) -> Result<PhaseAssignment> {
    let n = net.n();
    let g = sol.ground;
    let bad = |m: String| Err(Error::PreconditionViolated(m));
    for b in &net.branches {
        if b.y.norm() == 0.0 {
            return bad(format!("branch '{}' has zero admittance", b.name));
        }
        if b.y.inv().re < -tol.threshold(b.y.inv().norm()) {
            return bad(format!("branch '{}' has negative resistance", b.name));
        }
    }
    let mut source_terminals = Vec::new();
    for s in &net.current_sources {
        let t = if s.from == g {
            s.to
        } else if s.to == g {
            s.from
        } else {
            return bad(format!("source '{}' is not connected to the ground node", s.name));
        };
        if source_terminals.contains(&t) {
            return bad(format!("two sources share terminal {t}"));
        }
        source_terminals.push(t);
    }
    let mut graph = MultiGraph::new(n);
    for (id, b) in net.branches.iter().enumerate() {
        graph.add_edge(id, b.head, b.tail)?;
    }
    if !graph.is_connected(&[]) || graph.components_without_nodes(&[g]).len() > 1 {
        return bad("the network must stay connected with the ground node removed".into());
    }

    let flows = branch_power(net, sol, tol)?;
    let vmax = sol.v.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let vzero = tol.threshold(vmax);
    let nonzero: Vec<bool> = sol.v.iter().map(|v| v.norm() > vzero).collect();
    let pthr = tol.threshold(flows.scale);
    let prod_thr = pthr * flows.scale.max(pthr);

    let mut offenders = Vec::new();
    for (b, f) in net.branches.iter().zip(&flows.branches) {
        if !nonzero[b.head - 1] || !nonzero[b.tail - 1] {
            continue;
        }
        let (ph, pt) = (f.s_plus.re, f.s_minus.re);
        let (a, c) = (f.mu * ph, f.mu * pt);
        let z = f.z.expect("nonzero admittance");
        let lossless = z.re.abs() <= tol.threshold(z.norm());
        let no_current = f.current.norm() <= tol.threshold(flows.scale / vmax.max(f64::MIN_POSITIVE));
        let negative = a < -prod_thr || c < -prod_thr;
        let degenerate = (a.abs() <= prod_thr || c.abs() <= prod_thr) && !lossless && !no_current;
        if negative || degenerate {
            offenders.push(b.name.clone());
        }
    }
    if !offenders.is_empty() {
        return Err(Error::NotInductivelyLoaded(offenders));
    }

    // Angle drop from head to tail for every branch between nonzero nodes.
    let mut drop: Vec<Option<f64>> = vec![None; net.branches.len()];
    let mut unique_fail: Option<String> = None;
    for (id, (b, f)) in net.branches.iter().zip(&flows.branches).enumerate() {
        if !nonzero[b.head - 1] || !nonzero[b.tail - 1] {
            continue;
        }
        let (vh, vt) = (sol.v[b.head - 1], sol.v[b.tail - 1]);
        let cosine = (vh * vt.conj()).re;
        let mut d = f.mu.atan2(cosine);
        let r = f.z.expect("nonzero admittance").re;
        let x = f.z.expect("nonzero admittance").im;
        let unique = r * f.s_plus.re + x * f.s_plus.im <= vh.norm_sqr() + pthr * vmax
            || -r * f.s_minus.re - x * f.s_minus.im <= vt.norm_sqr() + pthr * vmax;
        if !unique {
            unique_fail.get_or_insert_with(|| b.name.clone());
            let p = f.s_plus.re;
            if p > pthr && d < 0.0 {
                d += std::f64::consts::TAU;
            } else if p < -pthr && d > 0.0 {
                d -= std::f64::consts::TAU;
            }
        }
        drop[id] = Some(d);
    }

    // Breadth-first over nonzero nodes, starting each component at a source
    // terminal where possible.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
    for (id, b) in net.branches.iter().enumerate() {
        if drop[id].is_some() {
            adj[b.head].push((id, b.tail));
            adj[b.tail].push((id, b.head));
        }
    }
    let mut delta: Vec<Option<f64>> = vec![None; n];
    let starts: Vec<usize> = source_terminals.iter().copied().chain(1..=n).collect();
    for s in starts {
        if !nonzero[s - 1] || delta[s - 1].is_some() {
            continue;
        }
        delta[s - 1] = Some(sol.v[s - 1].arg());
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let du = delta[u - 1].expect("visited");
            for &(id, w) in &adj[u] {
                if delta[w - 1].is_some() {
                    continue;
                }
                let d = drop[id].expect("listed");
                let dw = if net.branches[id].head == u { du - d } else { du + d };
                delta[w - 1] = Some(dw);
                queue.push_back(w);
            }
        }
    }
    for (id, b) in net.branches.iter().enumerate() {
        if let (Some(d), Some(h), Some(t)) = (drop[id], delta[b.head - 1], delta[b.tail - 1]) {
            if ((h - t) - d).abs() > ANGLE_TOL * (1.0 + d.abs()) {
                return Err(match unique_fail {
                    Some(name) => Error::ConditionAcdeltauFailed(name),
                    None => Error::InconsistentSolution(format!("angle cycle through branch '{}'", b.name)),
                });
            }
        }
    }

    let congruence_residual =
        (1..=n).filter_map(|k| delta[k - 1].map(|d| wrap(d - sol.v[k - 1].arg()).abs())).fold(0.0, f64::max);

    let mut generators = Vec::new();
    for s in &net.current_sources {
        let (t, into) = if s.from == g { (s.to, s.value) } else { (s.from, -s.value) };
        if (sol.v[t - 1] * into.conj()).re > pthr {
            generators.push(t);
        }
    }

    let dmax = delta.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_nodes: Vec<usize> =
        (1..=n).filter(|&k| delta[k - 1].is_some_and(|d| (d - dmax).abs() <= ANGLE_TOL * (1.0 + dmax.abs()))).collect();
    let anchors: &[usize] = if generators.is_empty() { &source_terminals } else { &generators };
    let max_at_generator = max_nodes.iter().any(|k| anchors.contains(k));
    let mut zero_flow_paths = Vec::new();
    for &k in &max_nodes {
        if !anchors.contains(&k) {
            zero_flow_paths.push(zero_flow_path(net, &flows.branches, k, anchors, pthr));
        }
    }

    let mut sign_violations = Vec::new();
    for (id, (b, f)) in net.branches.iter().zip(&flows.branches).enumerate() {
        let Some(d) = drop[id] else { continue };
        for p in [f.s_plus.re, f.s_minus.re] {
            let wrong = (p > pthr && d <= 0.0) || (p < -pthr && d >= 0.0) || (p.abs() <= pthr && d.abs() > 1e-6);
            if wrong {
                sign_violations.push(b.name.clone());
                break;
            }
        }
    }

    Ok(PhaseAssignment {
        ground: g,
        zero_voltage_nodes: (1..=n).filter(|&k| !nonzero[k - 1]).collect(),
        delta,
        source_terminals,
        generators,
        max_nodes,
        max_at_generator,
        zero_flow_paths,
        sign_violations,
        congruence_residual,
    })
}

fn zero_flow_path(
    net: &Network<Complex64>,
    flows: &[super::BranchPowerFlow],
    start: usize,
    targets: &[usize],
    pthr: f64,
) -> Vec<usize> {
    let n = net.n();
    let mut prev: Vec<Option<usize>> = vec![None; n + 1];
    prev[start] = Some(start);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        if targets.contains(&u) {
            let mut path = vec![u];
            let mut c = u;
            while c != start {
                c = prev[c].expect("reached");
                path.push(c);
            }
            path.reverse();
            return path;
        }
        for (b, f) in net.branches.iter().zip(flows) {
            if f.s_plus.re.abs() > pthr || f.s_minus.re.abs() > pthr {
                continue;
            }
            let w = if b.head == u {
                b.tail
            } else if b.tail == u {
                b.head
            } else {
                continue;
            };
            if prev[w].is_none() {
                prev[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    Vec::new()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DendroReport {
    /// `(j, k, branch)` where neither orientation of the current fits.
    pub failures: Vec<(usize, usize, String)>,
    /// `(j, k, branch)` with a current perpendicular to the source.
    pub perpendicular: Vec<(usize, usize, String)>,
    /// Smallest width of a closed interval containing 0 that would make
    /// the network pass, over all node pairs.
    pub required_spread: f64,
}

impl DendroReport {
    pub fn dendromorphic(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Width of the shortest arc through 0 covering all angles modulo π.
fn spread_mod_pi(angles: &[f64]) -> f64 {
    let pi = std::f64::consts::PI;
    let mut pts: Vec<f64> = angles.iter().map(|a| a.rem_euclid(pi)).collect();
    pts.push(0.0);
    pts.sort_by(|a, b| a.total_cmp(b));
    let mut gap = pts[0] + pi - pts[pts.len() - 1];
    for w in pts.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    (pi - gap).max(0.0)
}

/// Drives a unit current between every node pair and checks that each
/// nonzero branch current, in one of its two orientations, has its phase in
/// `interval`. Ends of the interval are treated as closed.
pub fn check_dendromorphic(
    net: &Network<Complex64>,
    interval: &PhaseInterval,
    tol: &Tolerance,
) -> Result<DendroReport> {
    const LIMIT: usize = 12;
    let n = net.n();
    if n > LIMIT {
        return Err(Error::TooLarge { what: "node count", size: n, limit: LIMIT });
    }
    let closed = PhaseInterval::closed(interval.lo, interval.hi);
    let y = build(net);
    let angle_tol = 1e-9;
    let mut report = DendroReport { failures: vec![], perpendicular: vec![], required_spread: 0.0 };
    for j in 1..=n {
        for k in j + 1..=n {
            let mut i = vec![Complex64::new(0.0, 0.0); n];
            i[j - 1] = Complex64::new(1.0, 0.0);
            i[k - 1] = Complex64::new(-1.0, 0.0);
            let sol = solve_grounded(&y, &i, k, tol)?;
            let currents: Vec<Complex64> =
                net.branches.iter().map(|b| b.y * (sol.v[b.head - 1] - sol.v[b.tail - 1])).collect();
            let scale = currents.iter().map(|c| c.norm()).fold(1.0, f64::max);
            let mut angles = Vec::new();
            for (b, c) in net.branches.iter().zip(&currents) {
                if c.norm() <= tol.threshold(scale) {
                    continue;
                }
                angles.push(c.arg());
                if c.re.abs() <= tol.threshold(c.norm()) {
                    report.perpendicular.push((j, k, b.name.clone()));
                }
                if !closed.contains(c.arg(), angle_tol) && !closed.contains((-c).arg(), angle_tol) {
                    report.failures.push((j, k, b.name.clone()));
                }
            }
            report.required_spread = report.required_spread.max(spread_mod_pi(&angles));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::solve_network;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Generator at node 2, inductive star through node 3 to loads at 4 and
    /// 5, all grounded through shunts at node 1.
    fn star() -> Network<Complex64> {
        let mut net = Network::new(5);
        net.add_branch("l23", 2, 3, c(0.0, -5.0))
            .add_branch("l34", 3, 4, c(0.0, -4.0))
            .add_branch("l35", 3, 5, c(0.0, -3.0))
            .add_branch("load4", 4, 1, c(1.0, -0.2))
            .add_branch("load5", 5, 1, c(0.5, -0.1))
            .add_current_source("G", 1, 2, c(1.0, 0.0));
        net
    }

    #[test]
    fn angles_fall_away_from_generator() {
        let net = star();
        let sol = solve_network(&net, 1, &Tolerance::default()).unwrap();
        let a = assign_phase_angles(&net, &sol, &Tolerance::default()).unwrap();
        assert!(a.holds(), "{a:?}");
        let d = |k: usize| a.delta[k - 1].unwrap();
        assert!(d(2) > d(3) && d(3) > d(4) && d(3) > d(5));
        assert_eq!(a.max_nodes, vec![2]);
        assert_eq!(a.generators, vec![2]);
        assert_eq!(a.zero_voltage_nodes, vec![1]);
        assert!(a.congruence_residual < 1e-12);
    }

    #[test]
    fn source_off_ground_rejected() {
        let mut net = star();
        net.add_current_source("X", 3, 4, c(1.0, 0.0));
        let sol = solve_network(&net, 1, &Tolerance::default()).unwrap();
        assert!(matches!(assign_phase_angles(&net, &sol, &Tolerance::default()), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn capacitive_branch_is_not_inductively_loaded() {
        let mut net = star();
        net.branches[1].y = c(0.0, 4.0);
        let sol = solve_network(&net, 1, &Tolerance::default()).unwrap();
        match assign_phase_angles(&net, &sol, &Tolerance::default()) {
            Err(Error::NotInductivelyLoaded(names)) => assert!(names.contains(&"l34".to_string())),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tree_is_trivially_dendromorphic() {
        let mut net = Network::new(4);
        net.add_branch("a", 1, 2, c(1.0, -2.0)).add_branch("b", 2, 3, c(0.3, 0.0)).add_branch("c", 2, 4, c(0.0, 1.0));
        let r = check_dendromorphic(&net, &PhaseInterval::trivial(), &Tolerance::default()).unwrap();
        assert!(r.dendromorphic());
        assert!(r.required_spread < 1e-12);
    }

    #[test]
    fn spread_of_angles() {
        let pi = std::f64::consts::PI;
        assert!((spread_mod_pi(&[0.3, -0.2]) - 0.5).abs() < 1e-15);
        assert!((spread_mod_pi(&[pi - 0.1, 0.2]) - 0.3).abs() < 1e-15);
        assert!(spread_mod_pi(&[]) == 0.0);
    }

    #[test]
    fn size_guard() {
        let net = Network::<Complex64>::new(13);
        assert!(matches!(
            check_dendromorphic(&net, &PhaseInterval::trivial(), &Tolerance::default()),
            Err(Error::TooLarge { .. })
        ));
    }
}
