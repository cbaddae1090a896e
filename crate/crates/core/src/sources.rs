//! Source algebra: Thévenin and Norton conversion, one-port equivalents of
//! subnetworks, elimination of isolated voltage sources and the admittance
//! stamps of linear dependent sources.

use crate::admittance::build;
use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::linalg::{solve, Matrix};
use crate::network::{Branch, CurrentSource, DependentKind, DependentSource, Network, VoltageSource};
use crate::scalar::{Scalar, Tolerance};
use crate::solve::GroundedSolution;

/// Current source `current` directed from `q` into `p` with admittance `y`
/// across the same nodes. The element carries `y (v_p - v_q) - current`
/// from `p` to `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct NortonSource<T> {
    pub p: usize,
    pub q: usize,
    pub current: T,
    pub y: T,
}

/// Voltage `voltage` rising from `q` to `p` in series with admittance `y`.
/// The element carries `y (v_p - v_q - voltage)` from `p` to `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct TheveninSource<T> {
    pub p: usize,
    pub q: usize,
    pub voltage: T,
    pub y: T,
}

impl<T: Scalar> NortonSource<T> {
    pub fn new(p: usize, q: usize, current: T, y: T) -> Result<Self> {
        if y.is_zero() {
            return Err(Error::ZeroAdmittance);
        }
        Ok(NortonSource { p, q, current, y })
    }

    /// Current through the element from `p` to `q`.
    pub fn element_current(&self, vp: &T, vq: &T) -> T {
        self.y.clone() * (vp.clone() - vq.clone()) - self.current.clone()
    }
}

impl<T: Scalar> TheveninSource<T> {
    pub fn new(p: usize, q: usize, voltage: T, y: T) -> Result<Self> {
        if y.is_zero() {
            return Err(Error::ZeroAdmittance);
        }
        Ok(TheveninSource { p, q, voltage, y })
    }

    pub fn element_current(&self, vp: &T, vq: &T) -> T {
        self.y.clone() * (vp.clone() - vq.clone() - self.voltage.clone())
    }
}

/// `V = I / y`.
pub fn norton_to_thevenin<T: Scalar>(n: &NortonSource<T>) -> Result<TheveninSource<T>> {
    if n.y.is_zero() {
        return Err(Error::ZeroAdmittance);
    }
    Ok(TheveninSource { p: n.p, q: n.q, voltage: n.current.clone() / n.y.clone(), y: n.y.clone() })
}

/// `I = y V`.
pub fn thevenin_to_norton<T: Scalar>(t: &TheveninSource<T>) -> Result<NortonSource<T>> {
    if t.y.is_zero() {
        return Err(Error::ZeroAdmittance);
    }
    Ok(NortonSource { p: t.p, q: t.q, current: t.y.clone() * t.voltage.clone(), y: t.y.clone() })
}

/// Adds a Norton source to a network as one branch and one current source.
pub fn add_norton<T: Scalar>(net: &mut Network<T>, name: &str, src: &NortonSource<T>) {
    net.add_branch(format!("{name}.y"), src.p, src.q, src.y.clone());
    net.add_current_source(format!("{name}.i"), src.q, src.p, src.current.clone());
}

/// Node voltages of a network containing one Thévenin source, solved with
/// the source in place rather than converted. Ground at `ground`.
pub fn solve_with_thevenin<T: Scalar>(
    net: &Network<T>,
    src: &TheveninSource<T>,
    ground: usize,
) -> Result<GroundedSolution<T>> {
    // The series element is an admittance `y` between `p` and an internal
    // node that sits `V` above `q`; eliminating that node by the pinned
    // voltage leaves `y` in Y and `y V` injected at `p`, drawn from `q`.
    let n = net.n();
    let mut y = build(net);
    let mut i = net.injections();
    let (p, q) = (src.p - 1, src.q - 1);
    y[(p, p)] = y[(p, p)].clone() + src.y.clone();
    y[(q, q)] = y[(q, q)].clone() + src.y.clone();
    y[(p, q)] = y[(p, q)].clone() - src.y.clone();
    y[(q, p)] = y[(q, p)].clone() - src.y.clone();
    let yv = src.y.clone() * src.voltage.clone();
    i[p] = i[p].clone() + yv.clone();
    i[q] = i[q].clone() - yv;
    let g = ground - 1;
    let keep: Vec<usize> = (0..n).filter(|&k| k != g).collect();
    let rhs: Vec<T> = keep.iter().map(|&k| i[k].clone()).collect();
    let mut v = solve(&y.select(&keep, &keep), &rhs).map_err(|_| Error::SingularNetwork)?;
    v.insert(g, T::zero());
    Ok(GroundedSolution { ground, v })
}

/// Current through the branch `branch` and current source `source`, taken
/// together as one Norton element from `p` to `q`, recovered from Kirchhoff's
/// current law at `node` (either endpoint).
pub fn norton_current_from_kcl<T: Scalar>(
    net: &Network<T>,
    sol: &GroundedSolution<T>,
    branch: usize,
    source: usize,
    node: usize,
) -> Result<T> {
    let b = net.branches.get(branch).ok_or_else(|| Error::UnknownBranch(format!("#{branch}")))?;
    let s = net.current_sources.get(source).ok_or_else(|| Error::UnknownSource(format!("#{source}")))?;
    let (p, q) = (b.head, b.tail);
    if (s.to, s.from) != (p, q) {
        return Err(Error::PreconditionViolated(
            "current source must be directed from the branch tail to its head".into(),
        ));
    }
    if node != p && node != q {
        return Err(Error::PreconditionViolated(format!("node {node} is not an endpoint of the element")));
    }
    let leaving = leaving_current(net, sol, node, Some(branch), Some(source));
    // Everything else leaving `node` balances the element current.
    Ok(if node == p { -leaving } else { leaving })
}

/// Net current leaving `node` through branches and current sources, with the
/// given elements left out.
fn leaving_current<T: Scalar>(
    net: &Network<T>,
    sol: &GroundedSolution<T>,
    node: usize,
    skip_branch: Option<usize>,
    skip_source: Option<usize>,
) -> T {
    let mut total = T::zero();
    for (idx, b) in net.branches.iter().enumerate() {
        if Some(idx) == skip_branch || b.head == b.tail {
            continue;
        }
        let flow = b.y.clone() * (sol.at(b.head).clone() - sol.at(b.tail).clone());
        if b.head == node {
            total = total + flow;
        } else if b.tail == node {
            total = total - flow;
        }
    }
    for (idx, s) in net.current_sources.iter().enumerate() {
        if Some(idx) == skip_source {
            continue;
        }
        if s.from == node {
            total = total + s.value.clone();
        }
        if s.to == node {
            total = total - s.value.clone();
        }
    }
    total
}

/// Port `(p, q)` separating node sets `a` and `b`. Both sets are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnePortDecomposition {
    pub port: (usize, usize),
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl OnePortDecomposition {
    pub fn side(&self, side: Side) -> &[usize] {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.a.is_empty() || self.b.is_empty()
    }
}

/// Graph whose edges are the branches and every kind of source.
fn element_graph<T: Scalar>(net: &Network<T>) -> MultiGraph {
    let mut g = MultiGraph::new(net.n());
    let mut id = 0;
    let mut push = |a: usize, b: usize| {
        g.push_edge_unchecked(id, a, b);
        id += 1;
    };
    for b in &net.branches {
        push(b.head, b.tail);
    }
    for s in &net.current_sources {
        push(s.from, s.to);
    }
    for s in &net.voltage_sources {
        push(s.pos, s.neg);
    }
    for s in &net.dependent_sources {
        push(s.pos, s.neg);
    }
    g
}

fn check_port(n: usize, p: usize, q: usize) -> Result<()> {
    for x in [p, q] {
        if x == 0 || x > n {
            return Err(Error::IndexOutOfRange { index: x, size: n });
        }
    }
    if p == q {
        return Err(Error::EqualIndices(p));
    }
    Ok(())
}

/// Islands left after removing `p` and `q`, counting sources as edges.
pub fn port_islands<T: Scalar>(net: &Network<T>, p: usize, q: usize) -> Result<Vec<Vec<usize>>> {
    check_port(net.n(), p, q)?;
    let mut comps = element_graph(net).components_without_nodes(&[p, q]);
    for c in &mut comps {
        c.sort_unstable();
    }
    comps.sort();
    Ok(comps)
}

/// A nontrivial one-port decomposition at `(p, q)`, or `None` when only the
/// trivial ones exist. `a` is the island holding the smallest node and `b`
/// is everything else.
pub fn find_one_port<T: Scalar>(net: &Network<T>, p: usize, q: usize) -> Result<Option<OnePortDecomposition>> {
    let comps = port_islands(net, p, q)?;
    if comps.len() < 2 {
        return Ok(None);
    }
    let a = comps[0].clone();
    let mut b: Vec<usize> = comps[1..].concat();
    b.sort_unstable();
    Ok(Some(OnePortDecomposition { port: (p, q), a, b }))
}

/// Checks a caller-chosen partition: every node other than the port lies in
/// exactly one side and no element joins the two sides.
pub fn verify_one_port<T: Scalar>(
    net: &Network<T>,
    p: usize,
    q: usize,
    a: &[usize],
    b: &[usize],
) -> Result<OnePortDecomposition> {
    let n = net.n();
    check_port(n, p, q)?;
    let mut side = vec![None; n + 1];
    for (set, tag) in [(a, Side::A), (b, Side::B)] {
        for &x in set {
            if x == 0 || x > n {
                return Err(Error::IndexOutOfRange { index: x, size: n });
            }
            if x == p || x == q || side[x].is_some() {
                return Err(Error::IndexConflict(format!("node {x} is listed twice or is a port node")));
            }
            side[x] = Some(tag);
        }
    }
    if let Some(x) = (1..=n).find(|&x| x != p && x != q && side[x].is_none()) {
        return Err(Error::IndexConflict(format!("node {x} is in neither side")));
    }
    let g = element_graph(net);
    for e in g.edges() {
        if let (Some(s), Some(t)) = (side[e.from], side[e.to]) {
            if s != t {
                return Err(Error::PreconditionViolated(format!(
                    "an element joins node {} to node {} across the port",
                    e.from, e.to
                )));
            }
        }
    }
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    Ok(OnePortDecomposition { port: (p, q), a, b })
}

/// Norton equivalent of one side of a one-port decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct OnePortEquivalent<T> {
    pub side: Side,
    /// Short-circuit current, directed from `q` into `p`.
    pub short_circuit_current: T,
    pub admittance: T,
    /// `I_sc / y`; absent when the side presents no admittance.
    pub open_circuit_voltage: Option<T>,
    /// Admittance across the port itself, merged into [`Self::merged`].
    pub port_admittance: T,
    /// Current sources across the port itself, directed from `q` into `p`.
    pub port_current: T,
    /// Side equivalent plus the port's own elements.
    pub merged: Option<NortonSource<T>>,
    /// `ΣY_Sp - Y_Spᵀ Y_SS⁻¹ Y_Sp - y`, zero for exact scalars.
    pub identity_residual: T,
}

impl<T: Scalar> OnePortEquivalent<T> {
    /// True when the side carries no net source and reduces to an admittance.
    pub fn is_degenerate(&self) -> bool {
        self.short_circuit_current.is_zero()
    }
}

fn no_voltage_or_dependent<T>(net: &Network<T>) -> Result<()> {
    if !net.voltage_sources.is_empty() || !net.dependent_sources.is_empty() {
        return Err(Error::PreconditionViolated(
            "convert voltage sources and dependent sources before forming equivalents".into(),
        ));
    }
    Ok(())
}

/// Norton source equivalent to the subnetwork on `side` as seen from the port.
pub fn one_port_equivalent<T: Scalar>(
    net: &Network<T>,
    dec: &OnePortDecomposition,
    side: Side,
) -> Result<OnePortEquivalent<T>> {
    no_voltage_or_dependent(net)?;
    let (p, q) = dec.port;
    check_port(net.n(), p, q)?;
    let nodes = dec.side(side);
    let m = nodes.len();
    let y = build(net);
    let idx: Vec<usize> = nodes.iter().map(|k| k - 1).collect();
    let y_ss = y.select(&idx, &idx);
    // Admittances joining each side node to the port nodes.
    let y_sp: Vec<T> = idx.iter().map(|&k| -y[(k, p - 1)].clone()).collect();
    let y_sq: Vec<T> = idx.iter().map(|&k| -y[(k, q - 1)].clone()).collect();

    let in_side = |x: usize| nodes.binary_search(&x).is_ok();
    let mut i_s = vec![T::zero(); m];
    let mut sum_i_sp = T::zero();
    let mut port_current = T::zero();
    for s in &net.current_sources {
        let touches = in_side(s.from) || in_side(s.to);
        if touches {
            if let Ok(r) = nodes.binary_search(&s.to) {
                i_s[r] = i_s[r].clone() + s.value.clone();
            }
            if let Ok(r) = nodes.binary_search(&s.from) {
                i_s[r] = i_s[r].clone() - s.value.clone();
            }
            // Injection at `p` from sources between `p` and the side is `-Σi_Sp`.
            if s.from == p {
                sum_i_sp = sum_i_sp + s.value.clone();
            } else if s.to == p {
                sum_i_sp = sum_i_sp - s.value.clone();
            }
        } else if (s.from, s.to) == (q, p) {
            port_current = port_current + s.value.clone();
        } else if (s.from, s.to) == (p, q) {
            port_current = port_current - s.value.clone();
        }
    }
    let port_admittance = net
        .branches
        .iter()
        .filter(|b| (b.head == p && b.tail == q) || (b.head == q && b.tail == p))
        .fold(T::zero(), |acc, b| acc + b.y.clone());

    let dot = |a: &[T], b: &[T]| a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
    let (short_circuit_current, admittance, identity_residual) = if m == 0 {
        (T::zero(), T::zero(), T::zero())
    } else {
        // Y_SS is symmetric, so Y_Spᵀ Y_SS⁻¹ x = (Y_SS⁻¹ Y_Sp)ᵀ x.
        let w = solve(&y_ss, &y_sp).map_err(|_| Error::SingularSubnetwork)?;
        let isc = dot(&w, &i_s) - sum_i_sp;
        let adm = dot(&w, &y_sq);
        let sum_sp = y_sp.iter().cloned().fold(T::zero(), |a, b| a + b);
        let residual = sum_sp - dot(&w, &y_sp) - adm.clone();
        (isc, adm, residual)
    };
    let open_circuit_voltage =
        if admittance.is_zero() { None } else { Some(short_circuit_current.clone() / admittance.clone()) };
    let merged = NortonSource::new(
        p,
        q,
        port_current.clone() + short_circuit_current.clone(),
        port_admittance.clone() + admittance.clone(),
    )
    .ok();
    Ok(OnePortEquivalent {
        side,
        short_circuit_current,
        admittance,
        open_circuit_voltage,
        port_admittance,
        port_current,
        merged,
        identity_residual,
    })
}

/// Removes the listed nodes and every element touching them. Returns the
/// reduced network and the new index of each old node (`None` if removed).
pub fn remove_nodes<T: Scalar>(net: &Network<T>, removed: &[usize]) -> (Network<T>, Vec<Option<usize>>) {
    let n = net.n();
    let mut map = vec![None; n + 1];
    let mut next = 0;
    for (k, slot) in map.iter_mut().enumerate().skip(1) {
        if !removed.contains(&k) {
            next += 1;
            *slot = Some(next);
        }
    }
    let names = (1..=n).filter(|k| map[*k].is_some()).map(|k| net.node_names[k - 1].clone()).collect();
    let both = |a: usize, b: usize| map[a].zip(map[b]);
    let mut out = Network::new(0);
    out.node_names = names;
    for b in &net.branches {
        if let Some((h, t)) = both(b.head, b.tail) {
            out.branches.push(Branch { name: b.name.clone(), head: h, tail: t, y: b.y.clone() });
        }
    }
    for s in &net.current_sources {
        if let Some((f, t)) = both(s.from, s.to) {
            out.current_sources.push(CurrentSource { name: s.name.clone(), from: f, to: t, value: s.value.clone() });
        }
    }
    for s in &net.voltage_sources {
        if let Some((a, b)) = both(s.pos, s.neg) {
            out.voltage_sources.push(VoltageSource { name: s.name.clone(), pos: a, neg: b, value: s.value.clone() });
        }
    }
    (out, map)
}

/// Replaces the subnetwork on `side` by its Norton equivalent. Elements
/// across the port are kept as they are; the equivalent is added in parallel
/// as branch `"<side>.y"` and current source `"<side>.i"`.
pub fn replace_with_norton<T: Scalar>(
    net: &Network<T>,
    dec: &OnePortDecomposition,
    side: Side,
) -> Result<(Network<T>, Vec<Option<usize>>)> {
    let eq = one_port_equivalent(net, dec, side)?;
    let (mut out, map) = remove_nodes(net, dec.side(side));
    let (p, q) = (map[dec.port.0].expect("port kept"), map[dec.port.1].expect("port kept"));
    let label = match side {
        Side::A => "A",
        Side::B => "B",
    };
    if !eq.admittance.is_zero() {
        out.add_branch(format!("{label}.y"), p, q, eq.admittance.clone());
    }
    if !eq.short_circuit_current.is_zero() {
        out.add_current_source(format!("{label}.i"), q, p, eq.short_circuit_current.clone());
    }
    Ok((out, map))
}

fn voltage_source_index<T>(net: &Network<T>, name: &str) -> Result<usize> {
    net.voltage_sources.iter().position(|s| s.name == name).ok_or_else(|| Error::UnknownSource(name.to_string()))
}

/// Replaces the isolated voltage source `name` by current sources: the
/// network is contracted on its terminals and each admittance `y_pk` at the
/// positive terminal becomes a source of `y_pk V` from the negative terminal
/// into `k`. Elements directly across the source are absorbed by it.
///
/// The result keeps every node except the positive terminal; the merged node
/// takes the negative terminal's name. Use [`Network::contracted_index`]
/// with `(neg, pos)` to map old indices.
pub fn eliminate_voltage_source<T: Scalar>(net: &Network<T>, name: &str) -> Result<Network<T>> {
    let idx = voltage_source_index(net, name)?;
    if !net.dependent_sources.is_empty() {
        return Err(Error::PreconditionViolated("stamp dependent sources before eliminating voltage sources".into()));
    }
    let src = &net.voltage_sources[idx];
    let (p, q) = (src.pos, src.neg);
    if p == q {
        return Err(Error::VoltageSourceLoop(src.name.clone()));
    }
    let joins = |a: usize, b: usize| (a == p && b == q) || (a == q && b == p);
    if let Some(other) = net.voltage_sources.iter().enumerate().find(|(i, s)| *i != idx && joins(s.pos, s.neg)) {
        return Err(Error::VoltageSourceLoop(other.1.name.clone()));
    }
    let mut injected = Vec::new();
    for b in &net.branches {
        if b.head == b.tail || joins(b.head, b.tail) {
            continue;
        }
        let k = if b.head == p {
            b.tail
        } else if b.tail == p {
            b.head
        } else {
            continue;
        };
        injected.push((format!("{}.{}", src.name, b.name), k, b.y.clone() * src.value.clone()));
    }
    let mut out = net.contract(q, p)?;
    out.voltage_sources.retain(|s| s.name != src.name);
    let q_new = Network::<T>::contracted_index(q, p, q);
    out.node_names[q_new - 1] = net.node_names[q - 1].clone();
    for (label, k, value) in injected {
        let k_new = Network::<T>::contracted_index(q, p, k);
        out.add_current_source(label, q_new, k_new, value);
    }
    Ok(out)
}

/// Eliminates every voltage source in turn.
pub fn eliminate_all_voltage_sources<T: Scalar>(net: &Network<T>) -> Result<Network<T>> {
    let mut cur = net.clone();
    while let Some(name) = cur.voltage_sources.first().map(|s| s.name.clone()) {
        cur = eliminate_voltage_source(&cur, &name)?;
    }
    Ok(cur)
}

/// Oracle for [`eliminate_voltage_source`]: solves the node equations with
/// `v_pos - v_neg` pinned to the source value, grounded at the negative
/// terminal. Elements across the source are ignored and the other rows are
/// used as they stand.
pub fn solve_pinned_voltage<T: Scalar>(net: &Network<T>, name: &str, _tol: &Tolerance) -> Result<GroundedSolution<T>> {
    let idx = voltage_source_index(net, name)?;
    if net.voltage_sources.len() != 1 || !net.dependent_sources.is_empty() {
        return Err(Error::PreconditionViolated("the pinned solve handles exactly one voltage source".into()));
    }
    let src = &net.voltage_sources[idx];
    let (p, q) = (src.pos, src.neg);
    let n = net.n();
    let y = build(net);
    let i = net.injections();
    let rest: Vec<usize> = (0..n).filter(|&k| k != p - 1 && k != q - 1).collect();
    let rhs: Vec<T> = rest.iter().map(|&k| i[k].clone() - y[(k, p - 1)].clone() * src.value.clone()).collect();
    let sol = solve(&y.select(&rest, &rest), &rhs).map_err(|_| Error::SingularNetwork)?;
    let mut v = vec![T::zero(); n];
    for (slot, val) in rest.iter().zip(sol) {
        v[*slot] = val;
    }
    v[p - 1] = src.value.clone();
    Ok(GroundedSolution { ground: q, v })
}

/// Current delivered by the voltage source `name` into its positive terminal,
/// including whatever flows in elements it absorbed. Derived from Kirchhoff's
/// current law at that terminal.
pub fn voltage_source_current<T: Scalar>(net: &Network<T>, name: &str, sol: &GroundedSolution<T>) -> Result<T> {
    let idx = voltage_source_index(net, name)?;
    Ok(leaving_current(net, sol, net.voltage_sources[idx].pos, None, None))
}

/// Equivalent voltage-controlled current source of a dependent source: it
/// draws `coefficient (v_c - v_d)` out of `from` and delivers it into `to`,
/// where `(c, d) = control`. Voltage-source kinds also carry their series
/// admittance, which is stamped as an ordinary branch.
#[derive(Clone, Debug, PartialEq)]
pub struct DependentStamp<T> {
    pub from: usize,
    pub to: usize,
    pub control: (usize, usize),
    pub coefficient: T,
    pub series: Option<T>,
}

/// `(head, tail)` of branch `b`; its current `y (v_head - v_tail)` flows from
/// head to tail.
fn controlling_branch<T: Scalar>(net: &Network<T>, b: usize) -> Result<(usize, usize, T)> {
    net.branches.get(b).map(|br| (br.head, br.tail, br.y.clone())).ok_or_else(|| Error::UnknownBranch(format!("#{b}")))
}

pub fn dependent_stamp<T: Scalar>(net: &Network<T>, src: &DependentSource<T>) -> Result<DependentStamp<T>> {
    let n = net.n();
    let check = |x: usize| {
        if x == 0 || x > n {
            Err(Error::IndexOutOfRange { index: x, size: n })
        } else {
            Ok(())
        }
    };
    check(src.pos)?;
    check(src.neg)?;
    let series = |s: &T| {
        if s.is_zero() {
            Err(Error::MissingSeriesAdmittance(src.name.clone()))
        } else {
            Ok(s.clone())
        }
    };
    // Current kinds draw from `pos`; voltage kinds raise `pos` above `neg`,
    // so their Norton form delivers into `pos`.
    let (control, coefficient, series, current_kind) = match &src.kind {
        DependentKind::Vccs { ctrl, gain } => (*ctrl, gain.clone(), None, true),
        DependentKind::Cccs { branch, gain } => {
            let (h, t, y) = controlling_branch(net, *branch)?;
            ((h, t), gain.clone() * y, None, true)
        }
        DependentKind::Vcvs { ctrl, gain, series: s } => {
            let s = series(s)?;
            (*ctrl, gain.clone() * s.clone(), Some(s), false)
        }
        DependentKind::Ccvs { branch, gain, series: s } => {
            let s = series(s)?;
            let (h, t, y) = controlling_branch(net, *branch)?;
            ((h, t), gain.clone() * s.clone() * y, Some(s), false)
        }
    };
    check(control.0)?;
    check(control.1)?;
    let (from, to) = if current_kind { (src.pos, src.neg) } else { (src.neg, src.pos) };
    Ok(DependentStamp { from, to, control, coefficient, series })
}

/// Adds a dependent source to `y`: `+𝒴` at `(from, c)` and `(to, d)`, `-𝒴` at
/// `(from, d)` and `(to, c)`, plus the series admittance of voltage kinds.
pub fn stamp_dependent<T: Scalar>(y: &Matrix<T>, net: &Network<T>, src: &DependentSource<T>) -> Result<Matrix<T>> {
    let st = dependent_stamp(net, src)?;
    let mut out = y.clone();
    let (j, k) = (st.from - 1, st.to - 1);
    let (c, d) = (st.control.0 - 1, st.control.1 - 1);
    let g = st.coefficient;
    out[(j, c)] = out[(j, c)].clone() + g.clone();
    out[(k, d)] = out[(k, d)].clone() + g.clone();
    out[(j, d)] = out[(j, d)].clone() - g.clone();
    out[(k, c)] = out[(k, c)].clone() - g;
    if let Some(s) = st.series {
        out[(j, j)] = out[(j, j)].clone() + s.clone();
        out[(k, k)] = out[(k, k)].clone() + s.clone();
        out[(j, k)] = out[(j, k)].clone() - s.clone();
        out[(k, j)] = out[(k, j)].clone() - s;
    }
    Ok(out)
}

/// Admittance matrix with every dependent source stamped.
pub fn build_with_dependents<T: Scalar>(net: &Network<T>) -> Result<Matrix<T>> {
    net.dependent_sources.iter().try_fold(build(net), |y, s| stamp_dependent(&y, net, s))
}
