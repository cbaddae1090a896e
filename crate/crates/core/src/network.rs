//! A netlist with numeric element values, ready for analysis.

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::linalg::reindex_after_removal;
use crate::netlist::{ElementValue, Netlist, SourceKind};
use crate::scalar::{ExactComplex, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Branch<T> {
    pub name: String,
    pub head: usize,
    pub tail: usize,
    pub y: T,
}

/// Current `value` leaves `from` and enters `to`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentSource<T> {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub value: T,
}

/// Holds `v_pos - v_neg = value`.
#[derive(Clone, Debug, PartialEq)]
pub struct VoltageSource<T> {
    pub name: String,
    pub pos: usize,
    pub neg: usize,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DependentKind<T> {
    Vccs { ctrl: (usize, usize), gain: T },
    Cccs { branch: usize, gain: T },
    Vcvs { ctrl: (usize, usize), gain: T, series: T },
    Ccvs { branch: usize, gain: T, series: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DependentSource<T> {
    pub name: String,
    pub pos: usize,
    pub neg: usize,
    pub kind: DependentKind<T>,
}

/// Nodes are numbered `1..=n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Network<T> {
    pub node_names: Vec<String>,
    pub branches: Vec<Branch<T>>,
    pub current_sources: Vec<CurrentSource<T>>,
    pub voltage_sources: Vec<VoltageSource<T>>,
    pub dependent_sources: Vec<DependentSource<T>>,
}

fn convert<T: Scalar>(v: &ExactComplex) -> Result<T> {
    T::from_exact_complex(v).ok_or_else(|| Error::Unrepresentable(crate::netlist::format_complex(v)))
}

impl<T: Scalar> Network<T> {
    /// `n` nodes named `1..=n` and nothing else.
    pub fn new(n: usize) -> Self {
        Network {
            node_names: (1..=n).map(|k| k.to_string()).collect(),
            branches: Vec::new(),
            current_sources: Vec::new(),
            voltage_sources: Vec::new(),
            dependent_sources: Vec::new(),
        }
    }

    /// Requires every branch in direct form (see [`Netlist::eval_elements`]).
    pub fn from_netlist(nl: &Netlist) -> Result<Self> {
        let mut net = Network::new(0);
        net.node_names = nl.nodes.clone();
        for b in &nl.branches {
            let y = match &b.value {
                ElementValue::Direct(y) => convert(y)?,
                ElementValue::Gcrl { .. } => return Err(Error::NonDirectBranch(b.name.clone())),
            };
            net.branches.push(Branch { name: b.name.clone(), head: b.head, tail: b.tail, y });
        }
        for s in &nl.sources {
            let name = s.name.clone();
            match &s.kind {
                SourceKind::Current { from, to, i } => {
                    net.current_sources.push(CurrentSource { name, from: *from, to: *to, value: convert(i)? })
                }
                SourceKind::Voltage { pos, neg, v } => {
                    net.voltage_sources.push(VoltageSource { name, pos: *pos, neg: *neg, value: convert(v)? })
                }
                SourceKind::Vccs { pos, neg, ctrl, gain } => net.dependent_sources.push(DependentSource {
                    name,
                    pos: *pos,
                    neg: *neg,
                    kind: DependentKind::Vccs { ctrl: *ctrl, gain: convert(gain)? },
                }),
                SourceKind::Cccs { pos, neg, branch, gain } => net.dependent_sources.push(DependentSource {
                    name,
                    pos: *pos,
                    neg: *neg,
                    kind: DependentKind::Cccs { branch: *branch, gain: convert(gain)? },
                }),
                SourceKind::Vcvs { pos, neg, ctrl, gain, series } => net.dependent_sources.push(DependentSource {
                    name,
                    pos: *pos,
                    neg: *neg,
                    kind: DependentKind::Vcvs { ctrl: *ctrl, gain: convert(gain)?, series: convert(series)? },
                }),
                SourceKind::Ccvs { pos, neg, branch, gain, series } => net.dependent_sources.push(DependentSource {
                    name,
                    pos: *pos,
                    neg: *neg,
                    kind: DependentKind::Ccvs { branch: *branch, gain: convert(gain)?, series: convert(series)? },
                }),
            }
        }
        Ok(net)
    }

    /// Evaluates GCRL branches at the netlist's own frequency when needed.
    pub fn from_netlist_at_own_frequency(nl: &Netlist) -> Result<Self> {
        match nl.frequency() {
            Some(s) if nl.has_gcrl() => Network::from_netlist(&nl.eval_elements(&s)?),
            _ => Network::from_netlist(nl),
        }
    }

    pub fn n(&self) -> usize {
        self.node_names.len()
    }

    pub fn add_branch(&mut self, name: impl Into<String>, head: usize, tail: usize, y: T) -> &mut Self {
        self.branches.push(Branch { name: name.into(), head, tail, y });
        self
    }

    pub fn add_current_source(&mut self, name: impl Into<String>, from: usize, to: usize, value: T) -> &mut Self {
        self.current_sources.push(CurrentSource { name: name.into(), from, to, value });
        self
    }

    pub fn branch_index(&self, name: &str) -> Option<usize> {
        self.branches.iter().position(|b| b.name == name)
    }

    pub fn graph(&self) -> MultiGraph {
        let mut g = MultiGraph::new(self.n());
        for (i, b) in self.branches.iter().enumerate() {
            g.push_edge_unchecked(i, b.head, b.tail);
        }
        g
    }

    /// Node injections from the independent current sources.
    pub fn injections(&self) -> Vec<T> {
        let mut i = vec![T::zero(); self.n()];
        for s in &self.current_sources {
            i[s.to - 1] = i[s.to - 1].clone() + s.value.clone();
            i[s.from - 1] = i[s.from - 1].clone() - s.value.clone();
        }
        i
    }

    /// Same network with every branch admittance replaced.
    pub fn map_admittances<U: Scalar>(&self, mut f: impl FnMut(&T) -> U) -> Network<U> {
        let g = |v: &T, f: &mut dyn FnMut(&T) -> U| f(v);
        Network {
            node_names: self.node_names.clone(),
            branches: self
                .branches
                .iter()
                .map(|b| Branch { name: b.name.clone(), head: b.head, tail: b.tail, y: g(&b.y, &mut f) })
                .collect(),
            current_sources: self
                .current_sources
                .iter()
                .map(|s| CurrentSource { name: s.name.clone(), from: s.from, to: s.to, value: g(&s.value, &mut f) })
                .collect(),
            voltage_sources: self
                .voltage_sources
                .iter()
                .map(|s| VoltageSource { name: s.name.clone(), pos: s.pos, neg: s.neg, value: g(&s.value, &mut f) })
                .collect(),
            dependent_sources: Vec::new(),
        }
    }

    /// Removes one branch.
    pub fn delete_branch(&self, index: usize) -> Result<Network<T>> {
        if index >= self.branches.len() {
            return Err(Error::UnknownEdge(index));
        }
        let mut out = self.clone();
        out.branches.remove(index);
        Ok(out)
    }

    /// Identifies nodes `j` and `k`: branches and sources between them vanish,
    /// `k` is removed and indices above `k` shift down by one.
    pub fn contract(&self, j: usize, k: usize) -> Result<Network<T>> {
        let n = self.n();
        for x in [j, k] {
            if x == 0 || x > n {
                return Err(Error::IndexOutOfRange { index: x, size: n });
            }
        }
        if j == k {
            return Err(Error::EqualIndices(j));
        }
        let map = |p: usize| -> usize {
            let p = if p == k { j } else { p };
            reindex_after_removal(k, p).expect("p differs from k")
        };
        let mut names = self.node_names.clone();
        let merged = format!("{}+{}", names[j - 1], names[k - 1]);
        names[j - 1] = merged;
        names.remove(k - 1);
        let joins = |a: usize, b: usize| (a == j && b == k) || (a == k && b == j);
        Ok(Network {
            node_names: names,
            branches: self
                .branches
                .iter()
                .filter(|b| !joins(b.head, b.tail))
                .map(|b| Branch { name: b.name.clone(), head: map(b.head), tail: map(b.tail), y: b.y.clone() })
                .collect(),
            current_sources: self
                .current_sources
                .iter()
                .filter(|s| !joins(s.from, s.to))
                .map(|s| CurrentSource {
                    name: s.name.clone(),
                    from: map(s.from),
                    to: map(s.to),
                    value: s.value.clone(),
                })
                .collect(),
            voltage_sources: self
                .voltage_sources
                .iter()
                .filter(|s| !joins(s.pos, s.neg))
                .map(|s| VoltageSource {
                    name: s.name.clone(),
                    pos: map(s.pos),
                    neg: map(s.neg),
                    value: s.value.clone(),
                })
                .collect(),
            dependent_sources: Vec::new(),
        })
    }

    /// Index of the node that `p` becomes after [`Network::contract`]`(j, k)`.
    pub fn contracted_index(j: usize, k: usize, p: usize) -> usize {
        let p = if p == k { j } else { p };
        reindex_after_removal(k, p).expect("p differs from k")
    }
}
