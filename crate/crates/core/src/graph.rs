//! The directed multigraph underlying a network.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::{reindex_after_removal, Matrix};
use crate::scalar::Scalar;

/// Largest edge count accepted by the enumerators.
pub const ENUMERATION_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: usize,
    /// 1-based endpoints; the edge points from `from` into `to`.
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<Edge>,
}

pub type TreePair = (Vec<usize>, Vec<usize>);

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..=n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph { n, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, id: usize, from: usize, to: usize) -> Result<()> {
        for x in [from, to] {
            if x == 0 || x > self.n {
                return Err(Error::IndexOutOfRange { index: x, size: self.n });
            }
        }
        if from == to {
            return Err(Error::SelfLoop(format!("edge {id}")));
        }
        if self.edges.iter().any(|e| e.id == id) {
            return Err(Error::IndexConflict(format!("edge id {id} already present")));
        }
        self.edges.push(Edge { id, from, to });
        Ok(())
    }

    /// Used when building from a validated network; self-loops are dropped.
    pub(crate) fn push_edge_unchecked(&mut self, id: usize, from: usize, to: usize) {
        if from != to {
            self.edges.push(Edge { id, from, to });
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// `G[j][e]` is +1 if edge `e` points into node `j`, −1 if out of it.
    pub fn incidence<T: Scalar>(&self) -> Matrix<T> {
        let mut g = Matrix::zeros(self.n, self.edges.len());
        for (c, e) in self.edges.iter().enumerate() {
            g[(e.to - 1, c)] = T::one();
            g[(e.from - 1, c)] = -T::one();
        }
        g
    }

    /// Connected components (sorted node lists, ordered by smallest member)
    /// after ignoring the listed edge ids.
    pub fn components(&self, ignore: &[usize]) -> Vec<Vec<usize>> {
        let mut ds = DisjointSets::new(self.n);
        for e in &self.edges {
            if !ignore.contains(&e.id) {
                ds.union(e.from, e.to);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut root_of: Vec<Option<usize>> = vec![None; self.n + 1];
        for v in 1..=self.n {
            let r = ds.find(v);
            match root_of[r] {
                Some(g) => groups[g].push(v),
                None => {
                    root_of[r] = Some(groups.len());
                    groups.push(vec![v]);
                }
            }
        }
        groups
    }

    /// Components of the graph with the listed nodes and their edges removed.
    pub fn components_without_nodes(&self, removed: &[usize]) -> Vec<Vec<usize>> {
        let incident: Vec<usize> =
            self.edges.iter().filter(|e| removed.contains(&e.from) || removed.contains(&e.to)).map(|e| e.id).collect();
        let mut comps = self.components(&incident);
        comps.retain(|c| !(c.len() == 1 && removed.contains(&c[0])));
        comps
    }

    pub fn is_connected(&self, ignore: &[usize]) -> bool {
        self.components(ignore).len() <= 1
    }

    pub fn delete_edge(&self, id: usize) -> Result<MultiGraph> {
        let pos = self.edges.iter().position(|e| e.id == id).ok_or(Error::UnknownEdge(id))?;
        let mut g = self.clone();
        g.edges.remove(pos);
        Ok(g)
    }

    /// Identifies `j` and `k`: edges joining them vanish, `k` is removed and
    /// higher indices shift down by one.
    pub fn contract_nodes(&self, j: usize, k: usize) -> Result<MultiGraph> {
        for x in [j, k] {
            if x == 0 || x > self.n {
                return Err(Error::IndexOutOfRange { index: x, size: self.n });
            }
        }
        if j == k {
            return Err(Error::EqualIndices(j));
        }
        let map = |p: usize| {
            let p = if p == k { j } else { p };
            reindex_after_removal(k, p).expect("p differs from k")
        };
        let edges = self
            .edges
            .iter()
            .filter(|e| !((e.from == j && e.to == k) || (e.from == k && e.to == j)))
            .map(|e| Edge { id: e.id, from: map(e.from), to: map(e.to) })
            .collect();
        Ok(MultiGraph { n: self.n - 1, edges })
    }

    fn guard(&self) -> Result<()> {
        if self.edges.len() > ENUMERATION_LIMIT {
            return Err(Error::TooLarge { what: "tree enumeration", size: self.edges.len(), limit: ENUMERATION_LIMIT });
        }
        Ok(())
    }

    /// All spanning trees as sorted edge-id lists, in lexicographic order.
    pub fn spanning_trees(&self) -> Result<Vec<Vec<usize>>> {
        self.guard()?;
        let mut out = Vec::new();
        if self.n == 0 {
            return Ok(out);
        }
        if !self.is_connected(&[]) {
            return Ok(out);
        }
        let mut edges: Vec<Edge> = self.edges.clone();
        edges.sort_by_key(|e| e.id);
        let active: BTreeSet<usize> = (1..=self.n).collect();
        enumerate_trees(&edges, &active, &mut Vec::new(), &mut out);
        for t in &mut out {
            t.sort_unstable();
        }
        out.sort();
        Ok(out)
    }

    /// Pairs of disjoint trees, one holding `j` and one holding `k`, that
    /// together span every node.
    pub fn tree_pairs(&self, j: usize, k: usize) -> Result<Vec<TreePair>> {
        self.guard()?;
        let contracted = self.contract_nodes(j, k)?;
        let mut pairs = Vec::new();
        for tree in contracted.spanning_trees()? {
            let mut ds = DisjointSets::new(self.n);
            for id in &tree {
                let e = self.edge(*id).expect("edge survives contraction");
                ds.union(e.from, e.to);
            }
            let rj = ds.find(j);
            let (mut tj, mut tk) = (Vec::new(), Vec::new());
            for id in tree {
                let e = self.edge(id).expect("edge survives contraction");
                if ds.find(e.from) == rj {
                    tj.push(id);
                } else {
                    tk.push(id);
                }
            }
            pairs.push((tj, tk));
        }
        pairs.sort();
        Ok(pairs)
    }
}

fn connected_without(edges: &[Edge], active: &BTreeSet<usize>, skip: usize) -> bool {
    let max = active.iter().next_back().copied().unwrap_or(0);
    let mut ds = DisjointSets::new(max);
    let mut merges = 0;
    for (i, e) in edges.iter().enumerate() {
        if i != skip && ds.union(e.from, e.to) {
            merges += 1;
        }
    }
    merges + 1 == active.len()
}

/// Include-or-exclude recursion on the smallest remaining edge. Excluding a
/// bridge would disconnect the graph, so that branch is skipped.
fn enumerate_trees(edges: &[Edge], active: &BTreeSet<usize>, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if active.len() == 1 {
        out.push(chosen.clone());
        return;
    }
    let Some(first) = edges.first().copied() else {
        return;
    };
    let rest = &edges[1..];

    // Include: merge `to` into `from`, dropping edges that become loops.
    let (keep, gone) = (first.from.min(first.to), first.from.max(first.to));
    let merged: Vec<Edge> = rest
        .iter()
        .map(|e| Edge {
            id: e.id,
            from: if e.from == gone { keep } else { e.from },
            to: if e.to == gone { keep } else { e.to },
        })
        .filter(|e| e.from != e.to)
        .collect();
    let mut smaller = active.clone();
    smaller.remove(&gone);
    chosen.push(first.id);
    enumerate_trees(&merged, &smaller, chosen, out);
    chosen.pop();

    // Exclude, unless the edge is a bridge.
    if connected_without(edges, active, 0) {
        enumerate_trees(rest, active, chosen, out);
    }
}
