use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::validate::{self, ValidationReport};
use crate::algebra::Permutation;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexKind {
    Stem,
    Marginal,
    Internal,
}

impl VertexKind {
    pub fn is_exterior(self) -> bool {
        self != VertexKind::Internal
    }
}

/// A directed edge; every edge points toward v₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    /// Semi-infinite edge at a stem leaf (including e₀).
    ExteriorStem,
    InnerStem,
    InnerMarginal,
    /// Edge ending at a marginal leaf.
    ExteriorMarginal,
}

impl EdgeClass {
    pub fn is_stem(self) -> bool {
        matches!(self, EdgeClass::ExteriorStem | EdgeClass::InnerStem)
    }

    /// Whether the edge carries a finite length.
    pub fn has_length(self) -> bool {
        self != EdgeClass::ExteriorStem
    }
}

/// A folded ribbon tree (T, σ, l).
#[derive(Clone, Debug)]
pub struct FoldedRibbonTree {
    pub kappa: usize,
    pub vertices: Vec<VertexKind>,
    pub edges: Vec<Edge>,
    /// Per vertex; empty for exterior vertices.
    pub cyclic_order: Vec<Vec<usize>>,
    pub sigma: Vec<Permutation>,
    /// Finite lengths, keyed by edge. Either empty or exactly the inner and
    /// marginal edges.
    pub lengths: BTreeMap<usize, f64>,
    /// v₀, v₁, …, v_m.
    pub stem_labels: Vec<usize>,
}

/// Lengths do not take part in tree identity.
impl PartialEq for FoldedRibbonTree {
    fn eq(&self, o: &Self) -> bool {
        self.kappa == o.kappa
            && self.vertices == o.vertices
            && self.edges == o.edges
            && self.cyclic_order == o.cyclic_order
            && self.sigma == o.sigma
            && self.stem_labels == o.stem_labels
    }
}

impl Eq for FoldedRibbonTree {}

/// Region labels (i_l, i_r) of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Labels {
    pub il: usize,
    pub ir: usize,
}

/// Derived structure of a valid tree.
#[derive(Clone, Debug)]
pub struct Topology {
    /// Outgoing edge of each vertex; `None` for v₀.
    pub parent_edge: Vec<Option<usize>>,
    /// Incoming edges of each vertex in boundary-walk order.
    pub children: Vec<Vec<usize>>,
    pub class: Vec<EdgeClass>,
    pub labels: Vec<Labels>,
    /// The root edge e₀.
    pub e0: usize,
    /// Edges ordered outward from e₀ (parents before children).
    pub preorder: Vec<usize>,
    /// Leaves other than v₀ in boundary-walk order.
    pub walk_leaves: Vec<usize>,
    /// Index of each stem vertex in `stem_labels`.
    pub stem_index: BTreeMap<usize, usize>,
}

impl Topology {
    pub fn m(&self) -> usize {
        self.stem_index.len() - 1
    }

    pub fn marginal_leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.walk_leaves.iter().copied().filter(|v| !self.stem_index.contains_key(v))
    }

    /// Path from `v` up to v₀, as edges.
    fn root_path(&self, tree: &FoldedRibbonTree, mut v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(e) = self.parent_edge[v] {
            out.push(e);
            v = tree.edges[e].dst;
        }
        out
    }
}

impl FoldedRibbonTree {
    pub fn validate(&self) -> ValidationReport {
        validate::validate(self)
    }

    /// Validates and returns the derived structure.
    pub fn topology(&self) -> Result<Topology, Error> {
        validate::analyze(self)
    }

    pub fn v0(&self) -> usize {
        self.stem_labels[0]
    }

    pub fn m(&self) -> usize {
        self.stem_labels.len() - 1
    }

    pub fn marginal_vertex_count(&self) -> usize {
        self.vertices.iter().filter(|&&k| k == VertexKind::Marginal).count()
    }

    pub fn internal_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&v| self.vertices[v] == VertexKind::Internal)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.src == v || e.dst == v).count()
    }

    /// Σ (deg v − 3) over internal vertices.
    pub fn excess(&self) -> usize {
        self.internal_vertices().map(|v| self.degree(v) - 3).sum()
    }

    pub fn boundary_labels(&self) -> Result<Vec<Labels>, Error> {
        Ok(self.topology()?.labels)
    }

    /// Edges on the unique path from `a` to `b`.
    pub fn path_edges(&self, a: usize, b: usize) -> Result<Vec<usize>, Error> {
        let top = self.topology()?;
        let pa = top.root_path(self, a);
        let pb = top.root_path(self, b);
        let common = pa.iter().rev().zip(pb.iter().rev()).take_while(|(x, y)| x == y).count();
        let mut out: Vec<usize> = pa[..pa.len() - common].to_vec();
        out.extend(pb[..pb.len() - common].iter().rev());
        Ok(out)
    }

    /// a ⪯ b iff vertex a lies on the path from b to v₀.
    pub fn vertex_leq(&self, a: usize, b: usize) -> Result<bool, Error> {
        let top = self.topology()?;
        let mut v = b;
        loop {
            if v == a {
                return Ok(true);
            }
            match top.parent_edge[v] {
                Some(e) => v = self.edges[e].dst,
                None => return Ok(false),
            }
        }
    }

    /// e ⪯ f iff edge e lies on the path from f to e₀.
    pub fn edge_leq(&self, e: usize, f: usize) -> Result<bool, Error> {
        let top = self.topology()?;
        Ok(e == f || top.root_path(self, self.edges[f].dst).contains(&e))
    }

    /// Sets every finite length to `l`.
    pub fn with_default_lengths(mut self, l: f64) -> Result<Self, Error> {
        let top = self.topology()?;
        self.lengths =
            (0..self.edges.len()).filter(|&e| top.class[e].has_length()).map(|e| (e, l)).collect();
        Ok(self)
    }
}
