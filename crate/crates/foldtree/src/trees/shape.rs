use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::tree::{Edge, FoldedRibbonTree, VertexKind};
use crate::algebra::Permutation;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LeafKind {
    Stem,
    Marginal,
}

/// A planted plane tree above the root edge e₀. Children are listed in
/// boundary-walk order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Leaf(LeafKind),
    Node(Vec<Shape>),
}

impl Shape {
    pub fn stem() -> Self {
        Shape::Leaf(LeafKind::Stem)
    }

    pub fn marginal() -> Self {
        Shape::Leaf(LeafKind::Marginal)
    }

    pub fn node(children: Vec<Shape>) -> Self {
        Shape::Node(children)
    }

    /// The Y-tree with m stem leaves on one internal vertex.
    pub fn corolla(m: usize) -> Self {
        Shape::Node(vec![Shape::stem(); m])
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Shape::Leaf(_) => 1,
            Shape::Node(c) => c.iter().map(Shape::leaf_count).sum(),
        }
    }

    pub fn internal_count(&self) -> usize {
        match self {
            Shape::Leaf(_) => 0,
            Shape::Node(c) => 1 + c.iter().map(Shape::internal_count).sum::<usize>(),
        }
    }

    /// Leaf kinds in walk order.
    pub fn leaves(&self) -> Vec<LeafKind> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<LeafKind>) {
        match self {
            Shape::Leaf(k) => out.push(*k),
            Shape::Node(c) => c.iter().for_each(|s| s.collect_leaves(out)),
        }
    }

    /// Builds the decorated tree. `leaf_sigma` gives σ for the exterior edge
    /// of each leaf in walk order; the remaining decorations follow from
    /// the vertex rule.
    ///
    /// Vertices are numbered in preorder with v₀ = 0, and edge k is the
    /// outgoing edge of vertex k+1.
    pub fn build(&self, kappa: usize, leaf_sigma: &[Permutation]) -> Result<FoldedRibbonTree, Error> {
        if leaf_sigma.len() != self.leaf_count() {
            return Err(Error::InvalidTree(alloc::format!(
                "{} leaf decorations for {} leaves",
                leaf_sigma.len(),
                self.leaf_count()
            )));
        }
        let mut b = Builder {
            kappa,
            vertices: vec![VertexKind::Stem],
            edges: Vec::new(),
            cyclic_order: vec![Vec::new()],
            sigma: Vec::new(),
            stems: vec![0],
            leaf_sigma,
            next_leaf: 0,
        };
        b.visit(self, 0)?;
        Ok(FoldedRibbonTree {
            kappa,
            vertices: b.vertices,
            edges: b.edges,
            cyclic_order: b.cyclic_order,
            sigma: b.sigma,
            lengths: BTreeMap::new(),
            stem_labels: b.stems,
        })
    }
}

struct Builder<'a> {
    kappa: usize,
    vertices: Vec<VertexKind>,
    edges: Vec<Edge>,
    cyclic_order: Vec<Vec<usize>>,
    sigma: Vec<Permutation>,
    stems: Vec<usize>,
    leaf_sigma: &'a [Permutation],
    next_leaf: usize,
}

impl Builder<'_> {
    /// Adds the subtree `s` hanging below `parent`; returns its edge.
    fn visit(&mut self, s: &Shape, parent: usize) -> Result<usize, Error> {
        let v = self.vertices.len();
        let e = self.edges.len();
        self.edges.push(Edge { src: v, dst: parent });
        self.sigma.push(Permutation::identity(self.kappa));
        self.cyclic_order.push(Vec::new());
        match s {
            Shape::Leaf(k) => {
                self.vertices.push(match k {
                    LeafKind::Stem => VertexKind::Stem,
                    LeafKind::Marginal => VertexKind::Marginal,
                });
                if *k == LeafKind::Stem {
                    self.stems.push(v);
                }
                let p = &self.leaf_sigma[self.next_leaf];
                if p.rank() != self.kappa {
                    return Err(Error::RankMismatch(self.kappa, p.rank()));
                }
                self.sigma[e] = p.clone();
                self.next_leaf += 1;
            }
            Shape::Node(children) => {
                self.vertices.push(VertexKind::Internal);
                let mut kids = Vec::with_capacity(children.len());
                let mut prod = Permutation::identity(self.kappa);
                for c in children {
                    let ce = self.visit(c, v)?;
                    prod = prod.compose(&self.sigma[ce])?;
                    kids.push(ce);
                }
                self.sigma[e] = prod;
                let mut co = vec![e];
                co.extend(kids.iter().rev());
                self.cyclic_order[v] = co;
            }
        }
        Ok(e)
    }
}
