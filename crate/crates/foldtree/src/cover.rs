//! The κ-fold ribbon graph G_* over a folded ribbon tree.
//!
//! Over each base edge there are κ strands, one per left sheet h_l, with
//! h_r = σ(e)(h_l). At an internal vertex with cyclic order
//! (e_{v,0},…,e_{v,|v|−1}) strands are glued so that sheet labels stay
//! constant along boundary regions:
//! h_l(e_{v,0}) = h_l(e_{v,1}), h_r(e_{v,k}) = h_l(e_{v,k+1}),
//! h_r(e_{v,|v|−1}) = h_r(e_{v,0}). At a marginal leaf the two flipped
//! strands share their endpoint. All κ strands over every edge are kept;
//! the unflipped ones over a marginal leaf end at their own vertices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::trees::{FoldedRibbonTree, Labels, Topology, VertexKind};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LiftedEdge {
    pub base: usize,
    /// Sheet labels, 1-based.
    pub hl: usize,
    pub hr: usize,
    /// Lifted vertices over the base edge's src and dst.
    pub src: usize,
    pub dst: usize,
}

#[derive(Clone, Debug)]
pub struct RibbonGraph {
    pub base: FoldedRibbonTree,
    pub topology: Topology,
    /// Base vertex of each lifted vertex.
    pub vertex_base: Vec<usize>,
    /// Lifted edge `e·κ + (h_l − 1)` lies over base edge e.
    pub edges: Vec<LiftedEdge>,
    /// For each marginal exterior base edge, its two flipped strands.
    pub marginal_pairs: Vec<(usize, [usize; 2])>,
}

/// One step of [`RibbonGraph::strands_through`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrandStep {
    pub lifted_edge: usize,
    pub base: usize,
    pub hl: usize,
    pub hr: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl RibbonGraph {
    pub fn build(t: &FoldedRibbonTree) -> Result<Self, Error> {
        let top = t.topology()?;
        let k = t.kappa;
        let ne = t.edges.len();
        let strand = |e: usize, hl: usize| e * k + (hl - 1);
        let by_hr = |e: usize, hr: usize| strand(e, t.sigma[e].inverse().apply(hr));
        // edge ends: 2·strand for the src end, 2·strand + 1 for the dst end
        let src_end = |s: usize| 2 * s;
        let dst_end = |s: usize| 2 * s + 1;
        let mut uf = UnionFind((0..2 * ne * k).collect());
        for v in t.internal_vertices() {
            let co = &t.cyclic_order[v];
            let end = |e: usize, s: usize| if t.edges[e].src == v { src_end(s) } else { dst_end(s) };
            let last = co.len() - 1;
            for y in 1..=k {
                uf.union(end(co[0], strand(co[0], y)), end(co[1], strand(co[1], y)));
                for i in 1..last {
                    uf.union(end(co[i], by_hr(co[i], y)), end(co[i + 1], strand(co[i + 1], y)));
                }
                uf.union(end(co[last], by_hr(co[last], y)), end(co[0], by_hr(co[0], y)));
            }
        }
        let mut marginal_pairs = Vec::new();
        for (e, ed) in t.edges.iter().enumerate() {
            if t.vertices[ed.src] == VertexKind::Marginal {
                let (a, b) = t.sigma[e]
                    .as_transposition()
                    .ok_or_else(|| Error::InvalidTree(format!("edge {e} is not a transposition")))?;
                uf.union(src_end(strand(e, a)), src_end(strand(e, b)));
                marginal_pairs.push((e, [strand(e, a), strand(e, b)]));
            }
        }
        // number lifted vertices by first appearance
        let mut id = vec![usize::MAX; 2 * ne * k];
        let mut vertex_base = Vec::new();
        let mut edges = Vec::with_capacity(ne * k);
        for e in 0..ne {
            for hl in 1..=k {
                let s = strand(e, hl);
                let mut ends = [0usize; 2];
                for (slot, (x, bv)) in
                    [(src_end(s), t.edges[e].src), (dst_end(s), t.edges[e].dst)].into_iter().enumerate()
                {
                    let r = uf.find(x);
                    if id[r] == usize::MAX {
                        id[r] = vertex_base.len();
                        vertex_base.push(bv);
                    }
                    ends[slot] = id[r];
                }
                edges.push(LiftedEdge { base: e, hl, hr: t.sigma[e].apply(hl), src: ends[0], dst: ends[1] });
            }
        }
        let g = RibbonGraph { base: t.clone(), topology: top, vertex_base, edges, marginal_pairs };
        debug_assert_eq!(g.euler_characteristic(), k as i64 - t.marginal_vertex_count() as i64);
        Ok(g)
    }

    pub fn kappa(&self) -> usize {
        self.base.kappa
    }

    /// Index of the strand over base edge `e` with left sheet `hl`.
    pub fn strand(&self, e: usize, hl: usize) -> usize {
        e * self.kappa() + (hl - 1)
    }

    pub fn labels(&self, lifted: usize) -> Labels {
        self.topology.labels[self.edges[lifted].base]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_base.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edges.len() as i64
    }

    /// Lifted vertices over base vertex `v`, ascending.
    pub fn vertices_over(&self, v: usize) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&x| self.vertex_base[x] == v).collect()
    }

    /// Connected components, as a component index per lifted vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind((0..self.vertex_count()).collect());
        for e in &self.edges {
            uf.union(e.src, e.dst);
        }
        let mut label = vec![usize::MAX; self.vertex_count()];
        let mut next = 0;
        (0..self.vertex_count())
            .map(|v| {
                let r = uf.find(v);
                if label[r] == usize::MAX {
                    label[r] = next;
                    next += 1;
                }
                label[r]
            })
            .collect()
    }

    /// Follows a sheet along a connected base path.
    ///
    /// The walk starts on the strand over `path[0]` with left sheet `sheet`
    /// and crosses into the strand over the next edge that shares its
    /// lifted vertex. Repeating a marginal exterior edge turns around at
    /// the marginal leaf onto the flipped partner strand.
    pub fn strands_through(&self, path: &[usize], sheet: usize) -> Result<Vec<StrandStep>, Error> {
        let k = self.kappa();
        if sheet == 0 || sheet > k {
            return Err(Error::OutOfRange(format!("sheet {sheet} in rank {k}")));
        }
        let Some(&first) = path.first() else {
            return Ok(Vec::new());
        };
        let step = |s: usize| {
            let l = self.edges[s];
            StrandStep { lifted_edge: s, base: l.base, hl: l.hl, hr: l.hr }
        };
        let mut cur = self.strand(first, sheet);
        let mut out = vec![step(cur)];
        for w in path.windows(2) {
            let (e, f) = (self.base.edges[w[0]], self.base.edges[w[1]]);
            let here = self.edges[cur];
            let next = if w[0] == w[1] {
                let (_, pair) = self
                    .marginal_pairs
                    .iter()
                    .find(|(b, _)| *b == w[0])
                    .ok_or_else(|| Error::Malformed(format!("edge {} repeated but not marginal", w[0])))?;
                if !pair.contains(&cur) {
                    return Err(Error::Malformed(format!("sheet {} ends at a spur over edge {}", here.hl, w[0])));
                }
                if pair[0] == cur { pair[1] } else { pair[0] }
            } else {
                let shared = [e.src, e.dst]
                    .into_iter()
                    .find(|&v| v == f.src || v == f.dst)
                    .ok_or_else(|| Error::Malformed(format!("edges {} and {} do not meet", w[0], w[1])))?;
                let at = if e.src == shared { here.src } else { here.dst };
                (0..k)
                    .map(|h| w[1] * k + h)
                    .find(|&s| {
                        let l = self.edges[s];
                        (if f.src == shared { l.src } else { l.dst }) == at
                    })
                    .expect("lifted vertices over internal vertices meet every incident edge once")
            };
            cur = next;
            out.push(step(cur));
        }
        Ok(out)
    }

    /// Re-checks the defining invariants; returns a description of the
    /// first failure.
    pub fn check_invariants(&self) -> Result<(), Error> {
        let t = &self.base;
        let k = t.kappa;
        for e in 0..t.edges.len() {
            let mut seen_l = vec![false; k + 1];
            let mut seen_r = vec![false; k + 1];
            for s in e * k..(e + 1) * k {
                let l = self.edges[s];
                if l.base != e || seen_l[l.hl] || seen_r[l.hr] || l.hr != t.sigma[e].apply(l.hl) {
                    return Err(Error::Malformed(format!("sheet labels over edge {e}")));
                }
                seen_l[l.hl] = true;
                seen_r[l.hr] = true;
                if self.vertex_base[l.src] != t.edges[e].src || self.vertex_base[l.dst] != t.edges[e].dst {
                    return Err(Error::Malformed(format!("projection of strand {s}")));
                }
            }
        }
        for (e, [a, b]) in &self.marginal_pairs {
            if self.edges[*a].src != self.edges[*b].src {
                return Err(Error::Malformed(format!("flipped strands over {e} do not share a start")));
            }
        }
        // no branching over exterior stem edges: distinct ends per strand
        for v in &t.stem_labels {
            let over = self.vertices_over(*v);
            if over.len() != k {
                return Err(Error::Malformed(format!("{} lifts of stem vertex {v}", over.len())));
            }
        }
        let chi = k as i64 - t.marginal_vertex_count() as i64;
        if self.euler_characteristic() != chi {
            return Err(Error::Malformed(format!("chi = {}, expected {chi}", self.euler_characteristic())));
        }
        Ok(())
    }
}

/// χ(G) for the cover of `t`.
pub fn euler_characteristic(g: &RibbonGraph) -> i64 {
    g.euler_characteristic()
}

pub fn build_cover(t: &FoldedRibbonTree) -> Result<RibbonGraph, Error> {
    RibbonGraph::build(t)
}
