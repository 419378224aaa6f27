use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::tree::{EdgeClass, FoldedRibbonTree, Labels, Topology, VertexKind};
use crate::algebra::Permutation;
use crate::Error;

/// The clause of the tree definition that a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    Shape,
    NotATree,
    Degree,
    Root,
    Orientation,
    CyclicOrder,
    StemLabels,
    Rank,
    VertexRelation,
    MarginalTransposition,
    MarginalIdentity,
    Lengths,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub clause: Clause,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn cites(&self, clause: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }

    fn push(&mut self, clause: Clause, detail: String) {
        self.violations.push(Violation { clause, detail });
    }
}

pub(super) fn validate(t: &FoldedRibbonTree) -> ValidationReport {
    let mut rep = ValidationReport::default();
    if let Some(top) = structure(t, &mut rep) {
        decorations(t, &top, &mut rep);
    }
    rep
}

pub(super) fn analyze(t: &FoldedRibbonTree) -> Result<Topology, Error> {
    let mut rep = ValidationReport::default();
    let top = structure(t, &mut rep);
    if let Some(top) = &top {
        decorations(t, top, &mut rep);
    }
    match (top, rep.violations.first()) {
        (Some(top), None) => Ok(top),
        (_, Some(v)) => Err(Error::InvalidTree(format!("{:?}: {}", v.clause, v.detail))),
        (None, None) => unreachable!("structure failed without a violation"),
    }
}

/// Graph-level checks; returns the derived topology when they all pass.
fn structure(t: &FoldedRibbonTree, rep: &mut ValidationReport) -> Option<Topology> {
    let nv = t.vertices.len();
    let ne = t.edges.len();
    if t.kappa == 0 {
        rep.push(Clause::Rank, "kappa must be at least 1".into());
    }
    if t.sigma.len() != ne || t.cyclic_order.len() != nv {
        rep.push(Clause::Shape, format!("{ne} edges, {} sigmas, {nv} vertices, {} cyclic orders", t.sigma.len(), t.cyclic_order.len()));
        return None;
    }
    for (e, s) in t.sigma.iter().enumerate() {
        if s.rank() != t.kappa {
            rep.push(Clause::Rank, format!("edge {e} carries rank {}", s.rank()));
        }
    }
    if nv == 0 || ne + 1 != nv {
        rep.push(Clause::NotATree, format!("{nv} vertices and {ne} edges"));
        return None;
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (e, ed) in t.edges.iter().enumerate() {
        if ed.src >= nv || ed.dst >= nv || ed.src == ed.dst {
            rep.push(Clause::NotATree, format!("edge {e} has endpoints {}->{}", ed.src, ed.dst));
            return None;
        }
        incident[ed.src].push(e);
        incident[ed.dst].push(e);
    }
    for v in 0..nv {
        let d = incident[v].len();
        match t.vertices[v] {
            VertexKind::Internal if d < 3 => {
                rep.push(Clause::Degree, format!("internal vertex {v} has degree {d}"))
            }
            k if k.is_exterior() && d != 1 => {
                rep.push(Clause::Degree, format!("exterior vertex {v} has degree {d}"))
            }
            _ => {}
        }
    }
    // stem labels list exactly the stem vertices, v₀ first
    let stems: Vec<usize> = (0..nv).filter(|&v| t.vertices[v] == VertexKind::Stem).collect();
    let mut sorted = t.stem_labels.clone();
    sorted.sort_unstable();
    if sorted != stems || t.stem_labels.len() < 2 {
        rep.push(Clause::StemLabels, format!("stem labels {:?} vs stem vertices {stems:?}", t.stem_labels));
        return None;
    }
    if !rep.violations.is_empty() {
        return None;
    }
    let v0 = t.stem_labels[0];
    let e0 = incident[v0][0];
    if t.edges[e0].dst != v0 {
        rep.push(Clause::Root, format!("edge {e0} at v0 must point into v0"));
        return None;
    }
    // orient outward from v₀ and check that every edge points back
    let mut parent_edge: Vec<Option<usize>> = vec![None; nv];
    let mut seen = vec![false; nv];
    let mut order = vec![v0];
    seen[v0] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for &e in &incident[v] {
            let ed = t.edges[e];
            let w = if ed.src == v { ed.dst } else { ed.src };
            if seen[w] {
                continue;
            }
            seen[w] = true;
            if ed.src != w {
                rep.push(Clause::Orientation, format!("edge {e} points away from v0"));
            }
            parent_edge[w] = Some(e);
            order.push(w);
        }
    }
    if order.len() != nv {
        rep.push(Clause::NotATree, "graph is disconnected".into());
        return None;
    }
    // cyclic orders
    for v in 0..nv {
        let co = &t.cyclic_order[v];
        if t.vertices[v].is_exterior() {
            if !co.is_empty() {
                rep.push(Clause::CyclicOrder, format!("exterior vertex {v} has a cyclic order"));
            }
            continue;
        }
        let mut a = co.clone();
        a.sort_unstable();
        let mut b = incident[v].clone();
        b.sort_unstable();
        if a != b {
            rep.push(Clause::CyclicOrder, format!("vertex {v}: {co:?} is not its edge set {b:?}"));
        } else if Some(co[0]) != parent_edge[v] {
            rep.push(Clause::CyclicOrder, format!("vertex {v}: first edge {} is not outgoing", co[0]));
        }
    }
    if !rep.violations.is_empty() {
        return None;
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for v in 0..nv {
        if t.vertices[v] == VertexKind::Internal {
            children[v] = t.cyclic_order[v][1..].iter().rev().copied().collect();
        }
    }
    let mut preorder = Vec::with_capacity(ne);
    let mut stack = vec![e0];
    while let Some(e) = stack.pop() {
        preorder.push(e);
        stack.extend(children[t.edges[e].src].iter().rev());
    }
    // stem edges lie above some stem leaf
    let mut stem_below = vec![false; nv];
    for &e in preorder.iter().rev() {
        let s = t.edges[e].src;
        stem_below[s] = t.vertices[s] == VertexKind::Stem
            || children[s].iter().any(|&c| stem_below[t.edges[c].src]);
    }
    let class: Vec<EdgeClass> = t
        .edges
        .iter()
        .enumerate()
        .map(|(e, ed)| match (t.vertices[ed.src], e == e0) {
            (_, true) | (VertexKind::Stem, _) => EdgeClass::ExteriorStem,
            (VertexKind::Marginal, _) => EdgeClass::ExteriorMarginal,
            _ if stem_below[ed.src] => EdgeClass::InnerStem,
            _ => EdgeClass::InnerMarginal,
        })
        .collect();
    // boundary walk
    let mut labels = vec![Labels { il: usize::MAX, ir: usize::MAX }; ne];
    let mut walk_leaves = Vec::new();
    let stem_index: BTreeMap<usize, usize> =
        t.stem_labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut region = 0;
    let mut walk_stems = Vec::new();
    // (edge, outward?) ; start by leaving v₀ along e₀
    let (mut e, mut outward) = (e0, true);
    loop {
        let ed = t.edges[e];
        let at = if outward {
            labels[e].ir = region;
            ed.src
        } else {
            labels[e].il = region;
            ed.dst
        };
        if at == v0 {
            break;
        }
        if t.vertices[at].is_exterior() {
            walk_leaves.push(at);
            if t.vertices[at] == VertexKind::Stem {
                region = stem_index[&at];
                walk_stems.push(at);
            }
            outward = false;
            continue;
        }
        let co = &t.cyclic_order[at];
        let k = co.iter().position(|&x| x == e).unwrap();
        e = co[(k + co.len() - 1) % co.len()];
        outward = t.edges[e].dst == at;
    }
    if walk_stems[..] != t.stem_labels[1..] {
        rep.push(
            Clause::StemLabels,
            format!("boundary walk meets stems {walk_stems:?}, labels say {:?}", &t.stem_labels[1..]),
        );
        return None;
    }
    Some(Topology { parent_edge, children, class, labels, e0, preorder, walk_leaves, stem_index })
}

fn decorations(t: &FoldedRibbonTree, top: &Topology, rep: &mut ValidationReport) {
    if t.sigma.iter().any(|s| s.rank() != t.kappa) {
        return;
    }
    for v in t.internal_vertices() {
        let co = &t.cyclic_order[v];
        let mut prod = Permutation::identity(t.kappa);
        for &e in co[1..].iter().rev() {
            prod = prod.compose(&t.sigma[e]).unwrap();
        }
        if prod != t.sigma[co[0]] {
            rep.push(
                Clause::VertexRelation,
                format!("vertex {v}: sigma of outgoing edge {} is {}, product of incoming is {prod}", co[0], t.sigma[co[0]]),
            );
        }
    }
    for (e, c) in top.class.iter().enumerate() {
        match c {
            EdgeClass::ExteriorMarginal if t.sigma[e].as_transposition().is_none() => rep.push(
                Clause::MarginalTransposition,
                format!("marginal exterior edge {e} carries {}, not a transposition", t.sigma[e]),
            ),
            EdgeClass::InnerMarginal if t.sigma[e].is_identity() => {
                rep.push(Clause::MarginalIdentity, format!("marginal edge {e} carries the identity"))
            }
            _ => {}
        }
    }
    if !t.lengths.is_empty() {
        for (e, c) in top.class.iter().enumerate() {
            match (c.has_length(), t.lengths.get(&e)) {
                (true, None) => rep.push(Clause::Lengths, format!("finite edge {e} has no length")),
                (false, Some(_)) => {
                    rep.push(Clause::Lengths, format!("semi-infinite edge {e} has a length"))
                }
                (true, Some(&l)) if !(l >= 0.0 && l.is_finite()) => {
                    rep.push(Clause::Lengths, format!("edge {e} has length {l}"))
                }
                _ => {}
            }
        }
        if let Some((&e, _)) = t.lengths.range(t.edges.len()..).next() {
            rep.push(Clause::Lengths, format!("length given for missing edge {e}"));
        }
    }
}
