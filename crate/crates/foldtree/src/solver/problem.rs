use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::flow::flow_jet;
use super::linalg::Mat;
use crate::cover::RibbonGraph;
use crate::geom::{M2, V2};
use crate::morse::{Chain, Generator, GradientField, MetricConfig, SheetRef};
use crate::trees::EdgeClass;
use crate::Error;

/// Solver tolerances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Newton stops once the residual norm falls below this.
    pub newton: f64,
    /// Accepted solutions have residual norm at most this.
    pub residual: f64,
    /// Solutions closer than this (in unknowns) are identified; lengths at
    /// most this count as boundary strata.
    pub dedup: f64,
}

impl Tolerances {
    pub fn for_radius(r: f64) -> Self {
        Tolerances { newton: 1e-13, residual: 1e-10, dedup: 1e-6 * r }
    }
}

/// A flow-tree boundary value problem on one decorated tree.
#[derive(Clone, Debug)]
pub struct FlowTreeProblem<'a> {
    pub graph: RibbonGraph,
    pub chain: &'a Chain,
    pub metric: MetricConfig,
    /// q₁, …, q_m.
    pub inputs: Vec<Generator>,
    /// q₀.
    pub output: Generator,
    /// Truncation length for semi-infinite edges with non-affine fields.
    pub truncation: f64,
    pub tol: Tolerances,
    pub layout: Layout,
}

/// A boundary or matching condition contributing residual rows.
#[derive(Clone, Debug)]
enum Condition {
    /// Components of (x − target) along `dirs`, at the seed of a root strand.
    Output { sheet: usize, target: V2, dirs: Vec<V2> },
    /// Components of (x − target) along `dirs` where the input strand
    /// starts; `flow` is set when the condition is imposed after the
    /// truncated flow.
    Input { strand: usize, target: V2, dirs: Vec<V2>, flow: bool },
    /// The two flipped strands over a marginal leaf end at the same point.
    Diagonal { a: usize, b: usize },
}

/// Unknown and residual bookkeeping for a problem.
#[derive(Clone, Debug)]
pub struct Layout {
    pub kappa: usize,
    /// Base edges with a finite length, in preorder.
    pub length_edges: Vec<usize>,
    /// For output sheet j, the strand over e₀ with h_r = j.
    pub root_strands: Vec<usize>,
    /// Position in the unknowns of each base edge's length.
    length_slot: Vec<Option<usize>>,
    conditions: Vec<Condition>,
    pub equations: usize,
    /// 1 for the single-edge tree, whose solutions come in ℝ-families.
    pub translation: usize,
}

impl Layout {
    pub fn unknowns(&self) -> usize {
        2 * self.kappa + self.length_edges.len()
    }

    pub fn length_index(&self, e: usize) -> Option<usize> {
        self.length_slot.get(e).copied().flatten()
    }

    /// Expected dimension of the solution set on this stratum.
    pub fn expected_dimension(&self) -> i64 {
        self.unknowns() as i64 - self.equations as i64 - self.translation as i64
    }
}

/// Positions and their derivatives in the unknowns, row-major per node.
struct Nodes {
    x: Vec<V2>,
    d: Vec<V2>,
    known: Vec<bool>,
    /// Node holding the far end of each strand over an exterior edge.
    tip: Vec<usize>,
    ends: Vec<(V2, Option<V2>)>,
}

/// Result of one evaluation of the shooting map.
#[derive(Clone, Debug)]
pub struct Shot {
    pub residual: Vec<f64>,
    pub jacobian: Mat,
    /// Position of every lifted vertex over an internal or root vertex,
    /// `None` elsewhere.
    pub vertex_positions: Vec<Option<V2>>,
    /// Start (toward v₀) and end points of each strand; `None` for the
    /// semi-infinite end of a stem exterior strand.
    pub strand_ends: Vec<(V2, Option<V2>)>,
}

fn codim_dirs(j: M2, keep_positive: bool) -> Result<Vec<V2>, Error> {
    let [(l0, v0), (l1, v1)] = j.sym_eigen();
    let scale = l0.abs().max(l1.abs()).max(1.0);
    let mut out = Vec::new();
    for (l, v) in [(l0, v0), (l1, v1)] {
        if l.abs() < 1e-12 * scale {
            return Err(Error::Malformed("degenerate generator for a stem condition".into()));
        }
        if (l > 0.0) == keep_positive {
            out.push(v);
        }
    }
    Ok(out)
}

impl<'a> FlowTreeProblem<'a> {
    pub fn new(
        graph: RibbonGraph,
        chain: &'a Chain,
        metric: MetricConfig,
        inputs: Vec<Generator>,
        output: Generator,
    ) -> Result<Self, Error> {
        let t = &graph.base;
        let top = &graph.topology;
        let m = t.m();
        let k = t.kappa;
        if inputs.len() != m {
            return Err(Error::Malformed(format!("{} inputs for m = {m}", inputs.len())));
        }
        if chain.kappa != k {
            return Err(Error::RankMismatch(chain.kappa, k));
        }
        for (i, q) in inputs.iter().enumerate() {
            if (q.src, q.dst) != (i, i + 1) {
                return Err(Error::Malformed(format!("input {} lies in hom({}, {})", i + 1, q.src, q.dst)));
            }
            let e = top.parent_edge[t.stem_labels[i + 1]].unwrap();
            if t.sigma[e] != q.perm.inverse() {
                return Err(Error::Malformed(format!("stem edge {e} is not decorated by input {}", i + 1)));
            }
        }
        if (output.src, output.dst) != (0, m) {
            return Err(Error::Malformed(format!("output lies in hom({}, {})", output.src, output.dst)));
        }
        if t.sigma[top.e0] != output.perm.inverse() {
            return Err(Error::Malformed("root edge is not decorated by the output".into()));
        }
        let mut p = FlowTreeProblem {
            graph,
            chain,
            metric,
            inputs,
            output,
            truncation: 0.0,
            tol: Tolerances::for_radius(chain.radius),
            layout: Layout {
                kappa: k,
                length_edges: Vec::new(),
                root_strands: Vec::new(),
                length_slot: Vec::new(),
                conditions: Vec::new(),
                equations: 0,
                translation: 0,
            },
        };
        p.truncation = p.default_truncation();
        p.layout = p.build_layout()?;
        Ok(p)
    }

    /// L with e^{−cL}·2R below a tenth of the residual tolerance, c the
    /// slowest cross-tuple contraction rate.
    fn default_truncation(&self) -> f64 {
        let objs = &self.chain.objects;
        let mut c = f64::INFINITY;
        for i in 0..objs.len() {
            for j in i + 1..objs.len() {
                c = c.min(2.0 * (objs[i].quad - objs[j].quad).abs());
            }
        }
        let c = if c.is_finite() && c > 0.0 { c } else { 1.0 };
        libm::log(2.0 * self.chain.radius * 10.0 / self.tol.residual) / c
    }

    /// Outward field of a strand: ∇(f_{i_l,h_l} − f_{i_r,h_r}).
    pub fn strand_field(&self, s: usize) -> GradientField<'a> {
        let l = self.graph.edges[s];
        let lab = self.graph.topology.labels[l.base];
        let metric = match self.graph.topology.class[l.base] {
            EdgeClass::ExteriorStem => None,
            _ => self.metric.on_edge(l.base),
        };
        GradientField::new(
            self.chain,
            SheetRef { object: lab.il, sheet: l.hl },
            SheetRef { object: lab.ir, sheet: l.hr },
            metric,
        )
    }

    fn build_layout(&self) -> Result<Layout, Error> {
        let g = &self.graph;
        let t = &g.base;
        let top = &g.topology;
        let k = t.kappa;
        let length_edges: Vec<usize> =
            top.preorder.iter().copied().filter(|&e| top.class[e].has_length()).collect();
        let root_strands: Vec<usize> = (1..=k)
            .map(|j| g.strand(top.e0, t.sigma[top.e0].inverse().apply(j)))
            .collect();
        let mut conditions = Vec::new();
        for (j, &s) in root_strands.iter().enumerate() {
            let target = self.output.point(j + 1);
            let f = self.strand_field(s);
            let dirs = codim_dirs(f.jacobian(target), false)?;
            conditions.push(Condition::Output { sheet: j, target, dirs });
        }
        let single_edge = t.edges.len() == 1;
        for &e in &top.preorder {
            let is_input = top.class[e] == EdgeClass::ExteriorStem && (e != top.e0 || single_edge);
            if !is_input {
                continue;
            }
            let leaf = t.edges[e].src;
            let i = top.stem_index[&leaf];
            let q = &self.inputs[i - 1];
            for hl in 1..=k {
                let s = g.strand(e, hl);
                let target = q.point(g.edges[s].hr);
                let f = self.strand_field(s);
                let dirs = codim_dirs(f.jacobian(target), true)?;
                let flow = dirs.len() == 1 && f.affine().is_none();
                conditions.push(Condition::Input { strand: s, target, dirs, flow });
            }
        }
        for (_, [a, b]) in &g.marginal_pairs {
            conditions.push(Condition::Diagonal { a: *a, b: *b });
        }
        let equations = conditions
            .iter()
            .map(|c| match c {
                Condition::Output { dirs, .. } | Condition::Input { dirs, .. } => dirs.len(),
                Condition::Diagonal { .. } => 2,
            })
            .sum();
        let mut length_slot = vec![None; t.edges.len()];
        for (p, &e) in length_edges.iter().enumerate() {
            length_slot[e] = Some(2 * k + p);
        }
        Ok(Layout {
            kappa: k,
            length_slot,
            length_edges,
            root_strands,
            conditions,
            equations,
            translation: single_edge as usize,
        })
    }

    /// Evaluates the shooting map and its Jacobian.
    pub fn shoot(&self, u: &[f64]) -> Result<Shot, Error> {
        let (residual, jacobian, nodes) = self.eval(u, true)?;
        let g = &self.graph;
        let vertex_positions = (0..g.vertex_count()).map(|v| nodes.known[v].then(|| nodes.x[v])).collect();
        Ok(Shot { residual, jacobian: jacobian.unwrap(), vertex_positions, strand_ends: nodes.ends })
    }

    /// Residual only.
    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>, Error> {
        Ok(self.eval(u, false)?.0)
    }

    /// Shoots from the seeds. Positions live at nodes: lifted vertices
    /// first, then one tip node per strand ending at an exterior vertex.
    #[allow(clippy::type_complexity)]
    fn eval(&self, u: &[f64], jac: bool) -> Result<(Vec<f64>, Option<Mat>, Nodes), Error> {
        let lay = &self.layout;
        let n = lay.unknowns();
        if u.len() != n {
            return Err(Error::Malformed(format!("{} unknowns, expected {n}", u.len())));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("unknowns".into()));
        }
        let g = &self.graph;
        let t = &g.base;
        let top = &g.topology;
        let k = t.kappa;
        let nv = g.vertex_count();
        let total = nv + g.edges.len();
        let w = if jac { n } else { 0 };
        let mut nodes = Nodes {
            x: vec![V2::ZERO; total],
            d: vec![V2::ZERO; total * w],
            known: vec![false; total],
            tip: vec![usize::MAX; g.edges.len()],
            ends: vec![(V2::ZERO, None); g.edges.len()],
        };
        for (j, &s) in lay.root_strands.iter().enumerate() {
            let v = g.edges[s].src;
            nodes.x[v] = V2::new(u[2 * j], u[2 * j + 1]);
            nodes.known[v] = true;
            if jac {
                nodes.d[v * w + 2 * j] = V2::new(1.0, 0.0);
                nodes.d[v * w + 2 * j + 1] = V2::new(0.0, 1.0);
            }
            nodes.ends[s] = (nodes.x[v], None);
        }
        for &e in &top.preorder {
            if e == top.e0 {
                continue;
            }
            let li = lay.length_slot[e];
            let exterior = t.vertices[t.edges[e].src].is_exterior();
            for hl in 1..=k {
                let s = g.strand(e, hl);
                let a = g.edges[s].dst;
                debug_assert!(nodes.known[a], "parent positions come first");
                let Some(li) = li else {
                    nodes.ends[s] = (nodes.x[a], None);
                    nodes.tip[s] = a;
                    continue;
                };
                let l = u[li];
                if l < 0.0 {
                    return Err(Error::Malformed(format!("negative length {l} on edge {e}")));
                }
                let jet = flow_jet(&self.strand_field(s), l, nodes.x[a])?;
                let b = if exterior { nv + s } else { g.edges[s].src };
                nodes.x[b] = jet.x;
                nodes.known[b] = true;
                if jac {
                    for c in 0..n {
                        nodes.d[b * w + c] = jet.dx0.apply(nodes.d[a * w + c]);
                    }
                    nodes.d[b * w + li] += jet.dt;
                }
                nodes.ends[s] = (nodes.x[a], Some(jet.x));
                if exterior {
                    nodes.tip[s] = b;
                }
            }
        }
        // the single edge tree has no internal vertex: its strands start at the seeds
        if t.edges.len() == 1 {
            for &s in &lay.root_strands {
                nodes.tip[s] = g.edges[s].src;
            }
        }
        let mut residual = Vec::with_capacity(lay.equations);
        let mut jm = if jac { Mat::zeros(lay.equations, n) } else { Mat::zeros(0, 0) };
        let mut scratch = vec![V2::ZERO; w];
        for c in &lay.conditions {
            match c {
                Condition::Output { sheet, target, dirs } => {
                    let v = g.edges[lay.root_strands[*sheet]].src;
                    for &dir in dirs {
                        if jac {
                            let r = residual.len();
                            for col in 0..n {
                                jm.set(r, col, dir.dot(nodes.d[v * w + col]));
                            }
                        }
                        residual.push(dir.dot(nodes.x[v] - *target));
                    }
                }
                Condition::Input { strand, target, dirs, flow } => {
                    let v = nodes.tip[*strand];
                    let mut x = nodes.x[v];
                    if jac {
                        scratch.copy_from_slice(&nodes.d[v * w..(v + 1) * w]);
                    }
                    if *flow {
                        let jet = flow_jet(&self.strand_field(*strand), self.truncation, x)?;
                        x = jet.x;
                        for d in &mut scratch {
                            *d = jet.dx0.apply(*d);
                        }
                    }
                    for &dir in dirs {
                        if jac {
                            let r = residual.len();
                            for (col, d) in scratch.iter().enumerate() {
                                jm.set(r, col, dir.dot(*d));
                            }
                        }
                        residual.push(dir.dot(x - *target));
                    }
                }
                Condition::Diagonal { a, b } => {
                    let (va, vb) = (nodes.tip[*a], nodes.tip[*b]);
                    let diff = nodes.x[va] - nodes.x[vb];
                    for (dir, comp) in [(V2::new(1.0, 0.0), diff.x), (V2::new(0.0, 1.0), diff.y)] {
                        if jac {
                            let r = residual.len();
                            for col in 0..n {
                                jm.set(r, col, dir.dot(nodes.d[va * w + col] - nodes.d[vb * w + col]));
                            }
                        }
                        residual.push(comp);
                    }
                }
            }
        }
        Ok((residual, jac.then_some(jm), nodes))
    }

    /// Reads the unknown vector into per-edge lengths.
    pub fn lengths(&self, u: &[f64]) -> Vec<(usize, f64)> {
        self.layout.length_edges.iter().enumerate().map(|(p, &e)| (e, u[2 * self.layout.kappa + p])).collect()
    }
}
