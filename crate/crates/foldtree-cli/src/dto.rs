//! JSON shapes of trees, covers, object chains, solutions and product
//! tables. Maps are ordered so that output is byte-stable.

use std::collections::BTreeMap;

use foldtree::ainfty::{MorphismElement, ProductTable};
use foldtree::algebra::{HbarSeries, Permutation};
use foldtree::cover::RibbonGraph;
use foldtree::geom::{M2, V2};
use foldtree::morse::{Bump, Chain, MetricConfig, MorseTuple};
use foldtree::solver::Found;
use foldtree::trees::{Edge, FoldedRibbonTree, VertexKind};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

pub fn perm_json(p: &Permutation) -> Vec<usize> {
    p.images()
}

pub fn perm_from(v: &[usize]) -> Result<Permutation, CliError> {
    Permutation::from_images(v).map_err(|e| CliError::Usage(e.to_string()))
}

/// Accepts `2,1,3` or `[2,1,3]`.
pub fn parse_perm(s: &str) -> Result<Permutation, CliError> {
    let body = s.trim().trim_start_matches('[').trim_end_matches(']');
    let v = body
        .split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad permutation {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    perm_from(&v)
}

/// Tool version, resolved configuration and seed, embedded in every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
}

impl Meta {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Meta {
            tool: "foldtree".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            seed: config.seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindJson {
    Stem,
    Marginal,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub kind: KindJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: usize,
    pub src: usize,
    pub dst: usize,
    pub sigma: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    pub kappa: usize,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    /// Internal vertices only.
    pub cyclic_order: BTreeMap<usize, Vec<usize>>,
    pub stem_labels: Vec<usize>,
    #[serde(default)]
    pub lengths: BTreeMap<usize, f64>,
}

impl From<&FoldedRibbonTree> for TreeJson {
    fn from(t: &FoldedRibbonTree) -> Self {
        let kind = |k: VertexKind| match k {
            VertexKind::Stem => KindJson::Stem,
            VertexKind::Marginal => KindJson::Marginal,
            VertexKind::Internal => KindJson::Internal,
        };
        TreeJson {
            kappa: t.kappa,
            vertices: t.vertices.iter().enumerate().map(|(id, &k)| VertexJson { id, kind: kind(k) }).collect(),
            edges: t
                .edges
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeJson { id, src: e.src, dst: e.dst, sigma: perm_json(&t.sigma[id]) })
                .collect(),
            cyclic_order: t
                .cyclic_order
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_empty())
                .map(|(v, c)| (v, c.clone()))
                .collect(),
            stem_labels: t.stem_labels.clone(),
            lengths: t.lengths.clone(),
        }
    }
}

impl TreeJson {
    /// The tree, validated.
    pub fn to_tree(&self) -> Result<FoldedRibbonTree, CliError> {
        let n = self.vertices.len();
        let mut vertices = Vec::with_capacity(n);
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                return Err(CliError::Usage(format!("vertex ids must be 0..{n} in order")));
            }
            vertices.push(match v.kind {
                KindJson::Stem => VertexKind::Stem,
                KindJson::Marginal => VertexKind::Marginal,
                KindJson::Internal => VertexKind::Internal,
            });
        }
        let mut edges = Vec::new();
        let mut sigma = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.id != i {
                return Err(CliError::Usage(format!("edge ids must be 0..{} in order", self.edges.len())));
            }
            edges.push(Edge { src: e.src, dst: e.dst });
            sigma.push(perm_from(&e.sigma)?);
        }
        let mut cyclic_order = vec![Vec::new(); n];
        for (&v, c) in &self.cyclic_order {
            let slot = cyclic_order.get_mut(v).ok_or_else(|| CliError::Usage(format!("cyclic order at vertex {v}")))?;
            *slot = c.clone();
        }
        let t = FoldedRibbonTree {
            kappa: self.kappa,
            vertices,
            edges,
            cyclic_order,
            sigma,
            lengths: self.lengths.clone(),
            stem_labels: self.stem_labels.clone(),
        };
        let report = t.validate();
        if !report.is_valid() {
            return Err(CliError::Usage(format!("invalid tree: {report:?}")));
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedVertexJson {
    pub id: usize,
    pub base: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedEdgeJson {
    pub id: usize,
    pub base_edge: usize,
    pub h_l: usize,
    pub h_r: usize,
    pub i_l: usize,
    pub i_r: usize,
    pub src: usize,
    pub dst: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalPairJson {
    pub base_edge: usize,
    pub lifted: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverJson {
    pub tree: TreeJson,
    pub vertices: Vec<LiftedVertexJson>,
    pub edges: Vec<LiftedEdgeJson>,
    pub marginal_pairs: Vec<MarginalPairJson>,
    pub euler_characteristic: i64,
}

impl From<&RibbonGraph> for CoverJson {
    fn from(g: &RibbonGraph) -> Self {
        CoverJson {
            tree: TreeJson::from(&g.base),
            vertices: g.vertex_base.iter().enumerate().map(|(id, &base)| LiftedVertexJson { id, base }).collect(),
            edges: g
                .edges
                .iter()
                .enumerate()
                .map(|(id, l)| {
                    let lab = g.labels(id);
                    LiftedEdgeJson {
                        id,
                        base_edge: l.base,
                        h_l: l.hl,
                        h_r: l.hr,
                        i_l: lab.il,
                        i_r: lab.ir,
                        src: l.src,
                        dst: l.dst,
                    }
                })
                .collect(),
            marginal_pairs: g
                .marginal_pairs
                .iter()
                .map(|&(base_edge, lifted)| MarginalPairJson { base_edge, lifted })
                .collect(),
            euler_characteristic: g.euler_characteristic(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpJson {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationJson {
    /// Bumps added to each sheet.
    pub bumps: Vec<Vec<BumpJson>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectJson {
    pub index: usize,
    /// Quadratic coefficient; κ − index when absent.
    #[serde(default)]
    pub a: Option<f64>,
    pub theta: [f64; 2],
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(default)]
    pub perturbation: Option<PerturbationJson>,
}

/// An object chain. `perturbation` is `null` for the plain quadratics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainJson {
    pub kappa: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub objects: Vec<ObjectJson>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl From<&Chain> for ChainJson {
    fn from(c: &Chain) -> Self {
        ChainJson {
            kappa: c.kappa,
            radius: c.radius,
            objects: c
                .objects
                .iter()
                .map(|o| ObjectJson {
                    index: o.index,
                    a: Some(o.quad),
                    theta: o.theta.to_array(),
                    b: o.b.clone(),
                    perturbation: o.is_perturbed().then(|| PerturbationJson {
                        bumps: o
                            .perturbation
                            .iter()
                            .map(|s| {
                                s.iter()
                                    .map(|b| BumpJson {
                                        amplitude: b.amplitude,
                                        center: b.center.to_array(),
                                        radius: b.radius,
                                    })
                                    .collect()
                            })
                            .collect(),
                    }),
                })
                .collect(),
            seed: c.seed,
        }
    }
}

impl ChainJson {
    pub fn to_chain(&self) -> Result<Chain, CliError> {
        let mut objects = Vec::new();
        for (i, o) in self.objects.iter().enumerate() {
            if o.index != i {
                return Err(CliError::Usage(format!("object indices must be 0..{} in order", self.objects.len())));
            }
            let perturbation = match &o.perturbation {
                None => Vec::new(),
                Some(p) => p
                    .bumps
                    .iter()
                    .map(|s| {
                        s.iter()
                            .map(|b| Bump {
                                amplitude: b.amplitude,
                                center: V2::new(b.center[0], b.center[1]),
                                radius: b.radius,
                            })
                            .collect()
                    })
                    .collect(),
            };
            objects.push(MorseTuple {
                index: i,
                quad: o.a.unwrap_or(self.kappa as f64 - i as f64),
                theta: V2::new(o.theta[0], o.theta[1]),
                b: o.b.clone(),
                perturbation,
            });
        }
        Ok(Chain { kappa: self.kappa, radius: self.radius, objects, seed: self.seed })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub perm: Vec<usize>,
    pub series: Vec<u8>,
}

pub fn terms_json(e: &MorphismElement) -> Vec<TermJson> {
    e.terms().map(|(w, c)| TermJson { perm: perm_json(w), series: c.coeffs() }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub result: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableJson {
    pub kappa: usize,
    pub truncation: u32,
    pub basis: Vec<Vec<usize>>,
    pub entries: Vec<EntryJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl TableJson {
    pub fn new(t: &ProductTable, meta: Option<Meta>) -> Self {
        TableJson {
            kappa: t.kappa,
            truncation: t.truncation,
            basis: t.basis.iter().map(perm_json).collect(),
            entries: t
                .entries
                .iter()
                .map(|((a, b), e)| EntryJson { left: perm_json(a), right: perm_json(b), result: terms_json(e) })
                .collect(),
            meta,
        }
    }

    pub fn to_table(&self) -> Result<ProductTable, CliError> {
        let n = self.truncation;
        let mut cells = Vec::new();
        for e in &self.entries {
            let mut m = MorphismElement::zero(0, 2, n);
            for t in &e.result {
                m.add_term(perm_from(&t.perm)?, HbarSeries::from_coeffs(&t.series, n)?)?;
            }
            cells.push(((perm_from(&e.left)?, perm_from(&e.right)?), m));
        }
        Ok(ProductTable::from_cells(self.kappa, n, cells))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub tree: TreeJson,
    pub chi: i64,
    pub lengths: BTreeMap<usize, f64>,
    pub vertices: BTreeMap<usize, [f64; 2]>,
    pub residual: f64,
    pub action_deficit: f64,
    pub action_quadrature: f64,
    pub jacobian_rank: usize,
    pub c0_ok: bool,
    /// Seeds then lengths, as solved.
    pub unknowns: Vec<f64>,
    /// Metric perturbation per base edge as [m11, m12, m21, m22].
    pub metric: BTreeMap<usize, [f64; 4]>,
    pub metric_seed: u64,
}

impl SolutionJson {
    pub fn new(tree: &FoldedRibbonTree, f: &Found) -> Self {
        SolutionJson {
            tree: TreeJson::from(tree),
            chi: f.chi,
            lengths: f.lengths.iter().copied().collect(),
            vertices: f.vertex_positions.iter().map(|&(v, x)| (v, x.to_array())).collect(),
            residual: f.residual_norm,
            action_deficit: f.action_deficit,
            action_quadrature: f.action_quadrature,
            jacobian_rank: f.jacobian_rank,
            c0_ok: f.c0_ok,
            unknowns: f.unknowns.clone(),
            metric: f
                .metric
                .edge_perturbation
                .iter()
                .map(|(&e, m)| (e, [m.m[0][0], m.m[0][1], m.m[1][0], m.m[1][1]]))
                .collect(),
            metric_seed: f.metric.seed,
        }
    }

    pub fn metric(&self, epsilon: f64) -> MetricConfig {
        MetricConfig {
            edge_perturbation: self.metric.iter().map(|(&e, m)| (e, M2::new(m[0], m[1], m[2], m[3]))).collect(),
            seed: self.metric_seed,
            epsilon,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveJson {
    /// Permutation types of q₁, …, q_m.
    pub inputs: Vec<Vec<usize>>,
    pub output: Vec<usize>,
    pub dimension: i64,
    pub trees_examined: usize,
    pub boundary_hits: usize,
    pub degenerate_trees: usize,
    /// Solution count mod 2 per χ.
    pub parity_by_chi: BTreeMap<i64, u8>,
    pub solutions: Vec<SolutionJson>,
    pub meta: Meta,
}
