use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::linalg::{lu_solve, svd};
use super::problem::{FlowTreeProblem, Tolerances};
use super::verify::{action_deficit, c0_bound_check, sample_trajectories};
use crate::algebra::Permutation;
use crate::cover::RibbonGraph;
use crate::geom::V2;
use crate::morse::{Chain, Generator, MetricConfig};
use crate::trees::{EdgeClass, EnumerateOptions, Enumerator, FoldedRibbonTree};
use crate::Error;

/// |q₀| − Σ|qᵢ| + m − 2.
pub fn dimension(output: &Generator, inputs: &[Generator], m: usize) -> i64 {
    output.grading - inputs.iter().map(|q| q.grading).sum::<i64>() + m as i64 - 2
}

/// Solver configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_marginal: usize,
    /// Starting lengths of inner edges, as fractions of 3R.
    pub length_grid: Vec<f64>,
    /// Grid points per axis for seeds that the output does not pin.
    pub seed_grid: usize,
    pub tol: Option<Tolerances>,
    /// Truncation length L of semi-infinite strands; derived from the
    /// chain when unset.
    pub truncation_length: Option<f64>,
    pub max_newton_iter: usize,
    /// Size of the metric perturbation used when a root is not transverse.
    pub perturb_epsilon: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_marginal: 3,
            // geometric in [0, 3R]: 0.05, 0.3, 1, 2.5, 6 at R = 4
            length_grid: vec![1.0 / 240.0, 1.0 / 40.0, 1.0 / 12.0, 5.0 / 24.0, 0.5],
            seed_grid: 7,
            tol: None,
            truncation_length: None,
            max_newton_iter: 60,
            perturb_epsilon: 1e-3,
            seed: 0,
        }
    }
}

/// An accepted flow tree.
#[derive(Clone, Debug)]
pub struct Found {
    pub chi: i64,
    pub unknowns: Vec<f64>,
    /// Finite edge lengths, keyed by base edge.
    pub lengths: Vec<(usize, f64)>,
    /// Positions of lifted vertices over internal and root vertices.
    pub vertex_positions: Vec<(usize, V2)>,
    pub residual_norm: f64,
    pub jacobian_rank: usize,
    /// 𝒜(q₀) − Σ𝒜(qᵢ).
    pub action_deficit: f64,
    /// The same quantity as minus the sum of edge integrals.
    pub action_quadrature: f64,
    pub c0_ok: bool,
    /// Metric used, which differs from the configured one after a
    /// re-randomization.
    pub metric: MetricConfig,
}

/// Outcome of solving on one tree.
#[derive(Clone, Debug, Default)]
pub struct TreeOutcome {
    pub solutions: Vec<Found>,
    /// Converged roots discarded because some length vanished.
    pub boundary_hits: usize,
    /// The shooting map has rank below the equation count everywhere, so
    /// its zero set is empty for generic data; Newton was not run.
    pub degenerate: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ModuliResult {
    pub solutions: Vec<(FoldedRibbonTree, Found)>,
    /// Solution count mod 2 per (tree index, χ).
    pub parity: BTreeMap<(usize, i64), u8>,
    pub trees_examined: usize,
    pub boundary_hits: usize,
    pub degenerate_trees: usize,
}

impl ModuliResult {
    /// Σ over trees of the parity at each χ, mod 2.
    pub fn parity_by_chi(&self) -> BTreeMap<i64, u8> {
        let mut out = BTreeMap::new();
        for (&(_, chi), &p) in &self.parity {
            *out.entry(chi).or_insert(0) ^= p;
        }
        out
    }
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Damped Newton from `u`, keeping lengths nonnegative. Returns the root
/// and its residual norm when the iteration converges.
fn newton(p: &FlowTreeProblem, mut u: Vec<f64>, max_iter: usize) -> Option<(Vec<f64>, f64)> {
    let k2 = 2 * p.layout.kappa;
    let mut shot = p.shoot(&u).ok()?;
    let mut rn = norm(&shot.residual);
    for _ in 0..max_iter {
        if rn <= p.tol.newton {
            break;
        }
        let neg: Vec<f64> = shot.residual.iter().map(|r| -r).collect();
        let step = lu_solve(&shot.jacobian, &neg, 1e-14).unwrap_or_else(|| svd(&shot.jacobian).solve(&neg, 1e-13));
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-6 {
            let mut trial: Vec<f64> = u.iter().zip(&step).map(|(a, b)| a + alpha * b).collect();
            for x in &mut trial[k2..] {
                *x = x.max(0.0);
            }
            if let Ok(r) = p.residual(&trial) {
                let tn = norm(&r);
                if tn < (1.0 - 1e-4 * alpha) * rn || (tn <= rn && tn <= p.tol.residual) {
                    accepted = Some((trial, tn));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((trial, tn)) = accepted else { break };
        u = trial;
        rn = tn;
        if rn <= p.tol.newton {
            break;
        }
        shot = p.shoot(&u).ok()?;
    }
    (rn <= p.tol.residual).then_some((u, rn))
}

/// Starting vectors: pinned seeds at their targets, a grid elsewhere;
/// inner lengths from the grid; marginal leaf lengths by projection.
fn starts(p: &FlowTreeProblem, cfg: &SolverConfig) -> Vec<Vec<f64>> {
    let lay = &p.layout;
    let k = lay.kappa;
    let r = p.chain.radius;
    let top = &p.graph.topology;
    let grid: Vec<f64> = cfg.length_grid.iter().map(|f| f * 3.0 * r).collect();
    // candidate values per seed
    let mut seed_choices: Vec<Vec<V2>> = Vec::new();
    for j in 0..k {
        if p.output_pins(j) {
            seed_choices.push(vec![p.output.point(j + 1)]);
        } else {
            let n = cfg.seed_grid.max(1);
            let mut c = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    let t = |i: usize| if n == 1 { 0.0 } else { -r + 2.0 * r * i as f64 / (n - 1) as f64 };
                    c.push(V2::new(t(a), t(b)));
                }
            }
            seed_choices.push(c);
        }
    }
    let inner: Vec<usize> = lay
        .length_edges
        .iter()
        .copied()
        .filter(|&e| top.class[e] != EdgeClass::ExteriorMarginal)
        .collect();
    let mut dims: Vec<usize> = seed_choices.iter().map(Vec::len).collect();
    dims.extend(inner.iter().map(|_| grid.len()));
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut digit = |n: usize| {
            let d = rem % n;
            rem /= n;
            d
        };
        let mut u = vec![0.5; lay.unknowns()];
        for j in 0..k {
            let s = seed_choices[j][digit(seed_choices[j].len())];
            u[2 * j] = s.x;
            u[2 * j + 1] = s.y;
        }
        for &e in &inner {
            u[lay.length_index(e).unwrap()] = grid[digit(grid.len())];
        }
        project_marginal_lengths(p, &mut u);
        out.push(u);
    }
    out
}

/// Sets each marginal leaf length so that the two flipped strands would
/// meet if their fields were constant from the parent vertex on.
fn project_marginal_lengths(p: &FlowTreeProblem, u: &mut [f64]) {
    let Ok(shot) = p.shoot(u) else { return };
    for (e, [a, b]) in &p.graph.marginal_pairs {
        let (pa, pb) = (shot.strand_ends[*a].0, shot.strand_ends[*b].0);
        let v = p.strand_field(*a).eval(pa);
        let vv = v.norm_sq();
        if vv > 0.0 {
            let l = (pb - pa).dot(v) / (2.0 * vv);
            if l > 0.0 {
                u[p.layout.length_index(*e).unwrap()] = l;
            }
        }
    }
}

impl FlowTreeProblem<'_> {
    /// Whether the output condition fixes seed j completely.
    pub fn output_pins(&self, j: usize) -> bool {
        let f = self.strand_field(self.layout.root_strands[j]);
        let [(l0, _), (l1, _)] = f.jacobian(self.output.point(j + 1)).sym_eigen();
        l0 < 0.0 && l1 < 0.0
    }
}

/// Largest Jacobian rank over a few starts, nudged off the grid. Rank is
/// lower semicontinuous, so a deficit here is a deficit at every root.
fn generic_rank(p: &FlowTreeProblem, starts: &[Vec<f64>]) -> Result<usize, Error> {
    let k2 = 2 * p.layout.kappa;
    let mut best = 0;
    for (i, u) in starts.iter().step_by((starts.len() / 3).max(1)).take(3).enumerate() {
        let nudged: Vec<f64> = u
            .iter()
            .enumerate()
            .map(|(j, x)| {
                let t = 0.37 * (1 + i + j) as f64;
                if j < k2 { x + 0.01 * libm::sin(t) } else { x.max(0.05) * (1.0 + 0.1 * libm::cos(t)) }
            })
            .collect();
        best = best.max(svd(&p.shoot(&nudged)?.jacobian).rank(1e-9));
        if best == p.layout.equations {
            break;
        }
    }
    Ok(best)
}

/// Multi-start Newton on one tree.
pub fn solve_tree(
    tree: &FoldedRibbonTree,
    chain: &Chain,
    inputs: &[Generator],
    output: &Generator,
    metric: &MetricConfig,
    cfg: &SolverConfig,
) -> Result<TreeOutcome, Error> {
    match solve_tree_once(tree, chain, inputs, output, metric, cfg)? {
        Ok(o) => Ok(o),
        Err(()) => {
            let top = tree.topology()?;
            let finite = (0..tree.edges.len()).filter(|&e| top.class[e].has_length());
            let m2 = MetricConfig::random(finite, cfg.perturb_epsilon, cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
            solve_tree_once(tree, chain, inputs, output, &m2, cfg)?.map_err(|()| {
                Error::NonTransverse(format!("rank-deficient root persists after re-randomizing the metric on {tree:?}"))
            })
        }
    }
}

#[allow(clippy::type_complexity)]
fn solve_tree_once(
    tree: &FoldedRibbonTree,
    chain: &Chain,
    inputs: &[Generator],
    output: &Generator,
    metric: &MetricConfig,
    cfg: &SolverConfig,
) -> Result<Result<TreeOutcome, ()>, Error> {
    let graph = RibbonGraph::build(tree)?;
    let mut p = FlowTreeProblem::new(graph, chain, metric.clone(), inputs.to_vec(), output.clone())?;
    if let Some(l) = cfg.truncation_length {
        p.truncation = l;
    }
    if let Some(t) = cfg.tol {
        p.tol = t;
    }
    let expected = dimension(output, inputs, tree.m()) - tree.excess() as i64;
    if p.layout.expected_dimension() != expected {
        return Err(Error::Malformed(format!(
            "unknown/equation count gives dimension {}, index formula gives {expected}",
            p.layout.expected_dimension()
        )));
    }
    if expected != 0 {
        return Err(Error::Malformed(format!("tree stratum has dimension {expected}, not 0")));
    }
    let starts = starts(&p, cfg);
    if generic_rank(&p, &starts)? < p.layout.equations {
        return Ok(Ok(TreeOutcome { degenerate: true, ..Default::default() }));
    }
    let mut roots: Vec<(Vec<f64>, f64)> = Vec::new();
    for u0 in starts {
        let Some((u, rn)) = newton(&p, u0, cfg.max_newton_iter) else { continue };
        let dup = roots.iter().any(|(v, _)| v.iter().zip(&u).all(|(a, b)| (a - b).abs() < p.tol.dedup));
        if !dup {
            roots.push((u, rn));
        }
    }
    let k2 = 2 * p.layout.kappa;
    let mut out = TreeOutcome::default();
    let chi = p.graph.euler_characteristic();
    for (u, rn) in roots {
        if u[k2..].iter().any(|&l| l <= p.tol.dedup) {
            out.boundary_hits += 1;
            continue;
        }
        let shot = p.shoot(&u)?;
        let s = svd(&shot.jacobian);
        let rank = s.rank(1e-10);
        if rank < p.layout.unknowns().min(p.layout.equations) {
            return Ok(Err(()));
        }
        let (gen_side, quad_side) = action_deficit(&p, &u)?;
        let traj = sample_trajectories(&p, &u, 64)?;
        let vertex_positions = shot
            .vertex_positions
            .iter()
            .enumerate()
            .filter_map(|(i, x)| x.map(|x| (i, x)))
            .collect();
        out.solutions.push(Found {
            chi,
            lengths: p.lengths(&u),
            unknowns: u,
            vertex_positions,
            residual_norm: rn,
            jacobian_rank: rank,
            action_deficit: gen_side,
            action_quadrature: quad_side,
            c0_ok: c0_bound_check(&traj, chain.radius),
            metric: p.metric.clone(),
        });
    }
    Ok(Ok(out))
}

/// Decorated trees that can carry rigid flow trees from `inputs` to `output`:
/// trivalent, stems decorated by the inverse input permutations and root
/// decorated by the inverse output permutation.
pub fn rigid_trees(inputs: &[Generator], output: &Generator, kappa: usize, max_marginal: usize) -> Vec<FoldedRibbonTree> {
    let mut o = EnumerateOptions::new(inputs.len(), kappa, max_marginal);
    o.trivalent_only = true;
    o.stem_sigma = Some(inputs.iter().map(|q| q.perm.inverse()).collect());
    let root: Permutation = output.perm.inverse();
    Enumerator::new(o)
        .filter(|t| {
            let top = t.topology().expect("enumerated trees are valid");
            t.sigma[top.e0] == root
        })
        .collect()
}

/// All rigid flow trees from `inputs` to `output` within the bounds.
///
/// Returns an empty result when the expected dimension is not 0.
pub fn solve_moduli(
    chain: &Chain,
    inputs: &[Generator],
    output: &Generator,
    metric: &MetricConfig,
    cfg: &SolverConfig,
) -> Result<ModuliResult, Error> {
    if dimension(output, inputs, inputs.len()) != 0 {
        return Ok(ModuliResult::default());
    }
    let trees = rigid_trees(inputs, output, chain.kappa, cfg.max_marginal);
    let outcomes = trees
        .iter()
        .map(|t| solve_tree(t, chain, inputs, output, metric, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(trees, outcomes))
}

/// Combines per-tree outcomes in tree order.
pub fn assemble(trees: Vec<FoldedRibbonTree>, outcomes: Vec<TreeOutcome>) -> ModuliResult {
    let mut r = ModuliResult { trees_examined: trees.len(), ..Default::default() };
    for (i, (t, o)) in trees.into_iter().zip(outcomes).enumerate() {
        r.boundary_hits += o.boundary_hits;
        r.degenerate_trees += o.degenerate as usize;
        for f in o.solutions {
            *r.parity.entry((i, f.chi)).or_insert(0) ^= 1;
            r.solutions.push((t.clone(), f));
        }
    }
    r.parity.retain(|_, p| *p == 1);
    r
}
