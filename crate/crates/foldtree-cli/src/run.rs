//! Table cells and per-tree solves spread over a worker pool. Results are
//! gathered in a fixed order, so they do not depend on the worker count.

use foldtree::ainfty::{product_cell_with_trees, table_inputs, Contribution, ProductTable};
use foldtree::algebra::Permutation;
use foldtree::morse::{critical_points, Chain, Generator, MetricConfig};
use foldtree::solver::{assemble, dimension, rigid_trees, solve_tree, ModuliResult, SolverConfig};
use rayon::prelude::*;

use crate::CliError;

pub fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Failure(format!("worker pool: {e}")))
}

/// The generator of hom(f_src, f_dst) with permutation type `w`.
pub fn generator(chain: &Chain, src: usize, dst: usize, w: &Permutation) -> Result<Generator, CliError> {
    critical_points(chain, src, dst)?
        .into_iter()
        .find(|g| &g.perm == w)
        .ok_or_else(|| CliError::Usage(format!("no generator of type {w} in hom({src}, {dst})")))
}

/// Solves every rigid tree from `inputs` to `output` in parallel.
pub fn solve(
    chain: &Chain,
    inputs: &[Generator],
    output: &Generator,
    metric: &MetricConfig,
    cfg: &SolverConfig,
    workers: usize,
) -> Result<ModuliResult, CliError> {
    if dimension(output, inputs, inputs.len()) != 0 {
        return Ok(ModuliResult::default());
    }
    let trees = rigid_trees(inputs, output, chain.kappa, cfg.max_marginal);
    let outcomes = pool(workers)?.install(|| {
        trees
            .par_iter()
            .map(|t| solve_tree(t, chain, inputs, output, metric, cfg))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(assemble(trees, outcomes))
}

/// One product a·b with the flow trees behind it.
#[derive(Clone, Debug)]
pub struct CellRun {
    pub left: Permutation,
    pub right: Permutation,
    /// (q₁, q₂) = (b, a).
    pub inputs: [Generator; 2],
    pub contributions: Vec<Contribution>,
}

#[derive(Clone, Debug)]
pub struct TableRun {
    pub table: ProductTable,
    pub cells: Vec<CellRun>,
}

/// The full product table, one cell per task.
pub fn table(chain: &Chain, order: u32, metric: &MetricConfig, cfg: &SolverConfig, workers: usize) -> Result<TableRun, CliError> {
    let inputs = table_inputs(chain)?;
    let basis = Permutation::all(chain.kappa);
    let pairs: Vec<(Permutation, Permutation)> =
        basis.iter().flat_map(|a| basis.iter().map(move |b| (a.clone(), b.clone()))).collect();
    let done = pool(workers)?.install(|| {
        pairs
            .par_iter()
            .map(|(a, b)| product_cell_with_trees(chain, &inputs, a, b, metric, cfg, order))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut cells = Vec::new();
    let mut entries = Vec::new();
    for ((a, b), (e, contributions, q)) in pairs.into_iter().zip(done) {
        entries.push(((a.clone(), b.clone()), e));
        cells.push(CellRun { left: a, right: b, inputs: q, contributions });
    }
    Ok(TableRun { table: ProductTable::from_cells(chain.kappa, order, entries), cells })
}
