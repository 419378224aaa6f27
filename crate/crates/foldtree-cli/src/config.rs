//! Run configuration: defaults, then the config file, then environment and
//! flags.

use std::path::Path;

use foldtree::algebra::MAX_TRUNCATION;
use foldtree::solver::{SolverConfig, Tolerances};
use serde::{Deserialize, Serialize};

use crate::dto::ChainJson;
use crate::CliError;

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRUNCATION: u32 = 3;
pub const DEFAULT_MAX_KAPPA: usize = 3;

/// Solver keys. Tolerances left unset follow the disk radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub max_marginal: usize,
    pub seed_grid: usize,
    /// Starting inner-edge lengths as fractions of 3R.
    pub length_grid: Vec<f64>,
    pub max_newton_iter: usize,
    pub perturb_epsilon: f64,
    pub tol_newton: Option<f64>,
    pub tol_residual: Option<f64>,
    pub tol_dedup: Option<f64>,
    /// Truncation length of semi-infinite strands.
    #[serde(rename = "L")]
    pub truncation_length: Option<f64>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSettings {
            max_marginal: d.max_marginal,
            seed_grid: d.seed_grid,
            length_grid: d.length_grid,
            max_newton_iter: d.max_newton_iter,
            perturb_epsilon: d.perturb_epsilon,
            tol_newton: None,
            tol_residual: None,
            tol_dedup: None,
            truncation_length: None,
        }
    }
}

impl SolverSettings {
    /// Fills the tolerances for disk radius `r`.
    pub fn resolve(&mut self, r: f64) {
        let t = Tolerances::for_radius(r);
        self.tol_newton.get_or_insert(t.newton);
        self.tol_residual.get_or_insert(t.residual);
        self.tol_dedup.get_or_insert(t.dedup);
    }

    pub fn to_config(&self, r: f64, seed: u64) -> SolverConfig {
        let t = Tolerances::for_radius(r);
        SolverConfig {
            max_marginal: self.max_marginal,
            length_grid: self.length_grid.clone(),
            seed_grid: self.seed_grid,
            tol: Some(Tolerances {
                newton: self.tol_newton.unwrap_or(t.newton),
                residual: self.tol_residual.unwrap_or(t.residual),
                dedup: self.tol_dedup.unwrap_or(t.dedup),
            }),
            truncation_length: self.truncation_length,
            max_newton_iter: self.max_newton_iter,
            perturb_epsilon: self.perturb_epsilon,
            seed,
        }
    }
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub truncation: Option<u32>,
    pub max_kappa: Option<usize>,
    pub solver: Option<SolverSettings>,
    pub chain: Option<ChainJson>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Values given on the command line or through `FOLDTREE_*` variables.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub truncation: Option<u32>,
}

/// Fully resolved configuration. The worker count is left out of the
/// serialized form since it does not affect results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip)]
    pub workers: usize,
    pub truncation: u32,
    pub max_kappa: usize,
    pub solver: SolverSettings,
    /// The object chain, written out in full even when generated.
    pub chain: Option<ChainJson>,
}

impl RunConfig {
    pub fn resolve(file: ConfigFile, over: Overrides) -> Result<Self, CliError> {
        let workers = over
            .workers
            .or(file.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if workers == 0 {
            return Err(CliError::Usage("workers must be positive".into()));
        }
        let truncation = over.truncation.or(file.truncation).unwrap_or(DEFAULT_TRUNCATION);
        if truncation > MAX_TRUNCATION {
            return Err(CliError::Usage(format!("truncation above {MAX_TRUNCATION}")));
        }
        Ok(RunConfig {
            seed: over.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            workers,
            truncation,
            max_kappa: file.max_kappa.unwrap_or(DEFAULT_MAX_KAPPA),
            solver: file.solver.unwrap_or_default(),
            chain: file.chain,
        })
    }
}
