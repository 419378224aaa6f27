//! Command-line definitions and the commands themselves.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use foldtree::ainfty::{compare_hecke, verify_associativity, verify_unit, MorphismElement, ProductTable};
use foldtree::algebra::{HbarSeries, Permutation};
use foldtree::cover::build_cover;
use foldtree::morse::{Chain, MetricConfig};
use foldtree::solver::{dimension, FlowTreeProblem};
use foldtree::trees::enumerate;
use serde::Serialize;

use crate::config::{ConfigFile, Overrides, RunConfig};
use crate::dto::{parse_perm, perm_json, ChainJson, CoverJson, Meta, SolutionJson, SolveJson, TableJson, TreeJson};
use crate::{plot, run, CliError};

#[derive(Debug, Parser)]
#[command(name = "foldtree", version, about = "Folded Morse flow trees and their product tables")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH", env = "FOLDTREE_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "FOLDTREE_SEED")]
    pub seed: Option<u64>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, env = "FOLDTREE_WORKERS")]
    pub workers: Option<usize>,
    /// ħ-adic truncation order N.
    #[arg(long, global = true, env = "FOLDTREE_TRUNCATION")]
    pub truncation: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List decorated trees as JSON lines, then a summary line.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        m: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        kappa: u32,
        #[arg(long, default_value_t = 0)]
        max_marginal: u32,
        /// Give every finite edge length 1.
        #[arg(long)]
        with_lengths: bool,
    },
    /// Build the ribbon graph over a tree file.
    Cover {
        #[arg(long, value_name = "PATH")]
        tree: PathBuf,
    },
    /// Rigid flow trees from the inputs q₁, …, q_m to the output q₀.
    Solve {
        /// Permutation type of each input, in order, e.g. `2,1`.
        #[arg(long = "input", required = true, value_name = "PERM")]
        inputs: Vec<String>,
        #[arg(long, value_name = "PERM")]
        output: String,
    },
    /// Product table of the wrapped-fiber endomorphism algebra.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        kappa: u32,
    },
    /// Compare the product table with the Hecke algebra.
    VerifyHecke {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        kappa: u32,
    },
    /// Render one solution of a `solve` output as SVG.
    Plot {
        #[arg(long, value_name = "PATH")]
        solution: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Enumerate { .. } => "enumerate",
            Command::Cover { .. } => "cover",
            Command::Solve { .. } => "solve",
            Command::Table { .. } => "table",
            Command::VerifyHecke { .. } => "verify-hecke",
            Command::Plot { .. } => "plot",
        }
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let file = match &cli.global.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let over = Overrides { seed: cli.global.seed, workers: cli.global.workers, truncation: cli.global.truncation };
    let mut cfg = RunConfig::resolve(file, over)?;
    let out = cli.global.out.as_deref();
    let name = cli.command.name();
    match cli.command {
        Command::Enumerate { m, kappa, max_marginal, with_lengths } => {
            cmd_enumerate(&cfg, m as usize, kappa as usize, max_marginal as usize, with_lengths, out, stdout)
        }
        Command::Cover { tree } => cmd_cover(&cfg, &tree, out, stdout),
        Command::Solve { inputs, output } => cmd_solve(&mut cfg, &inputs, &output, out, stdout),
        Command::Table { kappa } => {
            let (_, table) = compute_table(&mut cfg, kappa as usize)?;
            emit(out, stdout, &to_json(&TableJson::new(&table, Some(Meta::new(name, &cfg))))?)?;
            Ok(0)
        }
        Command::VerifyHecke { kappa } => cmd_verify_hecke(&mut cfg, kappa as usize, out, stdout),
        Command::Plot { solution, index } => cmd_plot(&solution, index, out, stdout),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Failure(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct Summary {
    count: usize,
    by_marginal_count: BTreeMap<usize, usize>,
}

fn cmd_enumerate(
    cfg: &RunConfig,
    m: usize,
    kappa: usize,
    max_marginal: usize,
    with_lengths: bool,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut text = line(&Meta::new("enumerate", cfg))?;
    let mut summary = Summary { count: 0, by_marginal_count: BTreeMap::new() };
    for t in enumerate(m, kappa, max_marginal, with_lengths) {
        summary.count += 1;
        *summary.by_marginal_count.entry(t.marginal_vertex_count()).or_insert(0) += 1;
        text.push_str(&line(&TreeJson::from(&t))?);
    }
    #[derive(Serialize)]
    struct Wrapped {
        summary: Summary,
    }
    text.push_str(&line(&Wrapped { summary })?);
    emit(out, stdout, &text)?;
    Ok(0)
}

/// Compact single-line JSON.
fn line<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string(v).map_err(|e| CliError::Failure(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn cmd_cover(cfg: &RunConfig, tree: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(tree).map_err(|e| CliError::Usage(format!("{}: {e}", tree.display())))?;
    let t: TreeJson = serde_json::from_str(&text)?;
    let g = build_cover(&t.to_tree()?)?;
    #[derive(Serialize)]
    struct CoverOut {
        #[serde(flatten)]
        cover: CoverJson,
        meta: Meta,
    }
    emit(out, stdout, &to_json(&CoverOut { cover: CoverJson::from(&g), meta: Meta::new("cover", cfg) })?)?;
    Ok(0)
}

/// The configured chain, or wrapped-fiber data with `objects` objects.
/// Checks the objects, and the normal form at infinity when `wrapped`, and
/// records the chain in `cfg`.
fn resolve_chain(cfg: &mut RunConfig, kappa: usize, objects: usize, wrapped: bool) -> Result<Chain, CliError> {
    let chain = match &cfg.chain {
        Some(c) => c.to_chain()?,
        None => Chain::wrapped(kappa, objects, cfg.seed),
    };
    if chain.kappa != kappa {
        return Err(CliError::Usage(format!("configured chain has kappa {}, requested {kappa}", chain.kappa)));
    }
    if chain.objects.len() < objects {
        return Err(CliError::Usage(format!("{objects} objects needed, chain has {}", chain.objects.len())));
    }
    let failures = if wrapped { chain.check_c4() } else { chain.check_objects() }.failures;
    if !failures.is_empty() {
        return Err(CliError::Failure(format!("invalid objects:\n  {}", failures.join("\n  "))));
    }
    cfg.chain = Some(ChainJson::from(&chain));
    cfg.solver.resolve(chain.radius);
    Ok(chain)
}

fn cmd_solve(
    cfg: &mut RunConfig,
    inputs: &[String],
    output: &str,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let perms = inputs.iter().map(|s| parse_perm(s)).collect::<Result<Vec<_>, _>>()?;
    let q0_perm = parse_perm(output)?;
    let kappa = q0_perm.rank();
    if perms.iter().any(|p| p.rank() != kappa) {
        return Err(CliError::Usage("inputs and output must have the same rank".into()));
    }
    let m = perms.len();
    let chain = resolve_chain(cfg, kappa, m + 1, false)?;
    let q: Vec<_> = perms.iter().enumerate().map(|(i, w)| run::generator(&chain, i, i + 1, w)).collect::<Result<_, _>>()?;
    let q0 = run::generator(&chain, 0, m, &q0_perm)?;
    let scfg = cfg.solver.to_config(chain.radius, cfg.seed);
    let r = run::solve(&chain, &q, &q0, &MetricConfig::euclidean(), &scfg, cfg.workers)?;
    let result = SolveJson {
        inputs: perms.iter().map(perm_json).collect(),
        output: perm_json(&q0_perm),
        dimension: dimension(&q0, &q, m),
        trees_examined: r.trees_examined,
        boundary_hits: r.boundary_hits,
        degenerate_trees: r.degenerate_trees,
        parity_by_chi: r.parity_by_chi().into_iter().filter(|&(_, p)| p == 1).collect(),
        solutions: r.solutions.iter().map(|(t, f)| SolutionJson::new(t, f)).collect(),
        meta: Meta::new("solve", cfg),
    };
    emit(out, stdout, &to_json(&result)?)?;
    Ok(0)
}

/// The product table for the configured or wrapped chain.
pub fn compute_table(cfg: &mut RunConfig, kappa: usize) -> Result<(Chain, ProductTable), CliError> {
    if kappa > cfg.max_kappa {
        return Err(CliError::Usage(format!("kappa {kappa} above the configured maximum {}", cfg.max_kappa)));
    }
    let chain = resolve_chain(cfg, kappa, 3, true)?;
    let scfg = cfg.solver.to_config(chain.radius, cfg.seed);
    let t = run::table(&chain, cfg.truncation, &MetricConfig::euclidean(), &scfg, cfg.workers)?;
    Ok((chain, t.table))
}

fn basis(w: &Permutation, n: u32) -> MorphismElement {
    MorphismElement::basis(0, 2, w, n)
}

/// Report lines for the quadratic relation of each T_i and the braid
/// relation of each adjacent pair, evaluated in the computed table.
pub fn relation_lines(t: &ProductTable) -> Result<(Vec<String>, bool), CliError> {
    let k = t.kappa;
    let n = t.truncation;
    let mut lines = Vec::new();
    let mut ok = true;
    let verdict = |b: bool| if b { "OK" } else { "FAILED" };
    let id = Permutation::identity(k);
    let single = k == 2;
    for i in 1..k {
        let s = Permutation::simple(i, k)?;
        let got = t.mul(&basis(&s, n), &basis(&s, n))?;
        let mut want = basis(&id, n);
        want.add_term(s.clone(), HbarSeries::monomial(1, n))?;
        let pass = got == want;
        ok &= pass;
        let name = if single { "T".to_string() } else { format!("T_{i}") };
        lines.push(format!("{name}^2 = 1 + h*{name}: {}", verdict(pass)));
        if !pass {
            lines.push(format!("  computed {got}"));
        }
    }
    for i in 1..k.saturating_sub(1) {
        let (a, b) = (basis(&Permutation::simple(i, k)?, n), basis(&Permutation::simple(i + 1, k)?, n));
        let left = t.mul(&t.mul(&a, &b)?, &a)?;
        let right = t.mul(&t.mul(&b, &a)?, &b)?;
        let pass = left == right;
        ok &= pass;
        let j = i + 1;
        lines.push(format!("T_{i} T_{j} T_{i} = T_{j} T_{i} T_{j}: {}", verdict(pass)));
        if !pass {
            lines.push(format!("  {left} vs {right}"));
        }
    }
    Ok((lines, ok))
}

fn cmd_verify_hecke(cfg: &mut RunConfig, kappa: usize, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let (_, t) = compute_table(cfg, kappa)?;
    let n = cfg.truncation;
    let mut lines = vec![format!("foldtree {} verify-hecke kappa={kappa} truncation={n} seed={}", env!("CARGO_PKG_VERSION"), cfg.seed)];
    let cmp = compare_hecke(&t, n)?;
    lines.push(format!("hecke: {}/{} entries match", cmp.checked - cmp.discrepancies.len(), cmp.checked));
    for d in &cmp.discrepancies {
        let got = d.computed.as_ref().map_or("missing".to_string(), |e| e.to_string());
        lines.push(format!("  T{} * T{}: expected {}, computed {got}", d.left, d.right, d.expected));
    }
    let (rel, rel_ok) = relation_lines(&t)?;
    lines.extend(rel);
    let assoc = verify_associativity(&t)?;
    lines.push(format!("associativity: {} triples: {}", assoc.checked, if assoc.passed() { "OK" } else { "FAILED" }));
    lines.extend(assoc.failures.iter().take(5).map(|f| format!("  {f}")));
    let unit = verify_unit(&t)?;
    lines.push(format!("unit: {}", if unit.passed() { "OK" } else { "FAILED" }));
    lines.extend(unit.failures.iter().map(|f| format!("  {f}")));
    let pass = cmp.passed() && rel_ok && assoc.passed() && unit.passed();
    lines.push(format!("result: {}", if pass { "PASS" } else { "FAIL" }));
    let mut report = lines.join("\n");
    report.push('\n');
    stdout.write_all(report.as_bytes())?;
    if let Some(p) = out {
        std::fs::write(p, to_json(&TableJson::new(&t, Some(Meta::new("verify-hecke", cfg))))?)?;
    }
    Ok(if pass { 0 } else { 1 })
}

fn cmd_plot(solution: &Path, index: usize, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(solution).map_err(|e| CliError::Usage(format!("{}: {e}", solution.display())))?;
    let s: SolveJson = serde_json::from_str(&text)?;
    let sol = s
        .solutions
        .get(index)
        .ok_or_else(|| CliError::Usage(format!("solution {index} of {}", s.solutions.len())))?;
    let chain = s
        .meta
        .config
        .chain
        .as_ref()
        .ok_or_else(|| CliError::Usage("solution file carries no chain".into()))?
        .to_chain()?;
    let m = s.inputs.len();
    let mut q = Vec::new();
    for (i, w) in s.inputs.iter().enumerate() {
        q.push(run::generator(&chain, i, i + 1, &crate::dto::perm_from(w)?)?);
    }
    let q0 = run::generator(&chain, 0, m, &crate::dto::perm_from(&s.output)?)?;
    let tree = sol.tree.to_tree()?;
    let mut p = FlowTreeProblem::new(build_cover(&tree)?, &chain, sol.metric(s.meta.config.solver.perturb_epsilon), q, q0)?;
    if let Some(l) = s.meta.config.solver.truncation_length {
        p.truncation = l;
    }
    emit(out, stdout, &plot::render(&p, &sol.unknowns)?)?;
    Ok(0)
}
