//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use foldtree::ainfty::{compare_hecke, verify_associativity, verify_unit, MorphismElement, ProductTable};
use foldtree::algebra::{verify_relations, HbarSeries, Permutation};
use foldtree::cover::{build_cover, euler_characteristic};
use foldtree::geom::V2;
use foldtree::morse::{Chain, Generator, MetricConfig};
use foldtree::solver::{
    action_deficit, linearized_collapse, rigid_trees, sample_trajectories, CollapseGraph, CollapseResult, Found,
    FlowTreeProblem, SolverConfig,
};
use foldtree::trees::{enumerate, FoldedRibbonTree, LeafKind, Shape};
use foldtree_cli::config::ConfigFile;
use foldtree_cli::run;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: u32 = 3;
const SEED: u64 = 1;

/// A solved instance: the chain, its inputs and output, and the accepted
/// flow trees.
struct Instance {
    chain: Chain,
    inputs: Vec<Generator>,
    output: Generator,
    solutions: Vec<(FoldedRibbonTree, Found)>,
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn basis(w: &Permutation) -> MorphismElement {
    MorphismElement::basis(0, 2, w, N)
}

/// Table instances: one per (cell, output generator) with at least one
/// candidate tree.
fn table_instances(chain: &Chain, run: &run::TableRun, cfg: &SolverConfig) -> Vec<Instance> {
    let outputs = foldtree::morse::critical_points(chain, 0, 2).unwrap();
    let mut out = Vec::new();
    for cell in &run.cells {
        for q0 in &outputs {
            let inputs = cell.inputs.to_vec();
            if rigid_trees(&inputs, q0, chain.kappa, cfg.max_marginal).is_empty() {
                continue;
            }
            let solutions = cell
                .contributions
                .iter()
                .filter(|c| c.output.perm == q0.perm)
                .map(|c| (c.tree.clone(), c.found.clone()))
                .collect();
            out.push(Instance { chain: chain.clone(), inputs, output: q0.clone(), solutions });
        }
    }
    out
}

fn problem<'a>(i: &'a Instance, t: &FoldedRibbonTree, metric: MetricConfig) -> FlowTreeProblem<'a> {
    FlowTreeProblem::new(build_cover(t).unwrap(), &i.chain, metric, i.inputs.clone(), i.output.clone()).unwrap()
}

fn criterion_1(table: &ProductTable, elapsed: Duration) -> Outcome {
    let bin = env!("CARGO_BIN_EXE_foldtree");
    let start = Instant::now();
    let r = Command::new(bin)
        .args(["verify-hecke", "--kappa", "2", "--truncation", "3", "--seed", &SEED.to_string()])
        .output()
        .expect("run foldtree");
    let cli_time = start.elapsed();
    let stdout = String::from_utf8_lossy(&r.stdout);
    let cli_ok = r.status.code() == Some(0) && stdout.lines().any(|l| l == "T^2 = 1 + h*T: OK");
    let id = Permutation::identity(2);
    let s = Permutation::simple(1, 2).unwrap();
    let mut want = basis(&id);
    want.add_term(s.clone(), HbarSeries::monomial(1, N)).unwrap();
    let ss = table.get(&s, &s) == Some(&want);
    let unit = verify_unit(table).unwrap().passed();
    let fast = cli_time < Duration::from_secs(60) && elapsed < Duration::from_secs(60);
    outcome(
        cli_ok && ss && unit && fast,
        format!(
            "cli exit {:?}, T*T = 1 + hT {ss}, unit {unit}, cli {:.1}s, table {:.1}s",
            r.status.code(),
            cli_time.as_secs_f64(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2(table: &ProductTable, elapsed: Duration) -> Outcome {
    let c = compare_hecke(table, N).unwrap();
    let t1 = basis(&Permutation::simple(1, 3).unwrap());
    let t2 = basis(&Permutation::simple(2, 3).unwrap());
    let w0 = basis(&Permutation::longest(3));
    let l = table.mul(&table.mul(&t1, &t2).unwrap(), &t1).unwrap();
    let r = table.mul(&table.mul(&t2, &t1).unwrap(), &t2).unwrap();
    let braid = l == r && l == w0;
    let golden = std::fs::read_to_string(fixture("table_k3.json"))
        .ok()
        .and_then(|s| serde_json::from_str::<foldtree_cli::dto::TableJson>(&s).ok())
        .and_then(|j| j.to_table().ok())
        .is_some_and(|g| g.entries == table.entries);
    let pass = c.passed() && c.checked == 36 && braid && golden && elapsed < Duration::from_secs(900);
    let mut detail = format!(
        "{}/36 entries match, braid witnesses {braid}, golden fixture {golden}, {:.1}s",
        c.checked - c.discrepancies.len(),
        elapsed.as_secs_f64()
    );
    for d in c.discrepancies.iter().take(3) {
        detail.push_str(&format!("; T{}*T{}: expected {} got {:?}", d.left, d.right, d.expected, d.computed.as_ref().map(|e| e.to_string())));
    }
    outcome(pass, detail)
}

fn random_shape(rng: &mut ChaCha8Rng, depth: usize) -> Shape {
    if depth == 0 || rng.gen_bool(0.35) {
        return if rng.gen_bool(0.75) { Shape::stem() } else { Shape::marginal() };
    }
    let k = rng.gen_range(2..=4);
    Shape::Node((0..k).map(|_| random_shape(rng, depth - 1)).collect())
}

fn criterion_3() -> Outcome {
    let mut checked = 0usize;
    let mut bad = 0usize;
    for m in 1..=3 {
        for kappa in 1..=3 {
            for t in enumerate(m, kappa, 2, false) {
                checked += 1;
                let g = build_cover(&t).unwrap();
                if euler_characteristic(&g) != kappa as i64 - t.marginal_vertex_count() as i64 {
                    bad += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut random = 0;
    while random < 1000 {
        let kappa = rng.gen_range(4..=6);
        let shape = Shape::Node((0..rng.gen_range(3..=5)).map(|_| random_shape(&mut rng, 3)).collect());
        let leaves = shape.leaves();
        if !leaves.contains(&LeafKind::Stem) {
            continue;
        }
        let perms = Permutation::all(kappa);
        let transp = Permutation::transpositions(kappa);
        let sigma: Vec<Permutation> = leaves
            .iter()
            .map(|k| match k {
                LeafKind::Stem => perms[rng.gen_range(0..perms.len())].clone(),
                LeafKind::Marginal => transp[rng.gen_range(0..transp.len())].clone(),
            })
            .collect();
        let Ok(t) = shape.build(kappa, &sigma) else { continue };
        if !t.validate().is_valid() {
            continue;
        }
        random += 1;
        let g = build_cover(&t).unwrap();
        if euler_characteristic(&g) != kappa as i64 - t.marginal_vertex_count() as i64 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{checked} enumerated and {random} random trees, {bad} exceptions"))
}

fn rk4(f: &dyn Fn(V2) -> V2, mut x: V2, t: f64, steps: usize) -> V2 {
    let h = t / steps as f64;
    for _ in 0..steps {
        let k1 = f(x);
        let k2 = f(x + (h / 2.0) * k1);
        let k3 = f(x + (h / 2.0) * k2);
        let k4 = f(x + h * k3);
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    x
}

/// Dense-grid minimizer of the three stem defects of a Y-merge, from the
/// gradients of f₀ = 2r², f₁ = r² + 0.8x₁, f₂ = 0.6x₂ written out by hand.
fn brute_force_merge(r: f64) -> V2 {
    let (q1, q2, q0) = (V2::new(0.4, 0.0), V2::new(-0.4, 0.3), V2::new(0.0, 0.15));
    let defect = |x: V2| {
        let d1 = rk4(&|y| -2.0 * (y - q1), x, 20.0, 400) - q1;
        let d2 = rk4(&|y| -2.0 * (y - q2), x, 20.0, 400) - q2;
        let d0 = rk4(&|y| 4.0 * (y - q0), x, 1.0, 100) - q0;
        d1.norm() + d2.norm() + d0.norm()
    };
    let mut best = V2::ZERO;
    let (mut center, mut half, mut n) = (V2::ZERO, r, 161);
    for _ in 0..3 {
        let step = 2.0 * half / (n - 1) as f64;
        let mut val = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                let x = center + V2::new(-half + i as f64 * step, -half + j as f64 * step);
                if x.norm() <= r {
                    let d = defect(x);
                    if d < val {
                        val = d;
                        best = x;
                    }
                }
            }
        }
        center = best;
        half = 2.0 * step;
        n = 41;
    }
    best
}

fn triple_instance() -> Result<Instance, String> {
    let file = ConfigFile::load(&fixture("triple.json")).map_err(|e| e.to_string())?;
    let chain = file.chain.ok_or("fixture has no chain")?.to_chain().map_err(|e| e.to_string())?;
    let id = Permutation::identity(1);
    let inputs = vec![run::generator(&chain, 0, 1, &id).unwrap(), run::generator(&chain, 1, 2, &id).unwrap()];
    let output = run::generator(&chain, 0, 2, &id).unwrap();
    let r = run::solve(&chain, &inputs, &output, &MetricConfig::euclidean(), &SolverConfig::default(), workers())
        .map_err(|e| e.to_string())?;
    Ok(Instance { chain, inputs, output, solutions: r.solutions })
}

fn criterion_4(inst: &Instance) -> Outcome {
    let r = inst.chain.radius;
    let oracle = brute_force_merge(r);
    if inst.solutions.len() != 1 {
        return outcome(false, format!("{} solutions", inst.solutions.len()));
    }
    let f = &inst.solutions[0].1;
    let merge = f.vertex_positions.iter().map(|&(_, x)| (x - oracle).norm()).fold(f64::INFINITY, f64::min);
    outcome(
        merge <= 1e-4 * r && f.residual_norm < 1e-10,
        format!("1 solution, merge point off the grid oracle by {merge:.2e}, residual {:.1e}", f.residual_norm),
    )
}

fn criterion_5(all: &[&Instance]) -> Outcome {
    let (mut count, mut worst_sign, mut worst_gap) = (0, f64::NEG_INFINITY, 0.0f64);
    let mut errors = 0;
    for inst in all {
        for (t, f) in &inst.solutions {
            count += 1;
            match action_deficit(&problem(inst, t, f.metric.clone()), &f.unknowns) {
                Ok((gen, quad)) => {
                    worst_sign = worst_sign.max(gen);
                    worst_gap = worst_gap.max((gen - quad).abs());
                }
                Err(_) => errors += 1,
            }
        }
    }
    outcome(
        count > 0 && errors == 0 && worst_sign <= 1e-9 && worst_gap <= 1e-8,
        format!("{count} solutions, max deficit {worst_sign:.3e}, max side gap {worst_gap:.1e}, {errors} errors"),
    )
}

fn criterion_6(all: &[&Instance], cfg: &SolverConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut instances, mut vectors, mut worst) = (0, 0, 0.0f64);
    for inst in all {
        let trees = rigid_trees(&inst.inputs, &inst.output, inst.chain.kappa, cfg.max_marginal);
        if trees.is_empty() {
            continue;
        }
        instances += 1;
        let problems: Vec<FlowTreeProblem> = trees.iter().map(|t| problem(inst, t, MetricConfig::euclidean())).collect();
        let r = inst.chain.radius;
        for v in 0..100 {
            let p = &problems[v % problems.len()];
            let n = p.layout.unknowns();
            let k2 = 2 * inst.chain.kappa;
            let u: Vec<f64> = (0..n)
                .map(|i| if i < k2 { rng.gen_range(-0.4 * r..0.4 * r) } else { rng.gen_range(0.02..1.5) })
                .collect();
            let Ok(shot) = p.shoot(&u) else { continue };
            vectors += 1;
            let h = 1e-6;
            let (mut err, mut size) = (0.0f64, 1.0f64);
            for k in 0..n {
                let (mut a, mut b) = (u.clone(), u.clone());
                a[k] += h;
                b[k] -= h;
                let (ra, rb) = (p.residual(&a).unwrap(), p.residual(&b).unwrap());
                for i in 0..ra.len() {
                    let j = shot.jacobian.get(i, k);
                    err = err.max(((ra[i] - rb[i]) / (2.0 * h) - j).abs());
                    size = size.max(j.abs());
                }
            }
            worst = worst.max(err / size);
        }
    }
    outcome(
        worst < 1e-6 && vectors == 100 * instances,
        format!("{instances} instances, {vectors} vectors, worst relative error {worst:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut empty = 0;
    while empty < 1000 {
        let df = V2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let dg = V2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        if df.cross(dg) == 0.0 {
            continue;
        }
        if !linearized_collapse(&CollapseGraph::two_gradient_cycle(df, dg)).unwrap().is_empty() {
            return outcome(false, format!("nonempty for {df:?}, {dg:?}"));
        }
        empty += 1;
    }
    let family = match linearized_collapse(&CollapseGraph::two_gradient_cycle(V2::new(2.0, 0.0), V2::new(1.0, 0.0))).unwrap() {
        CollapseResult::Family { dimension: 1, rays } => {
            let zero = BigRational::from_integer(0.into());
            rays.len() == 2 && rays.iter().all(|r| r[0] == &r[1] + &r[2] && r.iter().all(|x| *x >= zero))
        }
        _ => false,
    };
    let t = start.elapsed();
    outcome(
        family && t < Duration::from_secs(10),
        format!("1000 non-parallel empty, (2,0)/(1,0) family x1 = x2 + x3 {family}, {:.2}s", t.as_secs_f64()),
    )
}

fn criterion_8(tables: &[&ProductTable]) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (t, want) in tables.iter().zip([1, 8, 216]) {
        let r = verify_associativity(t).unwrap();
        pass &= r.passed() && r.checked == want;
        parts.push(format!("kappa {}: {}/{}", t.kappa, r.checked - r.failures.len(), r.checked));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_9(all: &[&Instance]) -> Outcome {
    let (mut count, mut points, mut outside, mut worst) = (0, 0, 0, 0.0f64);
    for inst in all {
        let r = inst.chain.radius;
        for (t, f) in &inst.solutions {
            count += 1;
            let traj = sample_trajectories(&problem(inst, t, f.metric.clone()), &f.unknowns, 64).unwrap();
            for x in traj.iter().flat_map(|t| &t.points) {
                points += 1;
                worst = worst.max(x.norm());
                if x.norm() > r {
                    outside += 1;
                }
            }
        }
    }
    outcome(count > 0 && outside == 0, format!("{count} solutions, {points} samples, max |x| {worst:.4}, {outside} outside"))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut checks = 0;
    let mut pass = true;
    for kappa in 1..=4 {
        for n in 0..=3 {
            let r = verify_relations(kappa, n).unwrap();
            pass &= r.passed();
            checks += 1;
        }
    }
    let t = start.elapsed();
    outcome(pass && t < Duration::from_secs(5), format!("{checks} (kappa, N) pairs, {:.2}s", t.as_secs_f64()))
}

fn main() {
    let mut lines: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |n: usize, name: &'static str, o: Outcome| {
        println!("criterion {n:>2} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        lines.push((n, name, o));
    };
    report(10, "Hecke relations, kappa <= 4, N <= 3", criterion_10());
    report(7, "linearized collapse criterion", criterion_7());
    report(3, "Euler characteristic identity", criterion_3());

    let cfg = SolverConfig { seed: SEED, ..SolverConfig::default() };
    let metric = MetricConfig::euclidean();
    let c1 = Chain::wrapped(1, 3, SEED);
    let t1 = run::table(&c1, N, &metric, &cfg, workers()).unwrap();
    let c2 = Chain::wrapped(2, 3, SEED);
    let start = Instant::now();
    let t2 = run::table(&c2, N, &metric, &cfg, workers()).unwrap();
    let e2 = start.elapsed();
    report(1, "Hecke kappa=2", criterion_1(&t2.table, e2));

    let c3 = Chain::wrapped(3, 3, SEED);
    let start = Instant::now();
    let t3 = run::table(&c3, N, &metric, &cfg, workers()).unwrap();
    let e3 = start.elapsed();
    report(2, "Hecke kappa=3", criterion_2(&t3.table, e3));

    let triple = triple_instance();
    match &triple {
        Ok(i) => report(4, "flow-tree oracle, kappa=1 triple", criterion_4(i)),
        Err(e) => report(4, "flow-tree oracle, kappa=1 triple", outcome(false, e.clone())),
    }

    let mut instances = table_instances(&c1, &t1, &cfg);
    instances.extend(table_instances(&c2, &t2, &cfg));
    instances.extend(table_instances(&c3, &t3, &cfg));
    let mut all: Vec<&Instance> = instances.iter().collect();
    if let Ok(i) = &triple {
        all.push(i);
    }
    report(5, "action deficit", criterion_5(&all));
    report(6, "shooting Jacobian", criterion_6(&all, &cfg));
    report(8, "associativity", criterion_8(&[&t1.table, &t2.table, &t3.table]));
    report(9, "C0 bound", criterion_9(&all));

    lines.sort_by_key(|l| l.0);
    let failed: Vec<usize> = lines.iter().filter(|l| !l.2.pass).map(|l| l.0).collect();
    println!();
    for (n, name, o) in &lines {
        println!("criterion {n:>2}: {} ({name})", if o.pass { "PASS" } else { "FAIL" });
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
