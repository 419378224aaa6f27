use std::path::PathBuf;
use std::process::{Command, Output};

use foldtree::algebra::Permutation;
use foldtree::cover::build_cover;
use foldtree::morse::{critical_points, MetricConfig};
use foldtree::solver::FlowTreeProblem;
use foldtree::trees::Shape;
use foldtree_cli::config::ConfigFile;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn foldtree(args: &[&str]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_foldtree"));
    for v in ["FOLDTREE_CONFIG", "FOLDTREE_SEED", "FOLDTREE_WORKERS", "FOLDTREE_TRUNCATION"] {
        c.env_remove(v);
    }
    c.args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn summary_count(o: &Output) -> u64 {
    let last = stdout(o).lines().last().unwrap().to_owned();
    let v: Value = serde_json::from_str(&last).unwrap();
    v["summary"]["count"].as_u64().unwrap()
}

fn without_meta(mut v: Value) -> Value {
    if let Some(m) = v.as_object_mut() {
        m.remove("meta");
    }
    v
}

fn read_json(p: &PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn enumerate_counts() {
    let o = foldtree(&["enumerate", "--m", "1", "--kappa", "2"]);
    assert!(o.status.success());
    assert_eq!(summary_count(&o), 2);
    let o = foldtree(&["enumerate", "--m", "2", "--kappa", "1"]);
    assert_eq!(summary_count(&o), 1);
    // meta line, trees, summary
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(foldtree(&["enumerate", "--m", "0", "--kappa", "1"]).status.code(), Some(2));
    assert_eq!(foldtree(&["solve", "--input", "1,1", "--output", "1,2"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"seed\": ").unwrap();
    let o = foldtree(&["--config", bad.to_str().unwrap(), "enumerate", "--m", "1", "--kappa", "1"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&bad, "{\"sed\": 3}").unwrap();
    let o = foldtree(&["--config", bad.to_str().unwrap(), "enumerate", "--m", "1", "--kappa", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_hecke_small_ranks() {
    let o = foldtree(&["verify-hecke", "--kappa", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result: PASS"));
    let o = foldtree(&["verify-hecke", "--kappa", "2", "--truncation", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "T^2 = 1 + h*T: OK"));
}

#[test]
fn repeated_b_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dup.json");
    std::fs::write(
        &cfg,
        r#"{"chain":{"kappa":3,"R":4.0,"objects":[
            {"index":0,"theta":[1.0,0.0],"B":[0.1,0.1,0.3]},
            {"index":1,"theta":[1.0,0.0],"B":[0.2,0.4,0.6]},
            {"index":2,"theta":[0.0,1.0],"B":[0.3,0.5,0.7]},
            {"index":3,"theta":[0.0,1.0],"B":[0.2,0.1,0.3]}]}}"#,
    )
    .unwrap();
    let o = foldtree(&["--config", cfg.to_str().unwrap(), "verify-hecke", "--kappa", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonvanishing"));
}

#[test]
fn triple_solve_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    let svg = dir.path().join("sol.svg");
    let cfg = fixture("triple.json");
    let o = foldtree(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        sol.to_str().unwrap(),
        "solve",
        "--input",
        "1",
        "--input",
        "1",
        "--output",
        "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&sol);
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 1);
    assert!(sols[0]["residual"].as_f64().unwrap() < 1e-10);

    let o = foldtree(&["--out", svg.to_str().unwrap(), "plot", "--solution", sol.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&svg).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.contains("<polyline")).collect();
    assert_eq!(lines.len(), 3);
    for l in lines {
        let pts = l.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert!(pts.split_whitespace().count() >= 64);
    }
}

#[test]
fn empty_moduli_is_not_an_error() {
    let o = foldtree(&["solve", "--input", "1,2", "--input", "1,2", "--output", "2,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["solutions"].as_array().unwrap().is_empty());
}

#[test]
fn output_is_reproducible() {
    let args = ["solve", "--input", "2,1", "--input", "2,1", "--output", "2,1"];
    let a = foldtree(&[&["--workers", "1"][..], &args].concat());
    let b = foldtree(&[&["--workers", "2"][..], &args].concat());
    let c = foldtree(&[&["--workers", "2"][..], &args].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 1);
}

#[test]
fn tables_match_golden_files() {
    for (k, name) in [("1", "table_k1.json"), ("2", "table_k2.json")] {
        let o = foldtree(&["table", "--kappa", k]);
        assert!(o.status.success());
        let got: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(without_meta(got), without_meta(read_json(&fixture(name))), "kappa {k}");
    }
}

#[test]
fn covers_match_golden_files() {
    for (tree, cover) in [
        ("tree_marginal_leaf.json", "cover_marginal_leaf.json"),
        ("tree_inner_marginal.json", "cover_inner_marginal.json"),
    ] {
        let o = foldtree(&["cover", "--tree", fixture(tree).to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let got: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(without_meta(got), without_meta(read_json(&fixture(cover))), "{tree}");
    }
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"seed": 5, "truncation": 2}"#).unwrap();
    let seed = |o: Output| {
        let first = stdout(&o).lines().next().unwrap().to_owned();
        let v: Value = serde_json::from_str(&first).unwrap();
        (v["seed"].as_u64().unwrap(), v["config"]["truncation"].as_u64().unwrap())
    };
    let base = ["enumerate", "--m", "1", "--kappa", "1"];
    let path = cfg.to_str().unwrap();
    assert_eq!(seed(foldtree(&base)), (1, 3));
    assert_eq!(seed(foldtree(&[&["--config", path][..], &base].concat())), (5, 2));

    let with_env = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_foldtree"))
            .env("FOLDTREE_CONFIG", path)
            .env("FOLDTREE_SEED", "7")
            .env_remove("FOLDTREE_TRUNCATION")
            .args(args)
            .output()
            .unwrap()
    };
    assert_eq!(seed(with_env(&base)), (7, 2));
    assert_eq!(seed(with_env(&[&["--seed", "9", "--truncation", "1"][..], &base].concat())), (9, 1));
}

#[test]
fn plot_of_a_constant_solution() {
    let file = ConfigFile::load(&fixture("triple.json")).unwrap();
    let chain = file.chain.unwrap().to_chain().unwrap();
    let q = critical_points(&chain, 0, 1).unwrap().remove(0);
    let t = Shape::stem().build(1, &[Permutation::identity(1)]).unwrap();
    let p = FlowTreeProblem::new(build_cover(&t).unwrap(), &chain, MetricConfig::euclidean(), vec![q.clone()], q.clone())
        .unwrap();
    let svg = foldtree_cli::plot::render(&p, &q.point(1).to_array()).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 1);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}
