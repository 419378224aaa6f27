use foldtree::ainfty::{
    compare_hecke, mu, product_table, table_inputs, verify_associativity, verify_unit, MorphismElement, ProductTable,
};
use foldtree::algebra::{HbarSeries, HeckeElement, Permutation};
use foldtree::geom::V2;
use foldtree::morse::{critical_points, Chain, MetricConfig, MorseTuple};
use foldtree::solver::SolverConfig;

const N: u32 = 3;

fn series(c: &[u8]) -> HbarSeries {
    HbarSeries::from_coeffs(c, N).unwrap()
}

fn triple() -> Chain {
    let t = |index, quad, theta, b| MorseTuple { index, quad, theta, b: vec![b], perturbation: Vec::new() };
    Chain {
        kappa: 1,
        radius: 4.0,
        objects: vec![
            t(0, 2.0, V2::new(1.0, 0.0), 0.0),
            t(1, 1.0, V2::new(1.0, 0.0), 0.8),
            t(2, 0.0, V2::new(0.0, 1.0), 0.6),
        ],
        seed: None,
    }
}

fn euclid() -> MetricConfig {
    MetricConfig::euclidean()
}

#[test]
fn merge_of_the_triple() {
    let c = triple();
    let q = [critical_points(&c, 0, 1).unwrap().remove(0), critical_points(&c, 1, 2).unwrap().remove(0)];
    let e = mu(&c, &q, &euclid(), &SolverConfig::default(), N).unwrap();
    assert_eq!(e.terms().count(), 1);
    assert_eq!(e.coeff(&Permutation::identity(1)), HbarSeries::one(N));
    assert_eq!((e.src, e.dst), (0, 2));
}

#[test]
fn mu_rank_two() {
    let c = Chain::wrapped(2, 3, 11);
    let ins = table_inputs(&c).unwrap();
    let id = Permutation::identity(2);
    let s = Permutation::from_images(&[2, 1]).unwrap();
    let cfg = SolverConfig::default();
    let e = mu(&c, &[ins.first[&id].clone(), ins.second[&id].clone()], &euclid(), &cfg, N).unwrap();
    assert_eq!(e, MorphismElement::basis(0, 2, &id, N));
    let e = mu(&c, &[ins.first[&s].clone(), ins.second[&s].clone()], &euclid(), &cfg, N).unwrap();
    assert_eq!(e.coeff(&id), HbarSeries::one(N));
    assert_eq!(e.coeff(&s), series(&[0, 1]));
}

#[test]
fn higher_mu_vanishes_and_mu_one_is_rejected() {
    let c = Chain::wrapped(1, 4, 2);
    let q: Vec<_> = (0..3).map(|i| critical_points(&c, i, i + 1).unwrap().remove(0)).collect();
    let e = mu(&c, &q, &euclid(), &SolverConfig::default(), N).unwrap();
    assert!(e.is_zero());
    assert!(mu(&c, &q[..1], &euclid(), &SolverConfig::default(), N).is_err());
}

#[test]
fn rank_one_table() {
    let t = product_table(&Chain::wrapped(1, 3, 4), N, &euclid(), &SolverConfig::default()).unwrap();
    assert_eq!(t.entries.len(), 1);
    assert!(compare_hecke(&t, N).unwrap().passed());
    assert_eq!(verify_associativity(&t).unwrap().checked, 1);
    assert!(verify_associativity(&t).unwrap().passed());
    assert!(verify_unit(&t).unwrap().passed());
}

/// The H₂ table written out by hand: T_s² = 1 + ħT_s, and T_id is a unit.
#[test]
fn rank_two_table() {
    for seed in [1, 2] {
        let t = product_table(&Chain::wrapped(2, 3, seed), N, &euclid(), &SolverConfig::default()).unwrap();
        let id = Permutation::identity(2);
        let s = Permutation::from_images(&[2, 1]).unwrap();
        let ss = t.get(&s, &s).unwrap();
        assert_eq!(ss.coeff(&id), series(&[1]));
        assert_eq!(ss.coeff(&s), series(&[0, 1]));
        assert_eq!(t.get(&id, &s).unwrap(), &MorphismElement::basis(0, 2, &s, N));
        assert_eq!(t.get(&s, &id).unwrap(), &MorphismElement::basis(0, 2, &s, N));
        assert_eq!(t.get(&id, &id).unwrap(), &MorphismElement::basis(0, 2, &id, N));
        let c = compare_hecke(&t, N).unwrap();
        assert_eq!(c.checked, 4);
        assert!(c.passed());
        let a = verify_associativity(&t).unwrap();
        assert_eq!((a.checked, a.passed()), (8, true));
        assert!(verify_unit(&t).unwrap().passed());
    }
}

fn hecke_table(kappa: usize) -> ProductTable {
    let basis = Permutation::all(kappa);
    let mut cells = Vec::new();
    for a in &basis {
        for b in &basis {
            let h = HeckeElement::basis(a, N).mul(&HeckeElement::basis(b, N)).unwrap();
            let mut e = MorphismElement::zero(0, 2, N);
            for (w, c) in h.terms() {
                e.add_term(w.clone(), *c).unwrap();
            }
            cells.push(((a.clone(), b.clone()), e));
        }
    }
    ProductTable::from_cells(kappa, N, cells)
}

#[test]
fn checks_accept_the_hecke_table_and_catch_a_corruption() {
    let t = hecke_table(3);
    assert!(compare_hecke(&t, N).unwrap().passed());
    assert_eq!(verify_associativity(&t).unwrap().checked, 216);
    assert!(verify_associativity(&t).unwrap().passed());
    assert!(verify_unit(&t).unwrap().passed());

    let mut bad = t.clone();
    let s1 = Permutation::from_images(&[2, 1, 3]).unwrap();
    bad.entries.get_mut(&(s1.clone(), s1.clone())).unwrap().add_term(s1.clone(), series(&[0, 0, 1])).unwrap();
    let c = compare_hecke(&bad, N).unwrap();
    assert_eq!(c.discrepancies.len(), 1);
    assert_eq!((&c.discrepancies[0].left, &c.discrepancies[0].right), (&s1, &s1));
    assert!(!verify_associativity(&bad).unwrap().passed());

    let mut incomplete = t;
    incomplete.entries.remove(&(s1.clone(), s1));
    assert!(!verify_associativity(&incomplete).unwrap().passed());
    assert!(!compare_hecke(&incomplete, N).unwrap().passed());
    assert!(compare_hecke(&incomplete, N + 1).is_err());
}

#[test]
fn add_term_drops_cancelled_terms() {
    let w = Permutation::identity(2);
    let mut e = MorphismElement::basis(0, 1, &w, N);
    e.add_term(w.clone(), HbarSeries::one(N)).unwrap();
    assert!(e.is_zero());
}
