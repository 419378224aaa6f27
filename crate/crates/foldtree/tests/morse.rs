use approx::assert_abs_diff_eq;
use foldtree::algebra::Permutation;
use foldtree::geom::V2;
use foldtree::morse::{action, critical_points, gradient_field, grading, Bump, Chain, MetricConfig, MorseTuple};
use proptest::prelude::*;

fn tuple(index: usize, quad: f64, theta: V2, b: &[f64]) -> MorseTuple {
    MorseTuple { index, quad, theta, b: b.to_vec(), perturbation: Vec::new() }
}

fn chain(kappa: usize, objects: Vec<MorseTuple>) -> Chain {
    Chain { kappa, radius: 4.0, objects, seed: None }
}

/// f₀ = 2r², f₁ = r² + x₁.
fn pair() -> Chain {
    chain(1, vec![tuple(0, 2.0, V2::new(1.0, 0.0), &[0.0]), tuple(1, 1.0, V2::new(1.0, 0.0), &[1.0])])
}

#[test]
fn single_pair_generator() {
    let g = critical_points(&pair(), 0, 1).unwrap();
    assert_eq!(g.len(), 1);
    assert_abs_diff_eq!(g[0].point(1).x, 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(g[0].point(1).y, 0.0, epsilon = 1e-15);
    assert_eq!(g[0].grading, 0);
    assert_abs_diff_eq!(g[0].action, 0.25, epsilon = 1e-15);
}

#[test]
fn field_examples() {
    let c = pair();
    let (a, b) = gradient_field(&c, 0, 1, 1, 1, None).unwrap().affine().unwrap();
    assert_eq!((a, b), (-2.0, V2::new(1.0, 0.0)));
    let w = Chain::wrapped(3, 2, 5);
    let o = &w.objects[1];
    let (a, b) = gradient_field(&w, 1, 1, 1, 3, None).unwrap().affine().unwrap();
    assert_eq!(a, 0.0);
    assert_abs_diff_eq!(b.x, (o.b[2] - o.b[0]) * o.theta.x, epsilon = 1e-15);
    assert_abs_diff_eq!(b.y, (o.b[2] - o.b[0]) * o.theta.y, epsilon = 1e-15);
    let f = gradient_field(&w, 1, 2, 1, 2, None).unwrap();
    assert_eq!(f.eval(V2::new(0.3, -1.2)), V2::ZERO);
    assert!(gradient_field(&w, 0, 4, 1, 1, None).is_err());
    assert!(gradient_field(&w, 0, 1, 2, 1, None).is_err());
}

#[test]
fn action_examples() {
    let zero = chain(1, vec![tuple(0, 2.0, V2::new(1.0, 0.0), &[0.0]), tuple(1, 1.0, V2::new(0.0, 1.0), &[0.0])]);
    let g = &critical_points(&zero, 0, 1).unwrap()[0];
    assert_eq!(g.point(1), V2::ZERO);
    assert_eq!(action(&zero, g), 0.0);

    // two sheets with the identity matching: the action splits over sheets
    let th = V2::from_angle(0.4);
    let two = chain(2, vec![tuple(0, 2.0, th, &[0.5, -0.3]), tuple(1, 1.0, th, &[0.2, -0.6])]);
    let gid = critical_points(&two, 0, 1).unwrap().into_iter().find(|g| g.perm.is_identity()).unwrap();
    let single = |b0: f64, b1: f64| {
        let c = chain(1, vec![tuple(0, 2.0, th, &[b0]), tuple(1, 1.0, th, &[b1])]);
        critical_points(&c, 0, 1).unwrap()[0].action
    };
    assert_abs_diff_eq!(gid.action, single(0.5, 0.2) + single(-0.3, -0.6), epsilon = 1e-14);
}

/// f₁ = r² plus two bumps placed symmetrically about the origin, so the
/// origin stays critical for f₁ − f₀ with f₀ = 2r².
fn bumped(bumps: Vec<Bump>) -> Chain {
    let mut f1 = tuple(1, 1.0, V2::new(1.0, 0.0), &[0.0]);
    f1.perturbation = vec![bumps];
    chain(1, vec![tuple(0, 2.0, V2::new(1.0, 0.0), &[0.0]), f1])
}

#[test]
fn saddle_has_coindex_one() {
    // at ρ² = 0.8 each bump curves up radially and down tangentially
    let c = 0.8f64.sqrt();
    let b = |x: f64| Bump { amplitude: 0.1, center: V2::new(x, 0.0), radius: 1.0 };
    let ch = bumped(vec![b(c), b(-c)]);
    let g = &critical_points(&ch, 0, 1).unwrap()[0];
    assert!(g.point(1).norm() < 1e-12);
    assert_eq!(g.grading, 1);
    assert_eq!(grading(&ch, g).unwrap(), 1);
}

#[test]
fn minimum_has_coindex_two() {
    let ch = bumped(vec![Bump { amplitude: -2.0, center: V2::ZERO, radius: 1.0 }]);
    let g = &critical_points(&ch, 0, 1).unwrap()[0];
    assert!(g.point(1).norm() < 1e-12);
    assert_eq!(g.grading, 2);
}

#[test]
fn equal_quadratic_parts_are_degenerate() {
    let ch = chain(1, vec![tuple(0, 1.0, V2::new(1.0, 0.0), &[0.0]), tuple(1, 1.0, V2::new(1.0, 0.0), &[0.5])]);
    assert!(critical_points(&ch, 0, 1).is_err());
    assert!(critical_points(&ch, 1, 0).is_err());
}

#[test]
fn repeated_b_fails_the_object_check() {
    let ch = chain(2, vec![tuple(0, 2.0, V2::new(1.0, 0.0), &[0.3, 0.3]), tuple(1, 1.0, V2::new(1.0, 0.0), &[0.1, 0.2])]);
    let r = ch.check_objects();
    assert!(!r.passed());
    assert!(r.failures[0].contains("nonvanishing"));
}

#[test]
fn metric_perturbation_is_local_and_small() {
    let ch = Chain::wrapped(2, 3, 9);
    let m = MetricConfig::random([0, 1, 2], 1e-3, 4);
    for e in 0..3 {
        let p = m.on_edge(e).unwrap();
        let [(l0, _), (l1, _)] = p.sym_eigen();
        assert!(l0.abs().max(l1.abs()) <= 1e-3 + 1e-15);
    }
    let plain = gradient_field(&ch, 0, 1, 2, 2, None).unwrap();
    let bent = gradient_field(&ch, 0, 1, 2, 2, m.on_edge(1)).unwrap();
    for x in [V2::new(4.0, 0.0), V2::new(-3.0, 3.5), V2::new(0.0, -7.0)] {
        assert_eq!(plain.eval(x), bent.eval(x));
    }
    let inside = V2::new(0.2, 0.1);
    assert!((plain.eval(inside) - bent.eval(inside)).norm() > 0.0);
    assert!((plain.eval(inside) - bent.eval(inside)).norm() < 1e-2);
}

/// Central differences of the field against the analytic Jacobian, with a
/// metric perturbation switched on.
#[test]
fn field_jacobian_matches_differences() {
    let ch = Chain::wrapped(2, 3, 2);
    let m = MetricConfig::random([0], 0.05, 1);
    let f = gradient_field(&ch, 0, 1, 2, 2, m.on_edge(0)).unwrap();
    let x = V2::new(0.7, -1.1);
    let j = f.jacobian(x);
    let h = 1e-6;
    for (k, e) in [V2::new(1.0, 0.0), V2::new(0.0, 1.0)].into_iter().enumerate() {
        let d = (1.0 / (2.0 * h)) * (f.eval(x + h * e) - f.eval(x - h * e));
        assert_abs_diff_eq!(d.x, j.m[0][k], epsilon = 1e-7);
        assert_abs_diff_eq!(d.y, j.m[1][k], epsilon = 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wrapped_data_conditions(kappa in 1usize..5, seed in any::<u64>()) {
        let ch = Chain::wrapped(kappa, 3, seed);
        prop_assert!(ch.check_c4().passed());
        prop_assert!(ch.check_c2(64).passed());
        prop_assert!(ch.check_c3(64, 1.0).passed());
        for o in &ch.objects {
            for j in 0..kappa {
                for k in j + 1..kappa {
                    prop_assert!((o.b[j] - o.b[k]).abs() > 0.0);
                }
            }
        }
    }

    #[test]
    fn wrapped_generators(kappa in 1usize..4, seed in any::<u64>(), src in 0usize..2) {
        let ch = Chain::wrapped(kappa, 3, seed);
        let gens = critical_points(&ch, src, 2).unwrap();
        prop_assert_eq!(gens.len(), Permutation::all(kappa).len());
        for g in &gens {
            prop_assert_eq!(g.grading, 0);
            for j in 1..=kappa {
                let f = gradient_field(&ch, src, j, 2, g.perm.apply(j), None).unwrap();
                prop_assert!(f.eval(g.point(j)).norm() < 1e-12);
            }
        }
    }

    /// Relabeling sheets by π in both objects sends (points, σ) to
    /// (points∘π, π⁻¹σπ) and leaves the action unchanged.
    #[test]
    fn action_is_invariant_under_relabeling(seed in any::<u64>(), which in 0usize..6) {
        let ch = Chain::wrapped(3, 2, seed);
        let pi = &Permutation::all(3)[which];
        let mut re = ch.clone();
        for o in &mut re.objects {
            o.b = (1..=3).map(|j| ch.objects[o.index].b[pi.apply(j) - 1]).collect();
        }
        for g in critical_points(&ch, 0, 1).unwrap() {
            let perm = pi.inverse().compose(&g.perm).unwrap().compose(pi).unwrap();
            let mut h = g.clone();
            h.perm = perm;
            h.points = (1..=3).map(|j| g.point(pi.apply(j))).collect();
            prop_assert!((action(&re, &h) - g.action).abs() < 1e-12);
        }
    }
}
