use foldtree::algebra::{verify_relations, HbarSeries, HeckeElement, Permutation};
use proptest::prelude::*;

fn perm(v: &[usize]) -> Permutation {
    Permutation::from_images(v).unwrap()
}

/// Inversion count straight from the definition.
fn inversions(p: &Permutation) -> usize {
    let im = p.images();
    let mut n = 0;
    for i in 0..im.len() {
        for j in i + 1..im.len() {
            n += (im[i] > im[j]) as usize;
        }
    }
    n
}

fn any_perm(kappa: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=kappa).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| perm(&v))
}

#[test]
fn longest_element_of_s3_has_length_three() {
    let longest = Permutation::all(3).into_iter().max_by_key(inversions).unwrap();
    assert_eq!(longest, Permutation::longest(3));
    assert_eq!(longest.coxeter_length(), 3);
}

#[test]
fn three_cycle_composition() {
    let p = Permutation::transposition(1, 2, 3).unwrap().compose(&Permutation::transposition(2, 3, 3).unwrap()).unwrap();
    assert_eq!(p.images(), vec![2, 3, 1]);
}

#[test]
fn transposition_fixes_the_rest() {
    let t = Permutation::transposition(2, 3, 4).unwrap();
    assert_eq!(t.images(), vec![1, 3, 2, 4]);
    assert!(t.compose(&t).unwrap().is_identity());
    assert!(Permutation::transposition(3, 3, 4).is_err());
    assert!(Permutation::transposition(1, 5, 4).is_err());
}

#[test]
fn series_examples() {
    let n = 3;
    let a = HbarSeries::from_coeffs(&[1, 1], n).unwrap();
    assert!(a.add(&a).unwrap().is_zero());
    assert_eq!(a.mul(&a).unwrap(), HbarSeries::from_coeffs(&[1, 0, 1], n).unwrap());
    assert!(HbarSeries::monomial(n, n).mul(&HbarSeries::monomial(1, n)).unwrap().is_zero());
    assert!(a.add(&HbarSeries::one(2)).is_err());
}

#[test]
fn relation_reports() {
    for (k, n) in [(2, 3), (3, 3), (4, 2), (4, 3)] {
        let r = verify_relations(k, n).unwrap();
        assert!(r.passed(), "κ={k} N={n}: {:?}", r.failures);
    }
}

#[test]
fn associativity_exhaustive_small_ranks() {
    for k in 1..=4 {
        let order = 3;
        let basis: Vec<HeckeElement> = Permutation::all(k).iter().map(|w| HeckeElement::basis(w, order)).collect();
        let pairs: Vec<Vec<HeckeElement>> =
            basis.iter().map(|u| basis.iter().map(|v| u.mul(v).unwrap()).collect()).collect();
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                for w in &basis {
                    let left = pairs[i][j].mul(w).unwrap();
                    let right = u.mul(&v.mul(w).unwrap()).unwrap();
                    assert_eq!(left, right, "κ={k}");
                }
            }
        }
    }
}

/// At ħ = 0 the Hecke algebra is the group algebra: T_u·T_v = T_{uv}.
#[test]
fn hbar_zero_is_the_group_algebra() {
    for k in 1..=3 {
        for u in Permutation::all(k) {
            for v in Permutation::all(k) {
                let p = HeckeElement::basis(&u, 0).mul(&HeckeElement::basis(&v, 0)).unwrap();
                assert_eq!(p, HeckeElement::basis(&u.compose(&v).unwrap(), 0), "{u} {v}");
            }
        }
    }
}

/// Brute-force ħ-expansion: expand T_u one simple factor at a time using
/// only T_s² = 1 + ħT_s, tracking words rather than normal forms.
#[test]
fn products_agree_with_word_expansion() {
    fn expand(word: &[usize], w: &Permutation, order: u32) -> Vec<(Permutation, u32)> {
        // returns monomials c·ħ^d·T_x with multiplicity, before mod-2 reduction
        let Some((&s, rest)) = word.split_last() else { return vec![(w.clone(), 0)] };
        let k = w.rank();
        // multiplicities cancel mod 2 when the caller sums them
        let sp = Permutation::simple(s, k).unwrap();
        let mut out = Vec::new();
        // T_rest·(T_s·T_w)
        let sw = sp.compose(w).unwrap();
        let mut inner = vec![(sw.clone(), 0)];
        if inversions(&sw) < inversions(w) {
            inner.push((w.clone(), 1));
        }
        for (x, d) in inner {
            for (y, e) in expand(rest, &x, order) {
                if d + e <= order {
                    out.push((y, d + e));
                }
            }
        }
        out
    }
    let order = 3;
    for k in 2..=3 {
        for u in Permutation::all(k) {
            for v in Permutation::all(k) {
                let mut expect = HeckeElement::zero(k, order);
                for (x, d) in expand(&u.reduced_word(), &v, order) {
                    expect.add_term(x, HbarSeries::monomial(d, order)).unwrap();
                }
                let got = HeckeElement::basis(&u, order).mul(&HeckeElement::basis(&v, order)).unwrap();
                assert_eq!(got, expect, "{u} * {v}");
            }
        }
    }
}

proptest! {
    #[test]
    fn compose_with_inverse_is_identity(k in 1usize..7, seed in any::<u64>()) {
        let all = Permutation::all(k.min(5));
        let p = &all[(seed as usize) % all.len()];
        prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        prop_assert!(p.inverse().compose(p).unwrap().is_identity());
    }

    #[test]
    fn simple_reflections_change_length_by_one(p in (2usize..7).prop_flat_map(any_perm), i in 1usize..6) {
        let k = p.rank();
        prop_assume!(i < k);
        let s = Permutation::simple(i, k).unwrap();
        let a = s.compose(&p).unwrap().coxeter_length() as i64;
        let b = p.coxeter_length() as i64;
        prop_assert_eq!((a - b).abs(), 1);
        prop_assert_eq!(p.coxeter_length(), inversions(&p));
    }

    #[test]
    fn reduced_words_have_length_many_letters(p in (1usize..7).prop_flat_map(any_perm)) {
        let w = p.reduced_word();
        prop_assert_eq!(w.len(), p.coxeter_length());
        let mut q = Permutation::identity(p.rank());
        for &i in w.iter().rev() {
            q = Permutation::simple(i, p.rank()).unwrap().compose(&q).unwrap();
        }
        prop_assert_eq!(q, p);
    }

    #[test]
    fn series_ring_axioms(a in prop::collection::vec(0u8..2, 0..8), b in prop::collection::vec(0u8..2, 0..8), c in prop::collection::vec(0u8..2, 0..8), n in 0u32..7) {
        let (a, b, c) = (
            HbarSeries::from_coeffs(&a, n).unwrap(),
            HbarSeries::from_coeffs(&b, n).unwrap(),
            HbarSeries::from_coeffs(&c, n).unwrap(),
        );
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
    }
}
