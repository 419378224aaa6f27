use alloc::vec;
use alloc::vec::Vec;

use super::shape::{LeafKind, Shape};
use super::tree::{EdgeClass, FoldedRibbonTree};
use crate::algebra::Permutation;

/// Bounds and filters for [`enumerate`].
#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    pub m: usize,
    pub kappa: usize,
    pub max_marginal: usize,
    /// Bound on internal vertices; `None` means m + 2·max_marginal.
    pub max_internal: Option<usize>,
    /// Only trees whose internal vertices all have degree 3.
    pub trivalent_only: bool,
    /// Fixed decorations for the exterior edges at v₁,…,v_m.
    pub stem_sigma: Option<Vec<Permutation>>,
    /// Give every finite edge length 1.
    pub with_lengths: bool,
}

impl EnumerateOptions {
    pub fn new(m: usize, kappa: usize, max_marginal: usize) -> Self {
        EnumerateOptions {
            m,
            kappa,
            max_marginal,
            max_internal: None,
            trivalent_only: false,
            stem_sigma: None,
            with_lengths: false,
        }
    }
}

/// Every valid decorated topology within the bounds, each exactly once.
///
/// Plane trees rooted at v₀ have no nontrivial automorphisms, so the
/// recursive shape is already a canonical form.
pub fn enumerate(m: usize, kappa: usize, max_marginal: usize, with_lengths: bool) -> Enumerator {
    let mut o = EnumerateOptions::new(m, kappa, max_marginal);
    o.with_lengths = with_lengths;
    Enumerator::new(o)
}

/// Lazy stream of decorated trees.
pub struct Enumerator {
    opts: EnumerateOptions,
    skeletons: Vec<Shape>,
    next_skeleton: usize,
    current: Option<Cursor>,
}

struct Cursor {
    shape: Shape,
    /// Candidate decorations per leaf in walk order.
    choices: Vec<Vec<Permutation>>,
    digits: Vec<usize>,
    done: bool,
}

impl Enumerator {
    pub fn new(opts: EnumerateOptions) -> Self {
        let mut skeletons = Vec::new();
        if opts.m >= 1 && opts.kappa >= 1 {
            let max_internal = opts.max_internal.unwrap_or(opts.m + 2 * opts.max_marginal);
            for xi in 0..=opts.max_marginal {
                let n = opts.m + xi;
                for s in plane_trees(n, opts.trivalent_only) {
                    if s.internal_count() > max_internal {
                        continue;
                    }
                    for marg in subsets(n, xi) {
                        let mut it = marg.iter().peekable();
                        let mut idx = 0;
                        skeletons.push(relabel(&s, &mut idx, &mut |i| {
                            if it.peek() == Some(&&i) {
                                it.next();
                                LeafKind::Marginal
                            } else {
                                LeafKind::Stem
                            }
                        }));
                    }
                }
            }
        }
        Enumerator { opts, skeletons, next_skeleton: 0, current: None }
    }

    fn open(&self, shape: Shape) -> Cursor {
        let k = self.opts.kappa;
        let all = Permutation::all(k);
        let transp = Permutation::transpositions(k);
        let mut stem_no = 0;
        let choices: Vec<Vec<Permutation>> = shape
            .leaves()
            .into_iter()
            .map(|kind| match kind {
                LeafKind::Marginal => transp.clone(),
                LeafKind::Stem => {
                    let c = match &self.opts.stem_sigma {
                        Some(fixed) => vec![fixed[stem_no].clone()],
                        None => all.clone(),
                    };
                    stem_no += 1;
                    c
                }
            })
            .collect();
        let done = choices.iter().any(Vec::is_empty);
        let digits = vec![0; choices.len()];
        Cursor { shape, choices, digits, done }
    }
}

impl Iterator for Enumerator {
    type Item = FoldedRibbonTree;

    fn next(&mut self) -> Option<FoldedRibbonTree> {
        loop {
            if self.current.as_ref().is_none_or(|c| c.done) {
                let s = self.skeletons.get(self.next_skeleton)?.clone();
                self.next_skeleton += 1;
                self.current = Some(self.open(s));
                continue;
            }
            let cur = self.current.as_mut().unwrap();
            let sig: Vec<Permutation> =
                cur.digits.iter().zip(&cur.choices).map(|(&d, c)| c[d].clone()).collect();
            // advance the odometer
            let mut i = cur.digits.len();
            loop {
                if i == 0 {
                    cur.done = true;
                    break;
                }
                i -= 1;
                cur.digits[i] += 1;
                if cur.digits[i] < cur.choices[i].len() {
                    break;
                }
                cur.digits[i] = 0;
            }
            let t = cur.shape.build(self.opts.kappa, &sig).expect("shape and decorations agree");
            let Ok(top) = t.topology() else { continue };
            let ok = top
                .class
                .iter()
                .zip(&t.sigma)
                .all(|(c, s)| *c != EdgeClass::InnerMarginal || !s.is_identity());
            debug_assert!(ok, "topology() accepted an identity marginal edge");
            if !ok {
                continue;
            }
            return Some(if self.opts.with_lengths {
                t.with_default_lengths(1.0).expect("valid tree")
            } else {
                t
            });
        }
    }
}

/// All plane trees with `n` leaves and every internal node having at
/// least two children (exactly two when `binary`).
pub(crate) fn plane_trees(n: usize, binary: bool) -> Vec<Shape> {
    let mut memo: Vec<Vec<Shape>> = vec![Vec::new(); n + 1];
    for k in 1..=n {
        memo[k] = if k == 1 {
            vec![Shape::stem()]
        } else {
            let mut out = Vec::new();
            let max_parts = if binary { 2 } else { k };
            for parts in 2..=max_parts {
                for comp in compositions(k, parts) {
                    let mut acc: Vec<Vec<Shape>> = vec![Vec::new()];
                    for &p in &comp {
                        let mut next = Vec::new();
                        for prefix in &acc {
                            for s in &memo[p] {
                                let mut v = prefix.clone();
                                v.push(s.clone());
                                next.push(v);
                            }
                        }
                        acc = next;
                    }
                    out.extend(acc.into_iter().map(Shape::Node));
                }
            }
            out
        };
    }
    memo.swap_remove(n)
}

fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 1..=n - (parts - 1) {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All `k`-subsets of 0..n in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn relabel(s: &Shape, idx: &mut usize, kind: &mut dyn FnMut(usize) -> LeafKind) -> Shape {
    match s {
        Shape::Leaf(_) => {
            let k = kind(*idx);
            *idx += 1;
            Shape::Leaf(k)
        }
        Shape::Node(c) => Shape::Node(c.iter().map(|x| relabel(x, idx, kind)).collect()),
    }
}
