//! Linearized flow graphs of collapsing subgraphs.
//!
//! Edge ẽ of a lifted subgraph carries a constant gradient v_ẽ and the
//! length l(e) of its base edge. Positions φ with φ(end) − φ(start) = v_ẽ·l(e)
//! exist iff the signed sum around every cycle vanishes, so the solution
//! set is the cone {l ≥ 0, Ml = 0} cut by the unit sphere.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::geom::V2;
use crate::Error;

/// A lifted edge over the collapsing subgraph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollapseEdge {
    pub src: usize,
    pub dst: usize,
    /// Index of the base edge length variable.
    pub length: usize,
    pub gradient: V2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseGraph {
    pub vertices: usize,
    pub lengths: usize,
    pub edges: Vec<CollapseEdge>,
}

/// Solution set on the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub enum CollapseResult {
    Empty,
    /// A single point, spanned by the given ray.
    Isolated(Vec<BigRational>),
    /// A family of the given dimension, with the extreme rays of its cone.
    Family { dimension: usize, rays: Vec<Vec<BigRational>> },
}

impl CollapseResult {
    pub fn is_empty(&self) -> bool {
        matches!(self, CollapseResult::Empty)
    }
}

impl CollapseGraph {
    /// One strand pair over a core edge (length x₁) with two flipped strand
    /// pairs over marginal edges (x₂, x₃), closing up into a cycle whose
    /// constraint is x₁·df − (x₁ + x₂ + x₃)·dg = 0.
    pub fn two_gradient_cycle(df: V2, dg: V2) -> Self {
        let e = |src, dst, length, gradient| CollapseEdge { src, dst, length, gradient };
        CollapseGraph {
            vertices: 4,
            lengths: 3,
            edges: vec![
                e(0, 1, 0, df - dg),
                e(1, 2, 0, V2::ZERO),
                e(2, 3, 1, -dg),
                e(3, 0, 2, -dg),
            ],
        }
    }

    /// A single edge with one length.
    pub fn single_edge(gradient: V2) -> Self {
        CollapseGraph { vertices: 2, lengths: 1, edges: vec![CollapseEdge { src: 0, dst: 1, length: 0, gradient }] }
    }
}

fn exact(x: f64) -> Result<BigRational, Error> {
    BigRational::from_float(x).ok_or_else(|| Error::NonFinite(format!("gradient component {x}")))
}

/// Rows of M: two per fundamental cycle of a spanning tree.
fn cycle_matrix(g: &CollapseGraph) -> Result<Vec<Vec<BigRational>>, Error> {
    let n = g.vertices;
    if n == 0 || g.edges.is_empty() {
        return Err(Error::Malformed("empty collapsed subgraph".into()));
    }
    for e in &g.edges {
        if e.src >= n || e.dst >= n || e.length >= g.lengths {
            return Err(Error::Malformed(format!("edge {e:?} out of range")));
        }
    }
    // BFS spanning tree; pot[v] is the linear form φ(v) − φ(0) as coefficients
    // per length, one vector per coordinate
    let zero_form = || [vec![BigRational::zero(); g.lengths], vec![BigRational::zero(); g.lengths]];
    let mut pot: Vec<Option<[Vec<BigRational>; 2]>> = vec![None; n];
    pot[0] = Some(zero_form());
    let mut tree_edge = vec![false; g.edges.len()];
    let mut queue = vec![0usize];
    while let Some(v) = queue.pop() {
        for (i, e) in g.edges.iter().enumerate() {
            let (a, b, sign) = if e.src == v {
                (e.src, e.dst, 1)
            } else if e.dst == v {
                (e.dst, e.src, -1)
            } else {
                continue;
            };
            if pot[b].is_some() {
                continue;
            }
            let mut f = pot[a].clone().unwrap();
            let comps = [exact(e.gradient.x)?, exact(e.gradient.y)?];
            for (c, comp) in comps.into_iter().enumerate() {
                let term = if sign == 1 { comp } else { -comp };
                f[c][e.length] += term;
            }
            pot[b] = Some(f);
            tree_edge[i] = true;
            queue.push(b);
        }
    }
    if pot.iter().any(Option::is_none) {
        return Err(Error::Malformed("collapsed subgraph is not connected".into()));
    }
    let mut rows = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if tree_edge[i] {
            continue;
        }
        let (ps, pd) = (pot[e.src].as_ref().unwrap(), pot[e.dst].as_ref().unwrap());
        let comps = [exact(e.gradient.x)?, exact(e.gradient.y)?];
        for (c, comp) in comps.into_iter().enumerate() {
            // φ(dst) − φ(src) − v·l = 0
            let mut row: Vec<BigRational> = pd[c].iter().zip(&ps[c]).map(|(a, b)| a - b).collect();
            row[e.length] -= comp;
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Kernel basis of the columns `cols` of `rows`, by reduced row echelon form.
fn kernel(rows: &[Vec<BigRational>], cols: &[usize]) -> Vec<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
    let n = cols.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = BigRational::one() / a[r][c].clone();
        for x in &mut a[r] {
            *x *= inv.clone();
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..n {
                    let t = a[r][k].clone() * f.clone();
                    a[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -a[i][f].clone();
            }
            v
        })
        .collect()
}

fn rank(vectors: &[Vec<BigRational>], n: usize) -> usize {
    n - kernel(vectors, &(0..n).collect::<Vec<_>>()).len()
}

/// Solves the linearized system on a collapsed subgraph exactly.
pub fn linearized_collapse(g: &CollapseGraph) -> Result<CollapseResult, Error> {
    if g.lengths > 16 {
        return Err(Error::Malformed(format!("{} lengths exceed the exact solver's limit of 16", g.lengths)));
    }
    let rows = cycle_matrix(g)?;
    let n = g.lengths;
    // extreme rays of {l ≥ 0, Ml = 0} are the same-sign kernel vectors with
    // minimal support
    let mut rays: Vec<Vec<BigRational>> = Vec::new();
    let mut supports: Vec<BTreeSet<usize>> = Vec::new();
    let mut masks: Vec<u32> = (1u32..(1 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let cols: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let ker = kernel(&rows, &cols);
        if ker.len() != 1 {
            continue;
        }
        let v = &ker[0];
        let positive = v.iter().all(|x| x.is_positive());
        let negative = v.iter().all(|x| x.is_negative());
        if !(positive || negative) {
            continue;
        }
        let set: BTreeSet<usize> = cols.iter().copied().collect();
        if supports.iter().any(|s| s.is_subset(&set)) {
            continue;
        }
        let mut full = vec![BigRational::zero(); n];
        for (k, &c) in cols.iter().enumerate() {
            full[c] = if negative { -v[k].clone() } else { v[k].clone() };
        }
        // normalize to integer entries with gcd 1
        let den = full.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let scaled: Vec<BigRational> = full.iter().map(|x| x * BigRational::from_integer(den.clone())).collect();
        supports.push(set);
        rays.push(scaled);
    }
    Ok(match rank(&rays, n) {
        0 => CollapseResult::Empty,
        1 => CollapseResult::Isolated(rays.swap_remove(0)),
        r => CollapseResult::Family { dimension: r - 1, rays },
    })
}
