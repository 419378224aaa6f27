//! Composition maps from rigid flow-tree counts, and the endomorphism
//! algebra of the wrapped fibers.
//!
//! A rigid flow tree whose cover has Euler characteristic χ contributes
//! ħ^{κ−χ} to the coefficient of its output.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{HbarSeries, HeckeElement, Permutation};
use crate::morse::{critical_points, Chain, Generator, MetricConfig};
use crate::solver::{dimension, solve_moduli, Found, SolverConfig};
use crate::trees::FoldedRibbonTree;
use crate::Error;

/// A formal sum of generators of hom(f_src, f_dst), keyed by permutation.
#[derive(Clone, PartialEq, Eq)]
pub struct MorphismElement {
    pub src: usize,
    pub dst: usize,
    terms: BTreeMap<Permutation, HbarSeries>,
    order: u32,
}

impl MorphismElement {
    pub fn zero(src: usize, dst: usize, order: u32) -> Self {
        MorphismElement { src, dst, terms: BTreeMap::new(), order }
    }

    pub fn basis(src: usize, dst: usize, w: &Permutation, order: u32) -> Self {
        let mut e = Self::zero(src, dst, order);
        e.terms.insert(w.clone(), HbarSeries::one(order));
        e
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Permutation, &HbarSeries)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Permutation) -> HbarSeries {
        self.terms.get(w).copied().unwrap_or(HbarSeries::zero(self.order))
    }

    /// Adds c·w, dropping the term if it cancels.
    pub fn add_term(&mut self, w: Permutation, c: HbarSeries) -> Result<(), Error> {
        let sum = self.coeff(&w).add(&c)?;
        if sum.is_zero() {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, sum);
        }
        Ok(())
    }

    /// The same sum read in the Hecke algebra.
    pub fn to_hecke(&self, rank: usize) -> Result<HeckeElement, Error> {
        let mut h = HeckeElement::zero(rank, self.order);
        for (w, c) in &self.terms {
            h.add_term(w.clone(), *c)?;
        }
        Ok(h)
    }
}

impl fmt::Display for MorphismElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})T{w}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MorphismElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hom({}, {}): {self}", self.src, self.dst)
    }
}

/// μ^m(q_m, …, q₁) with `inputs` listed as q₁, …, q_m, qᵢ ∈ hom(f_{i−1}, f_i).
///
/// Only outputs of expected dimension 0 contribute. Each contribution is
/// checked to carry ħ-degree equal to the number of marginal vertices.
pub fn mu(chain: &Chain, inputs: &[Generator], metric: &MetricConfig, cfg: &SolverConfig, order: u32) -> Result<MorphismElement, Error> {
    Ok(mu_with_trees(chain, inputs, metric, cfg, order)?.0)
}

/// An accepted flow tree behind a μ^m coefficient.
#[derive(Clone, Debug)]
pub struct Contribution {
    pub output: Generator,
    pub tree: FoldedRibbonTree,
    pub found: Found,
}

/// [`mu`] together with every flow tree it counted.
pub fn mu_with_trees(
    chain: &Chain,
    inputs: &[Generator],
    metric: &MetricConfig,
    cfg: &SolverConfig,
    order: u32,
) -> Result<(MorphismElement, Vec<Contribution>), Error> {
    let m = inputs.len();
    if m < 2 {
        return Err(Error::Malformed(format!("μ^{m} has no flow-tree description here")));
    }
    let mut out = MorphismElement::zero(0, m, order);
    let mut trees = Vec::new();
    for q0 in critical_points(chain, 0, m)? {
        if dimension(&q0, inputs, m) != 0 {
            continue;
        }
        let r = solve_moduli(chain, inputs, &q0, metric, cfg)?;
        for (tree, found) in &r.solutions {
            let weight = chain.kappa as i64 - found.chi;
            if weight != tree.marginal_vertex_count() as i64 {
                return Err(Error::Malformed(format!(
                    "solution with χ = {} on a tree with {} marginal vertices",
                    found.chi,
                    tree.marginal_vertex_count()
                )));
            }
        }
        for (chi, p) in r.parity_by_chi() {
            if p == 1 {
                let k = chain.kappa as i64 - chi;
                if k < 0 {
                    return Err(Error::Malformed(format!("cover with χ = {chi} above κ")));
                }
                out.add_term(q0.perm.clone(), HbarSeries::monomial(k as u32, order))?;
            }
        }
        trees.extend(r.solutions.into_iter().map(|(tree, found)| Contribution { output: q0.clone(), tree, found }));
    }
    Ok((out, trees))
}

/// μ² on the basis of the wrapped-fiber endomorphism algebra.
///
/// `entries[(a, b)]` is μ²(q₂ = a, q₁ = b), the product a·b.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTable {
    pub kappa: usize,
    pub truncation: u32,
    pub basis: Vec<Permutation>,
    pub entries: BTreeMap<(Permutation, Permutation), MorphismElement>,
}

/// Generators of hom(0, 1), hom(1, 2) and hom(0, 2) indexed by permutation.
pub struct TableInputs {
    pub first: BTreeMap<Permutation, Generator>,
    pub second: BTreeMap<Permutation, Generator>,
}

pub fn table_inputs(chain: &Chain) -> Result<TableInputs, Error> {
    if chain.objects.len() < 3 {
        return Err(Error::Malformed("a product table needs three objects".into()));
    }
    let key = |v: Vec<Generator>| v.into_iter().map(|g| (g.perm.clone(), g)).collect();
    Ok(TableInputs { first: key(critical_points(chain, 0, 1)?), second: key(critical_points(chain, 1, 2)?) })
}

/// One table cell, the product a·b.
pub fn product_cell(
    chain: &Chain,
    inputs: &TableInputs,
    a: &Permutation,
    b: &Permutation,
    metric: &MetricConfig,
    cfg: &SolverConfig,
    order: u32,
) -> Result<MorphismElement, Error> {
    Ok(product_cell_with_trees(chain, inputs, a, b, metric, cfg, order)?.0)
}

/// [`product_cell`] with the flow trees behind it, and the inputs (q₁, q₂).
#[allow(clippy::type_complexity)]
pub fn product_cell_with_trees(
    chain: &Chain,
    inputs: &TableInputs,
    a: &Permutation,
    b: &Permutation,
    metric: &MetricConfig,
    cfg: &SolverConfig,
    order: u32,
) -> Result<(MorphismElement, Vec<Contribution>, [Generator; 2]), Error> {
    let (Some(qa), Some(qb)) = (inputs.second.get(a), inputs.first.get(b)) else {
        return Err(Error::OutOfRange(format!("basis label {a} or {b}")));
    };
    let q = [qb.clone(), qa.clone()];
    let (e, trees) = mu_with_trees(chain, &q, metric, cfg, order)?;
    Ok((e, trees, q))
}

impl ProductTable {
    /// Assembles cells listed in any order.
    pub fn from_cells(
        kappa: usize,
        truncation: u32,
        cells: impl IntoIterator<Item = ((Permutation, Permutation), MorphismElement)>,
    ) -> Self {
        ProductTable { kappa, truncation, basis: Permutation::all(kappa), entries: cells.into_iter().collect() }
    }

    pub fn get(&self, a: &Permutation, b: &Permutation) -> Option<&MorphismElement> {
        self.entries.get(&(a.clone(), b.clone()))
    }

    fn is_complete(&self) -> bool {
        self.basis.iter().all(|a| self.basis.iter().all(|b| self.get(a, b).is_some()))
    }

    /// Bilinear extension of the table.
    pub fn mul(&self, x: &MorphismElement, y: &MorphismElement) -> Result<MorphismElement, Error> {
        let mut out = MorphismElement::zero(y.src, x.dst, self.truncation);
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                let cell = self.get(a, b).ok_or_else(|| Error::OutOfRange(format!("no entry for ({a}, {b})")))?;
                let c = ca.mul(cb)?;
                for (w, cw) in cell.terms() {
                    out.add_term(w.clone(), c.mul(cw)?)?;
                }
            }
        }
        Ok(out)
    }

    fn basis_element(&self, w: &Permutation) -> MorphismElement {
        MorphismElement::basis(0, 1, w, self.truncation)
    }
}

/// μ² on all κ!×κ! basis pairs, sequentially.
pub fn product_table(chain: &Chain, order: u32, metric: &MetricConfig, cfg: &SolverConfig) -> Result<ProductTable, Error> {
    let inputs = table_inputs(chain)?;
    let basis = Permutation::all(chain.kappa);
    let mut cells = Vec::new();
    for a in &basis {
        for b in &basis {
            cells.push(((a.clone(), b.clone()), product_cell(chain, &inputs, a, b, metric, cfg, order)?));
        }
    }
    Ok(ProductTable::from_cells(chain.kappa, order, cells))
}

/// Outcome of a check over basis tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// (ab)c = a(bc) for all basis triples.
pub fn verify_associativity(t: &ProductTable) -> Result<TableReport, Error> {
    let mut r = TableReport { checked: 0, failures: Vec::new() };
    if !t.is_complete() {
        r.failures.push("table is incomplete".into());
        return Ok(r);
    }
    for a in &t.basis {
        for b in &t.basis {
            for c in &t.basis {
                let (ea, eb, ec) = (t.basis_element(a), t.basis_element(b), t.basis_element(c));
                let left = t.mul(&t.mul(&ea, &eb)?, &ec)?;
                let right = t.mul(&ea, &t.mul(&eb, &ec)?)?;
                r.checked += 1;
                if left.terms != right.terms {
                    r.failures.push(format!("({a}·{b})·{c} = {left} but {a}·({b}·{c}) = {right}"));
                }
            }
        }
    }
    Ok(r)
}

/// T_id is a two-sided unit.
pub fn verify_unit(t: &ProductTable) -> Result<TableReport, Error> {
    let mut r = TableReport { checked: 0, failures: Vec::new() };
    let id = Permutation::identity(t.kappa);
    for w in &t.basis {
        let expect = t.basis_element(w);
        for (x, y) in [(&id, w), (w, &id)] {
            r.checked += 1;
            match t.get(x, y) {
                Some(e) if e.terms == expect.terms => {}
                Some(e) => r.failures.push(format!("{x}·{y} = {e}, expected T{w}")),
                None => r.failures.push(format!("no entry for ({x}, {y})")),
            }
        }
    }
    Ok(r)
}

/// A table entry that differs from the Hecke product.
#[derive(Clone, Debug, PartialEq)]
pub struct Discrepancy {
    pub left: Permutation,
    pub right: Permutation,
    pub expected: HeckeElement,
    pub computed: Option<MorphismElement>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeckeComparison {
    pub checked: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl HeckeComparison {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty() && self.checked > 0
    }
}

/// Compares every entry with T_a·T_b in H_κ truncated at ħ^N.
pub fn compare_hecke(t: &ProductTable, order: u32) -> Result<HeckeComparison, Error> {
    if order > t.truncation {
        return Err(Error::TruncationMismatch(order, t.truncation));
    }
    let mut out = HeckeComparison { checked: 0, discrepancies: Vec::new() };
    for a in &t.basis {
        for b in &t.basis {
            let expected = HeckeElement::basis(a, order).mul(&HeckeElement::basis(b, order))?;
            let computed = t.get(a, b);
            out.checked += 1;
            let ok = match computed {
                Some(e) => truncate(&e.to_hecke(t.kappa)?, order)? == expected,
                None => false,
            };
            if !ok {
                out.discrepancies.push(Discrepancy { left: a.clone(), right: b.clone(), expected, computed: computed.cloned() });
            }
        }
    }
    Ok(out)
}

fn truncate(h: &HeckeElement, order: u32) -> Result<HeckeElement, Error> {
    let mut out = HeckeElement::zero(h.rank(), order);
    for (w, c) in h.terms() {
        let coeffs: Vec<u8> = c.coeffs();
        out.add_term(w.clone(), HbarSeries::from_coeffs(&coeffs, order)?)?;
    }
    Ok(out)
}
