use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{HbarSeries, Permutation};
use crate::Error;

/// An element Σ c_w T_w of the Hecke algebra H_κ over F₂[ħ]/(ħ^{N+1}).
#[derive(Clone, PartialEq, Eq)]
pub struct HeckeElement {
    terms: BTreeMap<Permutation, HbarSeries>,
    rank: usize,
    order: u32,
}

impl HeckeElement {
    pub fn zero(rank: usize, order: u32) -> Self {
        HeckeElement { terms: BTreeMap::new(), rank, order }
    }

    /// The basis element T_w.
    pub fn basis(w: &Permutation, order: u32) -> Self {
        let mut e = Self::zero(w.rank(), order);
        e.terms.insert(w.clone(), HbarSeries::one(order));
        e
    }

    pub fn one(rank: usize, order: u32) -> Self {
        Self::basis(&Permutation::identity(rank), order)
    }

    /// T_{s_i}.
    pub fn generator(i: usize, rank: usize, order: u32) -> Result<Self, Error> {
        Ok(Self::basis(&Permutation::simple(i, rank)?, order))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic order of permutations.
    pub fn terms(&self) -> impl Iterator<Item = (&Permutation, &HbarSeries)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Permutation) -> HbarSeries {
        self.terms.get(w).copied().unwrap_or(HbarSeries::zero(self.order))
    }

    /// Adds `c·T_w`, dropping the term if it cancels.
    pub fn add_term(&mut self, w: Permutation, c: HbarSeries) -> Result<(), Error> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch(self.rank, w.rank()));
        }
        let cur = self.coeff(&w);
        let sum = cur.add(&c)?;
        if sum.is_zero() {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, sum);
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, Error> {
        self.check(o)?;
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), *c)?;
        }
        Ok(r)
    }

    /// T_{s_i} · self.
    pub fn left_mul_simple(&self, i: usize) -> Result<Self, Error> {
        let s = Permutation::simple(i, self.rank)?;
        let mut r = Self::zero(self.rank, self.order);
        for (w, c) in &self.terms {
            let sw = s.compose(w)?;
            if sw.coxeter_length() > w.coxeter_length() {
                r.add_term(sw, *c)?;
            } else {
                r.add_term(sw, *c)?;
                r.add_term(w.clone(), c.shift())?;
            }
        }
        Ok(r)
    }

    /// T_{s_{i₁}}⋯T_{s_{i_r}} · self.
    pub fn left_mul_word(&self, word: &[usize]) -> Result<Self, Error> {
        let mut r = self.clone();
        for &i in word.iter().rev() {
            r = r.left_mul_simple(i)?;
        }
        Ok(r)
    }

    pub fn mul(&self, o: &Self) -> Result<Self, Error> {
        self.check(o)?;
        let mut r = Self::zero(self.rank, self.order);
        for (u, c) in &self.terms {
            let part = o.left_mul_word(&u.reduced_word())?;
            for (w, d) in part.terms {
                r.add_term(w, c.mul(&d)?)?;
            }
        }
        Ok(r)
    }

    fn check(&self, o: &Self) -> Result<(), Error> {
        if self.rank != o.rank {
            return Err(Error::RankMismatch(self.rank, o.rank));
        }
        if self.order != o.order {
            return Err(Error::TruncationMismatch(self.order, o.order));
        }
        Ok(())
    }
}

impl fmt::Debug for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})T{w}")?;
        }
        Ok(())
    }
}

/// Outcome of [`verify_relations`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the quadratic, far-commutation and braid relations of H_κ,
/// each multiplied on the right by every basis element.
pub fn verify_relations(kappa: usize, order: u32) -> Result<RelationReport, Error> {
    let gen = |i| HeckeElement::generator(i, kappa, order);
    let one = HeckeElement::one(kappa, order);
    let basis: Vec<HeckeElement> =
        Permutation::all(kappa).iter().map(|w| HeckeElement::basis(w, order)).collect();
    let mut rep = RelationReport { checked: 0, failures: Vec::new() };
    let mut check = |name: String, lhs: &HeckeElement, rhs: &HeckeElement| -> Result<(), Error> {
        for b in &basis {
            rep.checked += 1;
            let (l, r) = (lhs.mul(b)?, rhs.mul(b)?);
            if l != r {
                rep.failures.push(format!("{name} on T{:?}: {l} != {r}", b.terms.keys().next()));
            }
        }
        Ok(())
    };
    for i in 1..kappa {
        let t = gen(i)?;
        let sq = t.mul(&t)?;
        let mut rhs = one.clone();
        for (w, c) in t.terms() {
            rhs.add_term(w.clone(), c.shift())?;
        }
        check(format!("T{i}^2 = 1 + h*T{i}"), &sq, &rhs)?;
        for j in i + 1..kappa {
            let u = gen(j)?;
            if j > i + 1 {
                check(format!("T{i}T{j} = T{j}T{i}"), &t.mul(&u)?, &u.mul(&t)?)?;
            } else {
                check(
                    format!("T{i}T{j}T{i} = T{j}T{i}T{j}"),
                    &t.mul(&u)?.mul(&t)?,
                    &u.mul(&t)?.mul(&u)?,
                )?;
            }
        }
    }
    Ok(rep)
}
