use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::Error;

/// An element of the symmetric group on {1,…,κ}.
///
/// Public indices are 1-based. Storage is 0-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(kappa: usize) -> Self {
        assert!((1..=255).contains(&kappa), "rank must lie in 1..=255");
        Permutation { images: (0..kappa as u8).collect() }
    }

    /// Builds a permutation from its 1-based image list.
    pub fn from_images(images: &[usize]) -> Result<Self, Error> {
        let k = images.len();
        if k == 0 || k > 255 {
            return Err(Error::NotAPermutation(format!("rank {k}")));
        }
        let mut seen = alloc::vec![false; k];
        let mut out = Vec::with_capacity(k);
        for &im in images {
            if im == 0 || im > k || seen[im - 1] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[im - 1] = true;
            out.push((im - 1) as u8);
        }
        Ok(Permutation { images: out })
    }

    /// Swaps `v` and `w` (1-based, v < w).
    pub fn transposition(v: usize, w: usize, kappa: usize) -> Result<Self, Error> {
        if !(1 <= v && v < w && w <= kappa) {
            return Err(Error::OutOfRange(format!("({v} {w}) in rank {kappa}")));
        }
        let mut p = Self::identity(kappa);
        p.images.swap(v - 1, w - 1);
        Ok(p)
    }

    /// The simple transposition s_i = (i i+1).
    pub fn simple(i: usize, kappa: usize) -> Result<Self, Error> {
        Self::transposition(i, i + 1, kappa)
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// Image of `j` (1-based).
    pub fn apply(&self, j: usize) -> usize {
        self.images[j - 1] as usize + 1
    }

    /// 0-based image, for internal index arithmetic.
    pub(crate) fn apply0(&self, j: usize) -> usize {
        self.images[j] as usize
    }

    /// 1-based image list.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i as usize + 1).collect()
    }

    /// `self ∘ q`, i.e. `j ↦ self(q(j))`.
    pub fn compose(&self, q: &Permutation) -> Result<Self, Error> {
        if self.rank() != q.rank() {
            return Err(Error::RankMismatch(self.rank(), q.rank()));
        }
        Ok(Permutation {
            images: q.images.iter().map(|&j| self.images[j as usize]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![0u8; self.rank()];
        for (j, &im) in self.images.iter().enumerate() {
            inv[im as usize] = j as u8;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, &im)| j == im as usize)
    }

    /// The swapped pair (a, b), a < b, 1-based, if this is a transposition.
    pub fn as_transposition(&self) -> Option<(usize, usize)> {
        let moved: Vec<usize> = (0..self.rank()).filter(|&j| self.apply0(j) != j).collect();
        match moved[..] {
            [a, b] if self.apply0(a) == b => Some((a + 1, b + 1)),
            _ => None,
        }
    }

    /// Number of inversions.
    pub fn coxeter_length(&self) -> usize {
        let p = &self.images;
        let mut n = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    n += 1;
                }
            }
        }
        n
    }

    /// Smallest i with ℓ(s_i·self) < ℓ(self).
    ///
    /// s_i·p lowers length iff i+1 appears before i in the image list.
    pub fn left_descent(&self) -> Option<usize> {
        let inv = self.inverse();
        (0..self.rank().saturating_sub(1))
            .find(|&i| inv.images[i] > inv.images[i + 1])
            .map(|i| i + 1)
    }

    /// A reduced word (i₁,…,i_r) with self = s_{i₁}⋯s_{i_r}, found by
    /// peeling left descents.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut word = Vec::new();
        let mut p = self.clone();
        while let Some(i) = p.left_descent() {
            word.push(i);
            swap_values(&mut p.images, i);
        }
        word
    }

    /// All permutations of rank κ in lexicographic order of image lists.
    pub fn all(kappa: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..kappa as u8).collect();
        loop {
            out.push(Permutation { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (0..kappa.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..kappa).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    /// All transpositions (a b) of rank κ, ordered by (a, b).
    pub fn transpositions(kappa: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        for a in 1..=kappa {
            for b in a + 1..=kappa {
                out.push(Self::transposition(a, b, kappa).unwrap());
            }
        }
        out
    }

    /// The longest element j ↦ κ+1−j.
    pub fn longest(kappa: usize) -> Self {
        Permutation { images: (0..kappa as u8).rev().collect() }
    }
}

/// Left multiplication by s_i: swaps the values i and i+1 (1-based).
fn swap_values(images: &mut [u8], i: usize) {
    let (a, b) = ((i - 1) as u8, i as u8);
    for v in images.iter_mut() {
        if *v == a {
            *v = b;
        } else if *v == b {
            *v = a;
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Cycle notation, `id` for the identity.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("id");
        }
        let mut seen = alloc::vec![false; self.rank()];
        for start in 0..self.rank() {
            if seen[start] || self.apply0(start) == start {
                continue;
            }
            f.write_str("(")?;
            let mut j = start;
            let mut first = true;
            while !seen[j] {
                seen[j] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{}", j + 1)?;
                first = false;
                j = self.apply0(j);
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}
