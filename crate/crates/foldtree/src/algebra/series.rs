use alloc::vec::Vec;
use core::fmt;

use crate::Error;

/// Largest supported truncation order.
pub const MAX_TRUNCATION: u32 = 63;

/// An element of F₂[ħ]/(ħ^{N+1}).
///
/// Bit k of `bits` is the coefficient of ħ^k.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct HbarSeries {
    bits: u64,
    order: u32,
}

impl HbarSeries {
    fn mask(order: u32) -> u64 {
        if order >= 63 {
            u64::MAX
        } else {
            (1u64 << (order + 1)) - 1
        }
    }

    pub fn zero(order: u32) -> Self {
        assert!(order <= MAX_TRUNCATION, "truncation order above {MAX_TRUNCATION}");
        HbarSeries { bits: 0, order }
    }

    pub fn one(order: u32) -> Self {
        Self::monomial(0, order)
    }

    /// ħ^k, which is zero when k > N.
    pub fn monomial(k: u32, order: u32) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.bits = 1 << k;
        }
        s
    }

    pub fn from_coeffs(coeffs: &[u8], order: u32) -> Result<Self, Error> {
        let mut s = Self::zero(order);
        for (k, &c) in coeffs.iter().enumerate() {
            match c {
                0 => {}
                1 if (k as u32) <= order => s.bits |= 1 << k,
                1 => {}
                _ => return Err(Error::Malformed(alloc::format!("coefficient {c} not in F2"))),
            }
        }
        Ok(s)
    }

    pub fn coeffs(&self) -> Vec<u8> {
        (0..=self.order).map(|k| self.coeff(k)).collect()
    }

    pub fn coeff(&self, k: u32) -> u8 {
        if k > self.order {
            0
        } else {
            ((self.bits >> k) & 1) as u8
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Degrees with a nonzero coefficient, ascending.
    pub fn support(&self) -> Vec<u32> {
        (0..=self.order).filter(|&k| self.coeff(k) == 1).collect()
    }

    pub fn add(&self, o: &Self) -> Result<Self, Error> {
        self.check(o)?;
        Ok(HbarSeries { bits: self.bits ^ o.bits, order: self.order })
    }

    pub fn mul(&self, o: &Self) -> Result<Self, Error> {
        self.check(o)?;
        let mut acc = 0u64;
        let mut b = o.bits;
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= self.bits << shift;
            }
            b >>= 1;
            shift += 1;
        }
        Ok(HbarSeries { bits: acc & Self::mask(self.order), order: self.order })
    }

    /// Multiplication by ħ.
    pub fn shift(&self) -> Self {
        HbarSeries { bits: (self.bits << 1) & Self::mask(self.order), order: self.order }
    }

    fn check(&self, o: &Self) -> Result<(), Error> {
        if self.order != o.order {
            return Err(Error::TruncationMismatch(self.order, o.order));
        }
        Ok(())
    }
}

impl fmt::Debug for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (mod h^{})", self.order + 1)
    }
}

/// Polynomial notation in `h`, e.g. `1 + h^2`.
impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sup = self.support();
        if sup.is_empty() {
            return f.write_str("0");
        }
        for (n, k) in sup.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            match k {
                0 => f.write_str("1")?,
                1 => f.write_str("h")?,
                _ => write!(f, "h^{k}")?,
            }
        }
        Ok(())
    }
}
