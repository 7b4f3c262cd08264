//! Elements of the elementary abelian 2-group `A_rank`, stored sparsely.
//!
//! A vector is either the set of its one-bits (`Sparse`) or the set of its
//! zero-bits (`Cosparse`). The second form keeps vectors like `ē_i` cheap at
//! ranks far beyond anything that could be stored densely.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::tower::Rank;
use crate::error::{Error, Result};

/// A basis index. Small indices stay inline; `Big` is only used above `u64::MAX`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ix {
    Small(u64),
    Big(Box<BigUint>),
}

impl Ix {
    pub fn from_big(v: BigUint) -> Ix {
        match v.to_u64() {
            Some(s) => Ix::Small(s),
            None => Ix::Big(Box::new(v)),
        }
    }

    pub fn to_big(&self) -> BigUint {
        match self {
            Ix::Small(s) => BigUint::from(*s),
            Ix::Big(b) => (**b).clone(),
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Ix::Small(s) => Some(*s),
            Ix::Big(_) => None,
        }
    }

    pub fn bits(&self) -> u64 {
        match self {
            Ix::Small(s) => 64 - s.leading_zeros() as u64,
            Ix::Big(b) => b.bits(),
        }
    }
}

impl From<u64> for Ix {
    fn from(v: u64) -> Self {
        Ix::Small(v)
    }
}

impl fmt::Display for Ix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ix::Small(s) => write!(f, "{s}"),
            Ix::Big(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for Ix {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v = BigUint::parse_bytes(s.trim().as_bytes(), 10)
            .ok_or_else(|| Error::Parse(format!("bad index {s:?}")))?;
        Ok(Ix::from_big(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Sparse,
    Cosparse,
}

impl Polarity {
    fn flip(self) -> Polarity {
        match self {
            Polarity::Sparse => Polarity::Cosparse,
            Polarity::Cosparse => Polarity::Sparse,
        }
    }
}

pub type Support = SmallVec<[Ix; 4]>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    polarity: Polarity,
    support: Support,
}

impl F2Vector {
    pub fn zero() -> F2Vector {
        F2Vector {
            polarity: Polarity::Sparse,
            support: Support::new(),
        }
    }

    /// The all-ones vector `∏ e_i`.
    pub fn all_ones() -> F2Vector {
        F2Vector {
            polarity: Polarity::Cosparse,
            support: Support::new(),
        }
    }

    pub fn basis(i: impl Into<Ix>) -> F2Vector {
        let mut support = Support::new();
        support.push(i.into());
        F2Vector {
            polarity: Polarity::Sparse,
            support,
        }
    }

    /// `ē_i = e_i · ∏ e_j`.
    pub fn bar_basis(i: impl Into<Ix>) -> F2Vector {
        F2Vector::basis(i).translate_bar()
    }

    /// Builds a vector from an arbitrary index list (sorted, duplicates cancel).
    pub fn from_indices<I, T>(polarity: Polarity, indices: I) -> F2Vector
    where
        I: IntoIterator<Item = T>,
        T: Into<Ix>,
    {
        let mut v: Vec<Ix> = indices.into_iter().map(Into::into).collect();
        v.sort();
        let mut support = Support::new();
        for ix in v {
            if support.last() == Some(&ix) {
                support.pop();
            } else {
                support.push(ix);
            }
        }
        F2Vector { polarity, support }
    }

    /// Builds a vector from a support that must already be strictly increasing.
    pub fn from_support(polarity: Polarity, support: Vec<Ix>) -> Result<F2Vector> {
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(
                "support must be strictly increasing".to_string(),
            ));
        }
        Ok(F2Vector {
            polarity,
            support: support.into_iter().collect(),
        })
    }

    pub fn sparse<T: Into<Ix>>(indices: impl IntoIterator<Item = T>) -> F2Vector {
        F2Vector::from_indices(Polarity::Sparse, indices)
    }

    pub fn cosparse<T: Into<Ix>>(indices: impl IntoIterator<Item = T>) -> F2Vector {
        F2Vector::from_indices(Polarity::Cosparse, indices)
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn support(&self) -> &[Ix] {
        &self.support
    }

    /// True for the sparse empty vector. Only reliable after normalization
    /// at an exact rank (the cosparse full-support vector is also zero).
    pub fn is_zero(&self) -> bool {
        self.polarity == Polarity::Sparse && self.support.is_empty()
    }

    pub fn contains(&self, i: &Ix) -> bool {
        let in_support = self.support.binary_search(i).is_ok();
        match self.polarity {
            Polarity::Sparse => in_support,
            Polarity::Cosparse => !in_support,
        }
    }

    /// Group operation: polarity xor, support symmetric difference.
    pub fn add(&self, other: &F2Vector) -> F2Vector {
        let polarity = if self.polarity == other.polarity {
            Polarity::Sparse
        } else {
            Polarity::Cosparse
        };
        F2Vector {
            polarity,
            support: sym_diff(&self.support, &other.support),
        }
    }

    pub fn add_assign(&mut self, other: &F2Vector) {
        if other.support.is_empty() {
            if other.polarity == Polarity::Cosparse {
                self.polarity = self.polarity.flip();
            }
            return;
        }
        *self = self.add(other);
    }

    /// `a ↦ ā = a · ∏ e_i`.
    pub fn translate_bar(&self) -> F2Vector {
        F2Vector {
            polarity: self.polarity.flip(),
            support: self.support.clone(),
        }
    }

    pub fn max_index(&self) -> Option<&Ix> {
        self.support.last()
    }

    /// Checks that every stored index is below `rank`.
    pub fn validate(&self, rank: &Rank) -> Result<()> {
        if let Some(m) = self.max_index() {
            if !rank.contains_index(m) {
                return Err(Error::RankMismatch {
                    index: m.to_string(),
                    rank: rank.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn check_budget(&self, limit: usize) -> Result<()> {
        if self.support.len() > limit {
            return Err(Error::budget("support", limit));
        }
        Ok(())
    }

    /// Canonical form at a known rank: the polarity with the smaller support
    /// wins, ties go to `Sparse`. At non-exact ranks nothing changes.
    pub fn normalized(mut self, rank: &Rank) -> F2Vector {
        self.normalize(rank);
        self
    }

    pub fn normalize(&mut self, rank: &Rank) {
        let Some(r) = rank.as_u64() else { return };
        let len = self.support.len() as u64;
        let other = r.saturating_sub(len);
        let switch = match self.polarity {
            Polarity::Sparse => other < len,
            Polarity::Cosparse => other <= len,
        };
        if switch {
            let mut comp = Support::new();
            let mut it = self.support.iter().peekable();
            for i in 0..r {
                if let Some(Ix::Small(s)) = it.peek() {
                    if *s == i {
                        it.next();
                        continue;
                    }
                }
                comp.push(Ix::Small(i));
            }
            self.support = comp;
            self.polarity = self.polarity.flip();
        }
    }

    /// Number of set bits when the rank is a small exact integer.
    pub fn weight(&self, rank: &Rank) -> Option<u64> {
        match self.polarity {
            Polarity::Sparse => Some(self.support.len() as u64),
            Polarity::Cosparse => rank
                .as_u64()
                .map(|r| r - self.support.len() as u64),
        }
    }

    /// Dense bit mask for ranks up to 64.
    pub fn to_bits(&self, rank: u64) -> Option<u64> {
        if rank > 64 {
            return None;
        }
        let mut m = 0u64;
        for ix in &self.support {
            let i = ix.as_u64()?;
            if i >= rank {
                return None;
            }
            m |= 1 << i;
        }
        Some(match self.polarity {
            Polarity::Sparse => m,
            Polarity::Cosparse => !m & full_mask(rank),
        })
    }

    /// Inverse of [`F2Vector::to_bits`], normalized at `rank`.
    pub fn from_bits(bits: u64, rank: u64) -> F2Vector {
        let idx = (0..rank.min(64)).filter(|i| bits >> i & 1 == 1);
        F2Vector::sparse(idx).normalized(&Rank::small(rank))
    }

    /// Sum of `2^i` over set bits, used by the fixed enumeration of `A_r`.
    pub(crate) fn sparse_value(&self, bit_budget: u64) -> Result<BigUint> {
        let mut acc = BigUint::zero();
        for ix in &self.support {
            if ix.bits() > 63 || ix.as_u64().is_none_or(|s| s >= bit_budget) {
                return Err(Error::IndexNotRepresentable(format!(
                    "2^{ix} exceeds the {bit_budget}-bit budget"
                )));
            }
            acc.set_bit(ix.as_u64().unwrap(), true);
        }
        Ok(acc)
    }
}

pub(crate) fn full_mask(rank: u64) -> u64 {
    if rank >= 64 {
        u64::MAX
    } else {
        (1u64 << rank) - 1
    }
}

fn sym_diff(a: &[Ix], b: &[Ix]) -> Support {
    let mut out = Support::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    out.extend(b[j..].iter().cloned());
    out
}

/// `a + b` with the support budget enforced.
pub fn f2_add(a: &F2Vector, b: &F2Vector, support_budget: usize) -> Result<F2Vector> {
    let s = a.add(b);
    s.check_budget(support_budget)?;
    Ok(s)
}

pub fn translate_bar(a: &F2Vector) -> F2Vector {
    a.translate_bar()
}

/// Compact text form: `s[0,3]` (sparse) or `c[1]` (cosparse).
impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.polarity {
            Polarity::Sparse => 's',
            Polarity::Cosparse => 'c',
        };
        write!(f, "{tag}[")?;
        for (k, ix) in self.support.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{ix}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for F2Vector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad vector {s:?}"));
        let polarity = match s.chars().next() {
            Some('s') => Polarity::Sparse,
            Some('c') => Polarity::Cosparse,
            _ => return Err(bad()),
        };
        let inner = s[1..]
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(bad)?;
        let support = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(Ix::from_str)
                .collect::<Result<Vec<_>>>()?
        };
        F2Vector::from_support(polarity, support)
    }
}

/// `2^r - 1` for an exact rank.
pub(crate) fn all_ones_value(rank: &Rank, bit_budget: u64) -> Result<BigUint> {
    let r = rank
        .exact()
        .ok_or_else(|| Error::IndexNotRepresentable(format!("rank {rank} is not exact")))?;
    let r = r
        .to_u64()
        .filter(|r| *r <= bit_budget)
        .ok_or_else(|| Error::IndexNotRepresentable(format!("2^{r} exceeds the bit budget")))?;
    Ok((BigUint::one() << r) - 1u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(v: &F2Vector, r: u64) -> u64 {
        v.to_bits(r).unwrap()
    }

    #[test]
    fn involution_and_bar_examples() {
        let e0 = F2Vector::basis(0);
        assert!(e0.add(&e0).is_zero());
        assert_eq!(e0.add(&F2Vector::all_ones()), F2Vector::cosparse([0]));
        let sum = F2Vector::cosparse([1]).add(&F2Vector::cosparse([2]));
        assert_eq!(sum, F2Vector::sparse([1, 2]));
        // dense oracle at rank 5
        let r = 5;
        let a = dense(&F2Vector::cosparse([1]), r);
        let b = dense(&F2Vector::cosparse([2]), r);
        assert_eq!(a ^ b, dense(&sum, r));
    }

    #[test]
    fn translate_bar_examples() {
        assert_eq!(F2Vector::zero().translate_bar(), F2Vector::all_ones());
        assert_eq!(F2Vector::basis(2).translate_bar(), F2Vector::cosparse([2]));
        assert_eq!(F2Vector::cosparse([0]).translate_bar(), F2Vector::basis(0));
        // ē_2 at rank 3 is e_0 e_1: two basis letters
        assert_eq!(F2Vector::cosparse([2]).to_bits(3), Some(0b011));
        assert_eq!(F2Vector::cosparse([2]).weight(&Rank::small(3)), Some(2));
    }

    #[test]
    fn normalization_prefers_smaller_support() {
        let r = Rank::small(5);
        let v = F2Vector::sparse([0, 1, 2]).normalized(&r);
        assert_eq!(v, F2Vector::cosparse([3, 4]));
        let w = F2Vector::cosparse([0, 1, 2, 3, 4]).normalized(&r);
        assert!(w.is_zero());
        // tie at rank 4 goes to sparse
        let t = F2Vector::cosparse([0, 1]).normalized(&Rank::small(4));
        assert_eq!(t, F2Vector::sparse([2, 3]));
        // huge ranks never normalize
        let h = Rank::huge_from_bits(1000);
        assert_eq!(F2Vector::cosparse([3]).normalized(&h), F2Vector::cosparse([3]));
    }

    #[test]
    fn budget_is_an_error() {
        let a = F2Vector::sparse(0u64..10);
        let b = F2Vector::sparse(10u64..20);
        assert!(f2_add(&a, &b, 19).is_err());
        assert_eq!(f2_add(&a, &b, 20).unwrap().support().len(), 20);
    }

    #[test]
    fn text_form_round_trips() {
        for v in [
            F2Vector::zero(),
            F2Vector::cosparse([1, 7]),
            F2Vector::basis(Ix::from_big(BigUint::one() << 100u32)),
        ] {
            assert_eq!(v.to_string().parse::<F2Vector>().unwrap(), v);
        }
        assert!("s[2,1]".parse::<F2Vector>().is_err());
    }

    #[test]
    fn big_indices_order_after_small() {
        let big = Ix::from_big(BigUint::one() << 70u32);
        assert!(Ix::Small(u64::MAX) < big);
        let v = F2Vector::sparse([big.clone(), Ix::Small(3)]);
        assert_eq!(v.support()[1], big);
    }
}
