//! Subset-indexed rank and multiplicity of the arithmetic matroid
//! represented by the columns of an integer matrix.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_linalg::{self, IntMatrix};

/// Hard ceiling imposed by the 64-bit mask.
pub const MAX_GROUND_SET: usize = 63;

/// Default cap on `N` for the eagerly sized memo tables.
pub const DEFAULT_MAX_GROUND_SET: usize = 20;

/// A subset of the ground set `{0, …, n-1}` stored as a bitmask.
///
/// Indices are zero-based; bit `i` set means column `i` is a member.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetId {
    bits: u64,
    n: u8,
}

impl SubsetId {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        if n > MAX_GROUND_SET {
            return Err(Error::GroundSetTooLarge {
                n,
                max: MAX_GROUND_SET,
            });
        }
        if bits >> n != 0 {
            return Err(Error::Invariant(format!(
                "bitmask {bits:#b} has bits above the ground set of size {n}"
            )));
        }
        Ok(SubsetId { bits, n: n as u8 })
    }

    pub fn empty(n: usize) -> Self {
        SubsetId::new(0, n).expect("n within range")
    }

    pub fn full(n: usize) -> Self {
        SubsetId::new(low_mask(n), n).expect("n within range")
    }

    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self> {
        let mut bits = 0u64;
        for &i in indices {
            if i >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: i,
                });
            }
            bits |= 1 << i;
        }
        SubsetId::new(bits, n)
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn ground_size(self) -> usize {
        self.n as usize
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < self.n as usize && self.bits >> i & 1 == 1
    }

    pub fn is_subset_of(self, other: SubsetId) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn insert(self, i: usize) -> SubsetId {
        assert!(i < self.n as usize);
        SubsetId {
            bits: self.bits | 1 << i,
            n: self.n,
        }
    }

    pub fn remove(self, i: usize) -> SubsetId {
        SubsetId {
            bits: self.bits & !(1 << i),
            n: self.n,
        }
    }

    pub fn union(self, other: SubsetId) -> SubsetId {
        SubsetId {
            bits: self.bits | other.bits,
            n: self.n.max(other.n),
        }
    }

    /// Members in increasing order.
    pub fn iter(self) -> Members {
        Members { rest: self.bits }
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Position of element `i` among the members of this subset.
    pub fn position_of(self, i: usize) -> Option<usize> {
        self.contains(i)
            .then(|| (self.bits & ((1u64 << i) - 1)).count_ones() as usize)
    }

    /// All subsets of this subset, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = SubsetId> {
        let full = self.bits;
        let n = self.n;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some(((cur | !full).wrapping_add(1)) & full)
            };
            Some(SubsetId { bits: cur, n })
        })
    }
}

impl fmt::Debug for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Members {
    rest: u64,
}

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.rest == 0 {
            return None;
        }
        let i = self.rest.trailing_zeros() as usize;
        self.rest &= self.rest - 1;
        Some(i)
    }
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Rank and multiplicity oracle over all subsets of the columns of `X`.
///
/// Tables hold one lazily filled slot per subset; writes go through
/// [`OnceLock`] so the cache can be shared across threads.
pub struct MatroidCache {
    x: IntMatrix,
    rank_by_subset: Vec<OnceLock<usize>>,
    multiplicity_by_subset: Vec<OnceLock<BigInt>>,
}

impl MatroidCache {
    pub fn new(x: IntMatrix) -> Result<Self> {
        Self::with_cap(x, DEFAULT_MAX_GROUND_SET)
    }

    pub fn with_cap(x: IntMatrix, max_ground_set: usize) -> Result<Self> {
        let n = x.cols();
        let max = max_ground_set.min(MAX_GROUND_SET);
        if n > max {
            return Err(Error::GroundSetTooLarge { n, max });
        }
        let size = 1usize << n;
        Ok(MatroidCache {
            x,
            rank_by_subset: (0..size).map(|_| OnceLock::new()).collect(),
            multiplicity_by_subset: (0..size).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.x
    }

    pub fn d(&self) -> usize {
        self.x.rows()
    }

    pub fn n(&self) -> usize {
        self.x.cols()
    }

    pub fn subset(&self, indices: &[usize]) -> Result<SubsetId> {
        SubsetId::from_indices(indices, self.n())
    }

    pub fn full_set(&self) -> SubsetId {
        SubsetId::full(self.n())
    }

    /// Every subset of the ground set in increasing bitmask order.
    pub fn all_subsets(&self) -> impl Iterator<Item = SubsetId> {
        let n = self.n();
        (0..1u64 << n).map(move |b| SubsetId {
            bits: b,
            n: n as u8,
        })
    }

    /// The submatrix `X[S]`.
    pub fn columns(&self, s: SubsetId) -> IntMatrix {
        self.x.select_columns(&s.indices())
    }

    fn slot(&self, s: SubsetId) -> usize {
        debug_assert!(s.bits >> self.n() == 0);
        s.bits as usize
    }

    pub fn rank_of_subset(&self, s: SubsetId) -> usize {
        *self.rank_by_subset[self.slot(s)].get_or_init(|| {
            if s.is_empty() {
                0
            } else {
                exact_linalg::rank(&self.columns(s))
            }
        })
    }

    pub fn is_independent(&self, s: SubsetId) -> bool {
        self.rank_of_subset(s) == s.len()
    }

    /// `m(S)`: gcd of maximal minors for independent sets, gcd of `m(B)`
    /// over the bases `B ⊆ S` otherwise. `m(∅) = 1`.
    pub fn multiplicity_of_set(&self, s: SubsetId) -> BigInt {
        if let Some(m) = self.multiplicity_by_subset[self.slot(s)].get() {
            return m.clone();
        }
        let m = if s.is_empty() {
            BigInt::one()
        } else if self.is_independent(s) {
            exact_linalg::gcd_of_maximal_minors(&self.columns(s))
                .expect("independent columns have a nonzero maximal minor")
        } else {
            let r = self.rank_of_subset(s);
            let mut g = BigInt::zero();
            for b in s.subsets().filter(|b| b.len() == r) {
                if !self.is_independent(b) {
                    continue;
                }
                g = g.gcd(&self.multiplicity_of_set(b));
                if g.is_one() {
                    break;
                }
            }
            g
        };
        self.multiplicity_by_subset[self.slot(s)]
            .get_or_init(|| m)
            .clone()
    }
}
