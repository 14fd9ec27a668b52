//! Combinatorial indexing of the antisymmetric N-particle basis over M modes.
//!
//! A basis element is labelled by the set of occupied modes, stored as a
//! 64-bit mask. Elements are ordered colexicographically, which for masks of
//! equal popcount coincides with ordering by numeric value, and ranked with
//! the combinatorial number system.

use std::fmt;

use crate::error::{Error, Result};

/// Hard upper bound on the number of one-particle modes.
pub const MAX_MODES: usize = 64;

const PASCAL: [[u64; MAX_MODES + 1]; MAX_MODES + 1] = build_pascal();

const fn build_pascal() -> [[u64; MAX_MODES + 1]; MAX_MODES + 1] {
    let mut t = [[0u64; MAX_MODES + 1]; MAX_MODES + 1];
    let mut n = 0;
    while n <= MAX_MODES {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    t
}

/// Exact binomial coefficient for n <= 64; zero when k > n.
#[inline]
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n || n > MAX_MODES {
        if n > MAX_MODES {
            panic!("binomial({n}, {k}) exceeds the {MAX_MODES}-mode Pascal cache");
        }
        return 0;
    }
    PASCAL[n][k]
}

/// Set of occupied one-particle modes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ModeSet(u64);

impl ModeSet {
    pub const EMPTY: ModeSet = ModeSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        ModeSet(bits)
    }

    pub fn from_modes(modes: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &m in modes {
            if m >= MAX_MODES {
                return Err(Error::InvalidModeSet {
                    bits,
                    reason: format!("mode {m} exceeds the {MAX_MODES}-mode capacity"),
                });
            }
            if bits & (1 << m) != 0 {
                return Err(Error::InvalidModeSet {
                    bits,
                    reason: format!("mode {m} listed twice"),
                });
            }
            bits |= 1 << m;
        }
        Ok(ModeSet(bits))
    }

    /// All modes `0..count`.
    pub fn first(count: usize) -> Self {
        assert!(count <= MAX_MODES);
        if count == MAX_MODES {
            ModeSet(u64::MAX)
        } else {
            ModeSet((1u64 << count) - 1)
        }
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn contains(self, mode: usize) -> bool {
        mode < MAX_MODES && self.0 & (1 << mode) != 0
    }

    #[inline]
    pub const fn is_disjoint(self, other: ModeSet) -> bool {
        self.0 & other.0 == 0
    }

    #[inline]
    pub const fn union(self, other: ModeSet) -> ModeSet {
        ModeSet(self.0 | other.0)
    }

    #[inline]
    pub const fn difference(self, other: ModeSet) -> ModeSet {
        ModeSet(self.0 & !other.0)
    }

    #[inline]
    pub const fn is_subset(self, other: ModeSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Highest occupied mode plus one (0 for the empty set).
    pub const fn span(self) -> usize {
        (64 - self.0.leading_zeros()) as usize
    }

    /// Occupied modes in ascending order.
    pub fn modes(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let m = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(m)
            }
        })
    }
}

impl fmt::Debug for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.modes()).finish()
    }
}

impl fmt::Display for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.modes().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

/// The colex-ranked basis of N-subsets of M modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RankedBasis {
    modes: usize,
    particles: usize,
    dim: usize,
}

impl RankedBasis {
    pub fn new(modes: usize, particles: usize) -> Result<Self> {
        if modes > MAX_MODES {
            return Err(Error::Capacity {
                what: "mode count",
                requested: modes as u128,
                limit: MAX_MODES as u128,
            });
        }
        if particles == 0 || particles > modes {
            return Err(Error::InvalidParameter(format!(
                "need 0 < N <= M, got M={modes}, N={particles}"
            )));
        }
        let dim = binomial(modes, particles);
        let dim = usize::try_from(dim).map_err(|_| Error::Capacity {
            what: "basis dimension",
            requested: dim as u128,
            limit: usize::MAX as u128,
        })?;
        Ok(RankedBasis {
            modes,
            particles,
            dim,
        })
    }

    #[inline]
    pub fn modes(&self) -> usize {
        self.modes
    }

    #[inline]
    pub fn particles(&self) -> usize {
        self.particles
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Checks that `s` labels an element of this basis.
    pub fn check(&self, s: ModeSet) -> Result<()> {
        if s.len() != self.particles {
            return Err(Error::InvalidModeSet {
                bits: s.bits(),
                reason: format!("popcount {} != N = {}", s.len(), self.particles),
            });
        }
        if s.span() > self.modes {
            return Err(Error::InvalidModeSet {
                bits: s.bits(),
                reason: format!("mode {} >= M = {}", s.span() - 1, self.modes),
            });
        }
        Ok(())
    }

    /// Colex rank: sum over the i-th smallest element c_i of binomial(c_i, i + 1).
    pub fn rank(&self, s: ModeSet) -> Result<usize> {
        self.check(s)?;
        Ok(rank_unchecked(s))
    }

    pub fn unrank(&self, index: usize) -> Result<ModeSet> {
        if index >= self.dim {
            return Err(Error::OutOfRange {
                index,
                dim: self.dim,
            });
        }
        let mut rest = index as u64;
        let mut bits = 0u64;
        let mut upper = self.modes;
        for i in (1..=self.particles).rev() {
            // Largest c < upper with binomial(c, i) <= rest.
            let mut c = upper - 1;
            while binomial(c, i) > rest {
                c -= 1;
            }
            bits |= 1 << c;
            rest -= binomial(c, i);
            upper = c;
        }
        Ok(ModeSet(bits))
    }

    /// All basis elements in rank order.
    pub fn iter(&self) -> SubsetIter {
        SubsetIter::new(self.modes, self.particles)
    }
}

/// Rank of a mode set in the colex order of sets with the same popcount.
#[inline]
pub(crate) fn rank_unchecked(s: ModeSet) -> usize {
    s.modes()
        .enumerate()
        .map(|(i, c)| binomial(c, i + 1) as usize)
        .sum()
}

/// Iterator over all `k`-subsets of `0..m` in colex order (Gosper's hack).
#[derive(Clone, Debug)]
pub struct SubsetIter {
    next: Option<u64>,
    limit: u64,
}

impl SubsetIter {
    pub fn new(m: usize, k: usize) -> Self {
        assert!(m <= MAX_MODES);
        if k > m {
            return SubsetIter {
                next: None,
                limit: 0,
            };
        }
        let limit = if m == MAX_MODES { u64::MAX } else { (1u64 << m) - 1 };
        let first = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        SubsetIter {
            next: Some(first),
            limit,
        }
    }
}

impl Iterator for SubsetIter {
    type Item = ModeSet;

    fn next(&mut self) -> Option<ModeSet> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur.checked_add(c);
            match r {
                Some(r) if r & !self.limit == 0 => Some((((r ^ cur) >> 2) / c) | r),
                _ => None,
            }
        };
        Some(ModeSet(cur))
    }
}

/// Sign of the permutation sorting the concatenation (sorted `a`, sorted `b`).
///
/// Equals the parity of the number of pairs (j in a, i in b) with j > i.
pub fn merge_sign(a: ModeSet, b: ModeSet) -> Result<i8> {
    if !a.is_disjoint(b) {
        return Err(Error::NonDisjoint {
            a: a.bits(),
            b: b.bits(),
        });
    }
    Ok(merge_sign_unchecked(a, b))
}

#[inline]
pub(crate) fn merge_sign_unchecked(a: ModeSet, b: ModeSet) -> i8 {
    let mut inversions = 0u32;
    for i in b.modes() {
        // elements of a strictly above i
        let above = if i == 63 { 0 } else { a.bits() >> (i + 1) };
        inversions += above.count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All mode sets of size `extra` disjoint from `fixed`, in colex order.
pub fn enumerate_supersets(basis: &RankedBasis, fixed: ModeSet, extra: usize) -> Vec<ModeSet> {
    let free: Vec<usize> = (0..basis.modes())
        .filter(|&m| !fixed.contains(m))
        .collect();
    if extra > free.len() {
        return Vec::new();
    }
    SubsetIter::new(free.len(), extra)
        .map(|pos| {
            let bits = pos.modes().fold(0u64, |acc, p| acc | 1 << free[p]);
            ModeSet(bits)
        })
        .collect()
}
