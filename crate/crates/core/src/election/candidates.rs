use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

/// Largest candidate count a [`CandidateSet`] can address.
pub const MAX_CANDIDATES: usize = 64;

/// A set of candidates stored as a bitmask; candidate `i` is bit `i`.
///
/// Candidates are 0-indexed internally and rendered 1-indexed (`c1`, `c2`, ...)
/// by the `Display` impl. The derived ordering is the numeric order of the
/// bitmask, which is the "lexicographic bitmask order" used throughout.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateSet(u64);

impl CandidateSet {
    pub const EMPTY: CandidateSet = CandidateSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        CandidateSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(candidate: usize) -> Self {
        assert!(candidate < MAX_CANDIDATES, "candidate index {candidate} out of range");
        CandidateSet(1 << candidate)
    }

    /// Candidates `lo..hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi && hi <= MAX_CANDIDATES, "bad candidate range {lo}..{hi}");
        CandidateSet(low_bits(hi) & !low_bits(lo))
    }

    /// The first `m` candidates.
    pub fn all(m: usize) -> Self {
        Self::range(0, m)
    }

    pub fn contains(self, candidate: usize) -> bool {
        candidate < MAX_CANDIDATES && self.0 >> candidate & 1 == 1
    }

    pub fn with(self, candidate: usize) -> Self {
        self | Self::singleton(candidate)
    }

    pub fn without(self, candidate: usize) -> Self {
        self - Self::singleton(candidate)
    }

    /// `self \ {x} ∪ {y}`.
    pub fn swap(self, x: usize, y: usize) -> Self {
        self.without(x).with(y)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: CandidateSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: CandidateSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Index of the highest member plus one, i.e. the smallest `m` that can hold this set.
    pub fn span(self) -> usize {
        MAX_CANDIDATES - self.0.leading_zeros() as usize
    }

    pub fn min(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in ascending order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// The `n` lowest-indexed members.
    pub fn lowest(self, n: usize) -> CandidateSet {
        assert!(n <= self.len(), "asked for {n} members of a set of size {}", self.len());
        self.iter().take(n).collect()
    }
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterator over the members of a [`CandidateSet`].
#[derive(Clone)]
pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

impl FromIterator<usize> for CandidateSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter()
            .fold(CandidateSet::EMPTY, |acc, c| acc.with(c))
    }
}

impl IntoIterator for CandidateSet {
    type Item = usize;
    type IntoIter = Members;

    fn into_iter(self) -> Members {
        self.iter()
    }
}

impl BitAnd for CandidateSet {
    type Output = CandidateSet;
    fn bitand(self, rhs: Self) -> Self {
        CandidateSet(self.0 & rhs.0)
    }
}

impl BitOr for CandidateSet {
    type Output = CandidateSet;
    fn bitor(self, rhs: Self) -> Self {
        CandidateSet(self.0 | rhs.0)
    }
}

impl Sub for CandidateSet {
    type Output = CandidateSet;
    fn sub(self, rhs: Self) -> Self {
        CandidateSet(self.0 & !rhs.0)
    }
}

impl fmt::Display for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, c) in self.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "c{}", c + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All subsets of `universe` with exactly `size` members, in increasing bitmask order.
pub fn subsets_of_size(universe: CandidateSet, size: usize) -> impl Iterator<Item = CandidateSet> {
    let members: Vec<usize> = universe.iter().collect();
    let n = members.len();
    // Gosper's hack over positions within `universe`, then scattered back.
    let mut state: Option<u128> = (size <= n).then(|| (1u128 << size) - 1);
    std::iter::from_fn(move || {
        let positions = state?;
        state = if size == 0 {
            None
        } else {
            let c = positions & positions.wrapping_neg();
            let r = positions + c;
            let next = (((r ^ positions) >> 2) / c) | r;
            (next >> n == 0).then_some(next)
        };
        let mut set = CandidateSet::EMPTY;
        let mut p = positions;
        while p != 0 {
            set = set.with(members[p.trailing_zeros() as usize]);
            p &= p - 1;
        }
        Some(set)
    })
}

/// All nonempty subsets of `universe` of size at most `max_size`, ordered by size
/// and then by bitmask.
pub fn subsets_up_to(universe: CandidateSet, max_size: usize) -> impl Iterator<Item = CandidateSet> {
    (1..=max_size.min(universe.len())).flat_map(move |s| subsets_of_size(universe, s))
}
