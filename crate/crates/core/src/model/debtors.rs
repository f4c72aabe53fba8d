//! Bitmask sets of debtor indices.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Maximum number of debtors a [`DebtorSet`] can address.
pub const MAX_DEBTORS: usize = 20;

/// A set of debtor indices `0..n` stored as a bitmask.
///
/// Sets order by cardinality first and then by the numeric mask, which is the
/// order the ladder uses to visit subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DebtorSet(u32);

impl DebtorSet {
    pub const EMPTY: DebtorSet = DebtorSet(0);

    pub fn from_mask(mask: u32) -> Self {
        DebtorSet(mask)
    }

    /// `{0, 1, …, n − 1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_DEBTORS, "at most {MAX_DEBTORS} debtors");
        DebtorSet(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(k: usize) -> Self {
        DebtorSet(1 << k)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn contains(self, k: usize) -> bool {
        self.0 >> k & 1 == 1
    }

    #[inline]
    pub fn insert(self, k: usize) -> Self {
        DebtorSet(self.0 | 1 << k)
    }

    #[inline]
    pub fn remove(self, k: usize) -> Self {
        DebtorSet(self.0 & !(1 << k))
    }

    #[inline]
    pub fn union(self, other: Self) -> Self {
        DebtorSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Self) -> Self {
        DebtorSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Self) -> Self {
        DebtorSet(self.0 & !other.0)
    }

    /// Complement relative to `{0..n}`.
    pub fn complement(self, n: usize) -> Self {
        DebtorSet::full(n).difference(self)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// Every subset of `self`, in increasing mask order, starting with `∅`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            set: self.0,
            next: Some(0),
        }
    }
}

impl Ord for DebtorSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then(self.0.cmp(&other.0))
    }
}

impl PartialOrd for DebtorSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<usize> for DebtorSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(DebtorSet::EMPTY, DebtorSet::insert)
    }
}

impl IntoIterator for DebtorSet {
    type Item = usize;
    type IntoIter = Members;
    fn into_iter(self) -> Members {
        self.iter()
    }
}

pub struct Members(u32);

impl Iterator for Members {
    type Item = usize;
    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let k = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(k)
    }
}

pub struct Subsets {
    set: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = DebtorSet;
    fn next(&mut self) -> Option<DebtorSet> {
        let cur = self.next?;
        self.next = if cur == self.set {
            None
        } else {
            // next submask in increasing order
            Some((cur | !self.set).wrapping_add(1) & self.set)
        };
        Some(DebtorSet(cur))
    }
}

impl fmt::Display for DebtorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, k) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, thiserror::Error)]
#[error("cannot parse debtor set {0:?}: expected a mask (5, 0b101, 0x5), a list {{0,2}}, `all` or `none`")]
pub struct ParseDebtorSetError(String);

impl FromStr for DebtorSet {
    type Err = ParseDebtorSetError;

    /// Parses a numeric mask (`5`, `0b101`, `0x5`), a brace list (`{0,2}`) or
    /// `none`. `all` cannot be resolved without `n` and is rejected here; see
    /// [`DebtorSet::parse_with_n`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDebtorSetError(s.to_string());
        let t = s.trim();
        if t.eq_ignore_ascii_case("none") || t == "{}" {
            return Ok(DebtorSet::EMPTY);
        }
        if let Some(inner) = t.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            let mut set = DebtorSet::EMPTY;
            for part in inner.split(',') {
                let k: usize = part.trim().parse().map_err(|_| err())?;
                if k >= MAX_DEBTORS {
                    return Err(err());
                }
                set = set.insert(k);
            }
            return Ok(set);
        }
        let mask = if let Some(b) = t.strip_prefix("0b") {
            u32::from_str_radix(b, 2)
        } else if let Some(h) = t.strip_prefix("0x") {
            u32::from_str_radix(h, 16)
        } else {
            t.parse()
        }
        .map_err(|_| err())?;
        if mask >> MAX_DEBTORS != 0 {
            return Err(err());
        }
        Ok(DebtorSet(mask))
    }
}

impl DebtorSet {
    /// Like [`FromStr`], additionally accepting `all` for `{0..n}`.
    pub fn parse_with_n(s: &str, n: usize) -> Result<Self, ParseDebtorSetError> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(DebtorSet::full(n));
        }
        let set: DebtorSet = s.parse()?;
        if !set.is_subset(DebtorSet::full(n)) {
            return Err(ParseDebtorSetError(s.to_string()));
        }
        Ok(set)
    }
}
