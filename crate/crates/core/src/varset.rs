//! Fixed-width variable sets used on the hot path of the search.

use std::fmt;

use crate::cnf::Var;

/// Largest variable index the search engine can address.
pub const MAX_ENGINE_VARS: u32 = 128;

/// A set of variables `1..=128` packed into a single `u128`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarSet(u128);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    #[inline]
    pub fn bits(self) -> u128 {
        self.0
    }

    #[inline]
    pub fn from_bits(bits: u128) -> Self {
        VarSet(bits)
    }

    #[inline]
    pub fn singleton(v: Var) -> Self {
        debug_assert!((1..=MAX_ENGINE_VARS).contains(&v));
        VarSet(1u128 << (v - 1))
    }

    pub fn from_vars<I: IntoIterator<Item = Var>>(vars: I) -> Self {
        vars.into_iter().fold(VarSet::EMPTY, |s, v| s.with(v))
    }

    #[inline]
    pub fn contains(self, v: Var) -> bool {
        self.0 & (1u128 << (v - 1)) != 0
    }

    #[inline]
    pub fn with(self, v: Var) -> Self {
        self | VarSet::singleton(v)
    }

    #[inline]
    pub fn without(self, v: Var) -> Self {
        VarSet(self.0 & !(1u128 << (v - 1)))
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn intersects(self, other: VarSet) -> bool {
        self.0 & other.0 != 0
    }

    #[inline]
    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member, if any.
    #[inline]
    pub fn first(self) -> Option<Var> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    pub fn iter(self) -> VarSetIter {
        VarSetIter(self.0)
    }

    pub fn to_vec(self) -> Vec<Var> {
        self.iter().collect()
    }
}

impl std::ops::BitOr for VarSet {
    type Output = VarSet;
    #[inline]
    fn bitor(self, rhs: VarSet) -> VarSet {
        VarSet(self.0 | rhs.0)
    }
}

impl std::ops::BitOrAssign for VarSet {
    #[inline]
    fn bitor_assign(&mut self, rhs: VarSet) {
        self.0 |= rhs.0;
    }
}

impl std::ops::BitAnd for VarSet {
    type Output = VarSet;
    #[inline]
    fn bitand(self, rhs: VarSet) -> VarSet {
        VarSet(self.0 & rhs.0)
    }
}

impl std::ops::Sub for VarSet {
    type Output = VarSet;
    #[inline]
    fn sub(self, rhs: VarSet) -> VarSet {
        VarSet(self.0 & !rhs.0)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Ascending iterator over the members of a [`VarSet`].
pub struct VarSetIter(u128);

impl Iterator for VarSetIter {
    type Item = Var;

    #[inline]
    fn next(&mut self) -> Option<Var> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(tz + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for VarSetIter {}
