use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A subset of the generators of a Coxeter system, stored as a bitmask.
///
/// Supports up to 32 generators, which is far beyond anything finitary
/// enumeration can handle anyway.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GenSet(u32);

pub const MAX_GENERATORS: usize = 32;

impl GenSet {
    pub const EMPTY: GenSet = GenSet(0);

    pub fn from_bits(bits: u32) -> Self {
        GenSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(s: usize) -> Self {
        GenSet(1 << s)
    }

    /// All generators `0..n`.
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            GenSet(u32::MAX)
        } else {
            GenSet((1u32 << n) - 1)
        }
    }

    pub fn contains(self, s: usize) -> bool {
        s < 32 && self.0 & (1 << s) != 0
    }

    pub fn with(self, s: usize) -> Self {
        GenSet(self.0 | (1 << s))
    }

    pub fn without(self, s: usize) -> Self {
        GenSet(self.0 & !(1 << s))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: GenSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: GenSet) -> Self {
        GenSet(self.0 | other.0)
    }

    pub fn intersection(self, other: GenSet) -> Self {
        GenSet(self.0 & other.0)
    }

    pub fn difference(self, other: GenSet) -> Self {
        GenSet(self.0 & !other.0)
    }

    /// The single generator in the symmetric difference, if there is exactly one.
    pub fn single_difference(self, other: GenSet) -> Option<usize> {
        let d = self.0 ^ other.0;
        (d.count_ones() == 1).then(|| d.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |&i| bits & (1 << i) != 0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = GenSet> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some(((cur | !full).wrapping_add(1)) & full) };
            Some(GenSet(cur))
        })
    }
}

impl FromIterator<usize> for GenSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        iter.into_iter().fold(GenSet::EMPTY, GenSet::with)
    }
}

impl fmt::Debug for GenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, s) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for GenSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_vec().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GenSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = v.iter().find(|&&s| s >= MAX_GENERATORS) {
            return Err(serde::de::Error::custom(format!("generator index {bad} out of range")));
        }
        Ok(v.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_powerset() {
        let s: GenSet = [0, 2, 3].into_iter().collect();
        let subs: Vec<_> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|x| x.is_subset(s)));
        assert_eq!(GenSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn single_difference() {
        let a: GenSet = [0, 1].into_iter().collect();
        assert_eq!(a.single_difference(GenSet::singleton(0)), Some(1));
        assert_eq!(a.single_difference(GenSet::singleton(2)), None);
    }
}
