//! Addressable content units: files and chunk-index sets.

use std::fmt;

/// Identifier of a file in the catalog. Files are numbered contiguously,
/// level by level, starting at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FileId(pub u32);

impl fmt::Display for FileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

/// One chunk of one file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChunkId {
    pub file: FileId,
    pub index: u32,
}

impl ChunkId {
    pub fn new(file: FileId, index: u32) -> Self {
        Self { file, index }
    }
}

impl fmt::Display for ChunkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.file, self.index)
    }
}

/// A set of chunk indices of a single file, as a 64-bit mask.
///
/// Files are capped at 64 chunks, far above the scales simulated here;
/// the mask keeps per-packet side-information sets cheap to copy and compare.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChunkSet(pub u64);

impl ChunkSet {
    pub const EMPTY: ChunkSet = ChunkSet(0);

    /// All indices `0..m`.
    pub fn full(m: u32) -> Self {
        debug_assert!(m <= 64);
        if m == 64 {
            ChunkSet(u64::MAX)
        } else {
            ChunkSet((1u64 << m) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        let mut s = ChunkSet::EMPTY;
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn insert(&mut self, index: u32) {
        debug_assert!(index < 64);
        self.0 |= 1u64 << index;
    }

    pub fn contains(&self, index: u32) -> bool {
        index < 64 && self.0 & (1u64 << index) != 0
    }

    pub fn union(&self, other: ChunkSet) -> ChunkSet {
        ChunkSet(self.0 | other.0)
    }

    pub fn intersect(&self, other: ChunkSet) -> ChunkSet {
        ChunkSet(self.0 & other.0)
    }

    pub fn difference(&self, other: ChunkSet) -> ChunkSet {
        ChunkSet(self.0 & !other.0)
    }

    pub fn is_subset_of(&self, other: ChunkSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_disjoint(&self, other: ChunkSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..64).filter(move |i| self.contains(*i))
    }
}

impl fmt::Display for ChunkSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for i in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_operations() {
        let a = ChunkSet::from_indices([0, 1, 3, 4]);
        let b = ChunkSet::from_indices([3, 4, 7]);
        assert_eq!(a.intersect(b), ChunkSet::from_indices([3, 4]));
        assert_eq!(a.union(b), ChunkSet::from_indices([0, 1, 3, 4, 7]));
        assert_eq!(a.difference(b), ChunkSet::from_indices([0, 1]));
        assert_eq!(a.len(), 4);
        assert!(ChunkSet::from_indices([3]).is_subset_of(a));
        assert!(!a.is_subset_of(b));
    }

    #[test]
    fn full_and_display() {
        assert_eq!(ChunkSet::full(12).len(), 12);
        assert_eq!(ChunkSet::full(64).len(), 64);
        assert_eq!(ChunkSet::from_indices([0, 2, 5]).to_string(), "{0,2,5}");
        assert_eq!(ChunkSet::EMPTY.to_string(), "{}");
    }
}
