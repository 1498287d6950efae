use std::fmt;

use smallvec::SmallVec;

/// A subset of `0..n_vertices` stored as a little-endian bit mask.
///
/// Up to 128 vertices the words live inline; larger universes spill to the heap.
/// Two sets are only comparable when built for the same universe size.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    words: SmallVec<[u64; 2]>,
}

impl VertexSet {
    pub fn empty(n_vertices: usize) -> Self {
        VertexSet {
            words: SmallVec::from_elem(0, n_vertices.div_ceil(64).max(1)),
        }
    }

    pub fn full(n_vertices: usize) -> Self {
        let mut set = Self::empty(n_vertices);
        for v in 0..n_vertices {
            set.insert(v);
        }
        set
    }

    /// Caller guarantees every index is below the universe size.
    pub fn from_indices(n_vertices: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(n_vertices);
        for v in indices {
            set.insert(v);
        }
        set
    }

    pub fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1u64 << (v % 64);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.words
            .get(v / 64)
            .is_some_and(|w| w & (1u64 << (v % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Largest index present plus one, or 0 for the empty set.
    pub fn span(&self) -> usize {
        for (i, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return i * 64 + 64 - w.leading_zeros() as usize;
            }
        }
        0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }

    pub(crate) fn word_count(&self) -> usize {
        self.words.len()
    }

    /// The mask as a single `u128`, when the universe fits.
    pub fn as_u128(&self) -> Option<u128> {
        match self.words.as_slice() {
            [lo] => Some(*lo as u128),
            [lo, hi] => Some(*lo as u128 | (*hi as u128) << 64),
            _ => None,
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
