//! Fixed-length subsequence sums.
//!
//! `SumReachTable` records, for a sequence `S` and a target length `k`, which
//! pairs `(j, g)` with `0 <= j <= k` are realized by some subsequence of `S`
//! of length exactly `j` summing to `g`. Appending one element `x` updates the
//! table by `reach'(j, h) = reach(j, h) | reach(j - 1, h - x)`.

use std::sync::Arc;

use crate::error::Result;
use crate::group::{AbelianGroup, Cayley};
use crate::sequence::ZSequence;

#[derive(Clone, PartialEq, Eq)]
pub struct SumReachTable {
    cayley: Arc<Cayley>,
    k: usize,
    words: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for SumReachTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SumReachTable")
            .field("group", self.cayley.group())
            .field("k", &self.k)
            .field("cells", &self.count())
            .finish()
    }
}

impl SumReachTable {
    /// Table of the empty sequence: only `(0, 0)` is reachable.
    pub fn new(cayley: Arc<Cayley>, k: usize) -> Self {
        let words = cayley.order().div_ceil(64);
        let mut bits = vec![0u64; (k + 1) * words];
        bits[0] = 1;
        SumReachTable {
            cayley,
            k,
            words,
            bits,
        }
    }

    pub fn for_group(group: &AbelianGroup, k: usize) -> Result<Self> {
        Ok(Self::new(Arc::new(group.cayley()?), k))
    }

    pub fn from_sequence(s: &ZSequence, k: usize) -> Result<Self> {
        let mut t = Self::for_group(s.group(), k)?;
        for idx in s.indices() {
            t.push(idx);
        }
        Ok(t)
    }

    pub fn cayley(&self) -> &Arc<Cayley> {
        &self.cayley
    }

    pub fn group(&self) -> &AbelianGroup {
        self.cayley.group()
    }

    pub fn target_length(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn reach(&self, j: usize, h: usize) -> bool {
        j <= self.k && self.bits[j * self.words + h / 64] >> (h % 64) & 1 == 1
    }

    /// Whether a zero-sum subsequence of length exactly `k` exists.
    #[inline]
    pub fn has_zero_sum(&self) -> bool {
        self.reach(self.k, 0)
    }

    /// Number of reachable cells.
    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Table for the sequence with one more copy of element index `g`.
    pub fn extend(&self, g: usize) -> Self {
        let mut next = self.clone();
        next.push(g);
        next
    }

    /// In-place version of [`extend`](Self::extend).
    pub fn push(&mut self, g: usize) {
        let w = self.words;
        // descending j so row j-1 is still the pre-extension row
        for j in (1..=self.k).rev() {
            let (lower, upper) = self.bits.split_at_mut(j * w);
            let src = &lower[(j - 1) * w..];
            let dst = &mut upper[..w];
            for (wi, &word) in src.iter().enumerate() {
                let mut word = word;
                while word != 0 {
                    let h = wi * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    let t = self.cayley.add(h, g);
                    dst[t / 64] |= 1 << (t % 64);
                }
            }
        }
    }

    /// Whether `copies` further copies of `g` keep the table zero-sum free,
    /// without materializing the extended tables.
    pub fn accepts_copies(&self, g: usize, copies: usize) -> bool {
        // appending c copies of g creates a length-k zero-sum iff some
        // 1 <= c' <= c has reach(k - c', -c'·g)
        let c = &self.cayley;
        let mut shift = 0;
        for used in 1..=copies.min(self.k) {
            shift = c.add(shift, g);
            if self.reach(self.k - used, c.neg(shift)) {
                return false;
            }
        }
        !self.has_zero_sum()
    }
}

/// Whether `s` has a zero-sum subsequence of length exactly `k`.
///
/// `k = 0` is answered `true` (the empty subsequence).
pub fn has_zero_sum_subsequence(s: &ZSequence, k: usize) -> Result<bool> {
    if k > s.len() {
        return Ok(false);
    }
    Ok(SumReachTable::from_sequence(s, k)?.has_zero_sum())
}

/// Like [`has_zero_sum_subsequence`] but returns one witness `T | S`.
pub fn find_zero_sum_subsequence(s: &ZSequence, k: usize) -> Result<Option<ZSequence>> {
    if k > s.len() {
        return Ok(None);
    }
    let elems = s.indices();
    let mut tables = Vec::with_capacity(elems.len() + 1);
    tables.push(SumReachTable::for_group(s.group(), k)?);
    for &g in &elems {
        let next = tables.last().expect("nonempty").extend(g);
        tables.push(next);
    }
    if !tables.last().expect("nonempty").has_zero_sum() {
        return Ok(None);
    }
    let cayley = tables[0].cayley().clone();
    let mut chosen = Vec::with_capacity(k);
    let (mut j, mut h) = (k, 0usize);
    for i in (1..=elems.len()).rev() {
        if j == 0 {
            break;
        }
        if tables[i - 1].reach(j, h) {
            continue;
        }
        chosen.push(elems[i - 1]);
        h = cayley.sub(h, elems[i - 1]);
        j -= 1;
    }
    debug_assert!(j == 0 && h == 0);
    Ok(Some(ZSequence::from_indices(s.group(), &chosen)))
}
