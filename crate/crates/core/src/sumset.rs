//! Dense bitset sumsets.
//!
//! A [`SumsetMask`] over window `N` holds bit `j` for every `j <= N` that is a
//! sub-multiset sum of the parts. Parts are added by shift-OR; a part of
//! multiplicity `m` is split into chunks `1, 2, 4, ..., rest` so it costs
//! `O(log m)` passes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::perm_model::{CycleType, MultiplicityVector};

/// Largest total weight accepted by [`brute_force_sumset`].
pub const BRUTE_FORCE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SumsetMask {
    window: usize,
    words: Vec<u64>,
}

impl SumsetMask {
    /// The sumset of the empty multiset: `{0}`.
    pub fn empty_sum(window: usize) -> Self {
        let mut words = vec![0u64; window / 64 + 1];
        words[0] = 1;
        Self { window, words }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn contains(&self, j: usize) -> bool {
        j <= self.window && self.words[j / 64] >> (j % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set bits in `lo..=hi` (clamped to the window).
    pub fn count_range(&self, lo: usize, hi: usize) -> usize {
        (lo..=hi.min(self.window))
            .filter(|&j| self.contains(j))
            .count()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn to_set(&self) -> BTreeSet<usize> {
        self.ones().collect()
    }

    fn set(&mut self, j: usize, on: bool) {
        if on {
            self.words[j / 64] |= 1 << (j % 64);
        } else {
            self.words[j / 64] &= !(1 << (j % 64));
        }
    }

    fn clear_above_window(&mut self) {
        let used = self.window % 64 + 1;
        if used < 64 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << used) - 1;
        }
    }

    /// `self |= self << shift`, truncated to the window.
    fn shift_or(&mut self, shift: usize) {
        if shift == 0 || shift > self.window {
            return;
        }
        let word_shift = shift / 64;
        let bit_shift = shift % 64;
        let len = self.words.len();
        for i in (word_shift..len).rev() {
            let src = i - word_shift;
            let mut v = self.words[src] << bit_shift;
            if bit_shift > 0 && src > 0 {
                v |= self.words[src - 1] >> (64 - bit_shift);
            }
            self.words[i] |= v;
        }
        self.clear_above_window();
    }

    /// Adds `multiplicity` copies of `part` to the underlying multiset.
    pub fn add_parts(&mut self, part: usize, multiplicity: usize) {
        if part == 0 || part > self.window {
            return;
        }
        let mut remaining = multiplicity;
        let mut chunk = 1;
        while remaining > 0 {
            let c = chunk.min(remaining);
            match c.checked_mul(part) {
                Some(s) if s <= self.window => self.shift_or(s),
                _ => break,
            }
            remaining -= c;
            chunk *= 2;
        }
        // Larger chunks only overshoot the window; nothing left to add.
    }

    pub fn and_assign(&mut self, other: &SumsetMask) -> Result<()> {
        if other.window != self.window {
            return Err(Error::WindowMismatch {
                expected: self.window,
                found: other.window,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        Ok(())
    }

    /// True if some `j` with `0 < j < window` is set.
    pub fn has_interior(&self) -> bool {
        let mut copy_first = self.words[0] & !1;
        let last = self.words.len() - 1;
        let top = self.window;
        if last == 0 {
            copy_first &= !(1u64 << (top % 64));
            return copy_first != 0;
        }
        if copy_first != 0 || self.words[1..last].iter().any(|&w| w != 0) {
            return true;
        }
        self.words[last] & !(1u64 << (top % 64)) != 0
    }

    /// Bit `j` set iff bit `window - j` set.
    pub fn is_symmetric(&self) -> bool {
        (0..=self.window / 2).all(|j| self.contains(j) == self.contains(self.window - j))
    }
}

/// Sumset of a multiset of positive parts, truncated to `window`.
pub fn sumset_of_parts(parts: &[usize], window: usize) -> SumsetMask {
    let mut counts = std::collections::BTreeMap::new();
    for &p in parts {
        *counts.entry(p).or_insert(0usize) += 1;
    }
    let mut mask = SumsetMask::empty_sum(window);
    for (p, m) in counts {
        mask.add_parts(p, m);
    }
    mask
}

/// All invariant-set sizes of a permutation with this cycle type, including
/// the trivial sizes 0 and n.
pub fn sumset_of_cycle_type(ct: &CycleType) -> SumsetMask {
    let mut mask = SumsetMask::empty_sum(ct.n());
    for (&k, &m) in ct.counts() {
        mask.add_parts(k, m);
    }
    mask
}

/// Sumset of the Poisson-model multiset restricted to `[0, window]`.
pub fn sumset_of_multiplicities(mv: &MultiplicityVector, window: usize) -> Result<SumsetMask> {
    if window > mv.limit() {
        return Err(invalid(format!(
            "window {window} exceeds truncation {}",
            mv.limit()
        )));
    }
    let mut mask = SumsetMask::empty_sum(window);
    for &(k, c) in mv.nonzero() {
        if k > window {
            break;
        }
        mask.add_parts(k, c as usize);
    }
    Ok(mask)
}

/// Common elements of all masks; with `exclude_endpoints`, 0 and `window`
/// are dropped before reporting.
pub fn intersect_nontrivial(
    masks: &[SumsetMask],
    window: usize,
    exclude_endpoints: bool,
) -> Result<Vec<usize>> {
    let Some(first) = masks.first() else {
        return Err(invalid("intersection of zero masks"));
    };
    if first.window != window {
        return Err(Error::WindowMismatch {
            expected: window,
            found: first.window,
        });
    }
    let mut acc = first.clone();
    for m in &masks[1..] {
        acc.and_assign(m)?;
    }
    if exclude_endpoints {
        acc.set(0, false);
        acc.set(window, false);
    }
    Ok(acc.ones().collect())
}

/// Sumset by enumerating every sub-multiset. Total weight must not exceed
/// [`BRUTE_FORCE_CAP`].
pub fn brute_force_sumset(parts: &[usize]) -> Result<BTreeSet<usize>> {
    let total: usize = parts.iter().sum();
    if total > BRUTE_FORCE_CAP {
        return Err(Error::OracleLimit {
            what: "total weight",
            value: total,
            cap: BRUTE_FORCE_CAP,
        });
    }
    if parts.contains(&0) {
        return Err(invalid("parts must be positive"));
    }
    let mut out = BTreeSet::new();
    for subset in 0u32..(1 << parts.len()) {
        let s = parts
            .iter()
            .enumerate()
            .filter(|(i, _)| subset >> i & 1 == 1)
            .map(|(_, &p)| p)
            .sum();
        out.insert(s);
    }
    Ok(out)
}
