//! Color-class size sequences and their enumeration.
//!
//! A sequence `(e_1, ..., e_k)` of nonnegative integers with
//! `e_1 >= ... >= e_k` and `sum = n(n-1)/2` prescribes how many edges of
//! `K_n` each of `k` colors must receive. Entries equal to zero are
//! permitted and mean the color is unused; [`SeqKey`] strips them so that
//! logically identical prescriptions share one identity.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("sequence must have at least one entry")]
    Empty,
    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: i64 },
    #[error("entries sum to {actual}, expected {expected} for n = {n}")]
    SumMismatch { n: i64, expected: i64, actual: i64 },
    #[error("n must be at least 1, got {0}")]
    BadVertexCount(i64),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

/// `n(n-1)/2`, failing loudly instead of wrapping past `2^62`.
pub fn binom2(n: i64) -> Result<i64, SeqError> {
    if n < 2 {
        return Ok(0);
    }
    let prod = n.checked_mul(n - 1).ok_or(SeqError::Overflow("binom2"))?;
    let half = prod / 2;
    if half > (1i64 << 62) {
        return Err(SeqError::Overflow("binom2"));
    }
    Ok(half)
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(a >= 0 && b > 0);
    (a + b - 1) / b
}

/// A validated size prescription: counts sorted non-increasing, summing to
/// `binom2(n)`. Zero entries are kept; `canonical_key` drops them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GallaiSequence {
    n: i64,
    counts: Vec<i64>,
}

/// Checks shape and sum, returning the sequence with counts sorted
/// non-increasing. The raw slice may arrive in any order.
pub fn validate(n: i64, raw: &[i64]) -> Result<GallaiSequence, SeqError> {
    if n < 1 {
        return Err(SeqError::BadVertexCount(n));
    }
    if raw.is_empty() {
        return Err(SeqError::Empty);
    }
    for (index, &value) in raw.iter().enumerate() {
        if value < 0 {
            return Err(SeqError::NegativeEntry { index, value });
        }
    }
    let expected = binom2(n)?;
    let mut actual: i64 = 0;
    for &value in raw {
        actual = actual
            .checked_add(value)
            .ok_or(SeqError::Overflow("sequence sum"))?;
    }
    if actual != expected {
        return Err(SeqError::SumMismatch { n, expected, actual });
    }
    let mut counts = raw.to_vec();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    Ok(GallaiSequence { n, counts })
}

impl GallaiSequence {
    pub fn new(n: i64, raw: &[i64]) -> Result<Self, SeqError> {
        validate(n, raw)
    }

    /// Internal constructor for counts already sorted non-increasing and
    /// known to sum correctly.
    pub(crate) fn from_sorted_unchecked(n: i64, counts: Vec<i64>) -> Self {
        debug_assert!(counts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert_eq!(
            counts.iter().sum::<i64>(),
            binom2(n).expect("sum within range")
        );
        GallaiSequence { n, counts }
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// Declared number of colors, counting zero-size classes.
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    /// Counts, sorted non-increasing.
    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    pub fn total(&self) -> i64 {
        self.counts.iter().sum()
    }

    /// True when every class is nonempty.
    pub fn is_strict(&self) -> bool {
        *self.counts.last().expect("nonempty") >= 1
    }

    pub fn nonzero_count(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Identity under color relabeling and unused colors: vertex count plus
    /// the positive counts in sorted order.
    pub fn canonical_key(&self) -> SeqKey {
        let counts: Vec<i64> = self.counts.iter().copied().filter(|&c| c > 0).collect();
        SeqKey { n: self.n, counts }
    }
}

impl fmt::Display for GallaiSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Canonical lookup key: `n` plus positive counts sorted non-increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeqKey {
    pub n: i64,
    pub counts: Vec<i64>,
}

impl SeqKey {
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn to_sequence(&self) -> GallaiSequence {
        GallaiSequence::from_sorted_unchecked(self.n, self.counts.clone())
    }
}

impl fmt::Display for SeqKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        write!(f, "{}:{}", self.n, parts.join(","))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed sequence key")]
pub struct KeyParseError;

impl FromStr for SeqKey {
    type Err = KeyParseError;

    fn from_str(s: &str) -> Result<Self, KeyParseError> {
        let (n_part, rest) = s.split_once(':').ok_or(KeyParseError)?;
        let n: i64 = n_part.parse().map_err(|_| KeyParseError)?;
        let mut counts = Vec::new();
        if !rest.is_empty() {
            for piece in rest.split(',') {
                let v: i64 = piece.parse().map_err(|_| KeyParseError)?;
                if v <= 0 {
                    return Err(KeyParseError);
                }
                counts.push(v);
            }
        }
        if counts.windows(2).any(|w| w[0] < w[1]) {
            return Err(KeyParseError);
        }
        Ok(SeqKey { n, counts })
    }
}

/// Streams every sequence for `(n, k)` in reverse-lexicographic order:
/// partitions of `binom2(n)` into exactly `k` parts, all positive when
/// `strict`, zeros admitted otherwise.
pub fn enumerate_sequences(n: i64, k: usize, strict: bool) -> Result<SeqEnum, SeqError> {
    if n < 1 {
        return Err(SeqError::BadVertexCount(n));
    }
    if k == 0 {
        return Err(SeqError::Empty);
    }
    let total = binom2(n)?;
    let mut e = SeqEnum {
        n,
        k,
        strict,
        stack: Vec::with_capacity(k),
        prefix: Vec::with_capacity(k),
    };
    let first = SeqEnum::start_value(strict, total, k, i64::MAX);
    e.stack.push(Frame { m: total, v: first });
    Ok(e)
}

struct Frame {
    /// Sum still to distribute over this and later positions.
    m: i64,
    /// Next candidate value for this position; counts down.
    v: i64,
}

pub struct SeqEnum {
    n: i64,
    k: usize,
    strict: bool,
    stack: Vec<Frame>,
    prefix: Vec<i64>,
}

impl SeqEnum {
    fn start_value(strict: bool, m: i64, slots: usize, cap: i64) -> i64 {
        let hi = if strict { m - (slots as i64 - 1) } else { m };
        hi.min(cap)
    }

    fn low_value(strict: bool, m: i64, slots: usize) -> i64 {
        let lo = ceil_div(m, slots as i64);
        if strict {
            lo.max(1)
        } else {
            lo
        }
    }
}

impl Iterator for SeqEnum {
    type Item = GallaiSequence;

    fn next(&mut self) -> Option<GallaiSequence> {
        loop {
            let frame = self.stack.last()?;
            let (m, v) = (frame.m, frame.v);
            let slots = self.k - self.prefix.len();
            if v < Self::low_value(self.strict, m, slots) {
                self.stack.pop();
                if !self.stack.is_empty() {
                    self.prefix.pop();
                }
                continue;
            }
            self.stack.last_mut().expect("nonempty").v -= 1;
            if slots == 1 {
                // v == m here: the bounds pin the last position.
                let mut counts = self.prefix.clone();
                counts.push(v);
                return Some(GallaiSequence::from_sorted_unchecked(self.n, counts));
            }
            let child_m = m - v;
            let child_start = Self::start_value(self.strict, child_m, slots - 1, v);
            self.prefix.push(v);
            self.stack.push(Frame {
                m: child_m,
                v: child_start,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent counter: partitions of `m` into exactly `k` positive parts.
    fn partition_count(m: usize, k: usize) -> u64 {
        if k == 0 {
            return u64::from(m == 0);
        }
        let mut table = vec![vec![0u64; k + 1]; m + 1];
        table[0][0] = 1;
        for mm in 1..=m {
            for kk in 1..=k.min(mm) {
                table[mm][kk] = table[mm - 1][kk - 1]
                    + if mm >= 2 * kk { table[mm - kk][kk] } else { 0 };
            }
        }
        table[m][k]
    }

    fn partition_count_at_most(m: usize, k: usize) -> u64 {
        (0..=k).map(|j| partition_count(m, j)).sum()
    }

    #[test]
    fn validate_accepts_any_order_and_sorts() {
        let s = validate(6, &[0, 7, 2, 4, 2]).unwrap();
        assert_eq!(s.counts(), &[7, 4, 2, 2, 0]);
        assert_eq!(s.k(), 5);
        assert!(!s.is_strict());
        assert_eq!(s.nonzero_count(), 4);
    }

    #[test]
    fn validate_rejects_sum_mismatch_with_both_values() {
        let err = validate(5, &[9, 2]).unwrap_err();
        assert_eq!(
            err,
            SeqError::SumMismatch {
                n: 5,
                expected: 10,
                actual: 11
            }
        );
    }

    #[test]
    fn validate_rejects_negative_and_empty() {
        assert_eq!(
            validate(4, &[7, -1]).unwrap_err(),
            SeqError::NegativeEntry { index: 1, value: -1 }
        );
        assert_eq!(validate(1, &[]).unwrap_err(), SeqError::Empty);
    }

    #[test]
    fn single_vertex_needs_all_zeros() {
        let s = validate(1, &[0, 0]).unwrap();
        assert_eq!(s.total(), 0);
        assert_eq!(s.canonical_key().counts, Vec::<i64>::new());
    }

    #[test]
    fn canonical_key_strips_zeros_and_sorts() {
        let s = validate(6, &[0, 7, 2, 4, 2]).unwrap();
        let key = s.canonical_key();
        assert_eq!(key.n, 6);
        assert_eq!(key.counts, vec![7, 4, 2, 2]);
        let same = validate(6, &[2, 4, 7, 2]).unwrap();
        assert_eq!(same.canonical_key(), key);
    }

    #[test]
    fn key_display_and_parse_round_trip() {
        let key = validate(9, &[6, 6, 12, 6, 6]).unwrap().canonical_key();
        assert_eq!(key.to_string(), "9:12,6,6,6,6");
        let back: SeqKey = key.to_string().parse().unwrap();
        assert_eq!(back, key);
    }

    #[test]
    fn enumerate_n4_k3_strict_exact_set() {
        let got: Vec<Vec<i64>> = enumerate_sequences(4, 3, true)
            .unwrap()
            .map(|s| s.counts().to_vec())
            .collect();
        assert_eq!(got, vec![vec![4, 1, 1], vec![3, 2, 1], vec![2, 2, 2]]);
    }

    #[test]
    fn enumerate_nonstrict_pads_with_zeros() {
        let got: Vec<Vec<i64>> = enumerate_sequences(4, 3, false)
            .unwrap()
            .map(|s| s.counts().to_vec())
            .collect();
        assert_eq!(got.len(), partition_count_at_most(6, 3) as usize);
        assert_eq!(got.first().unwrap(), &vec![6, 0, 0]);
        assert_eq!(got.last().unwrap(), &vec![2, 2, 2]);
    }

    #[test]
    fn enumeration_is_reverse_lexicographic_and_valid() {
        for (n, k, strict) in [(5, 3, true), (6, 4, true), (6, 4, false), (7, 2, true)] {
            let seqs: Vec<GallaiSequence> = enumerate_sequences(n, k, strict).unwrap().collect();
            for s in &seqs {
                assert_eq!(s.k(), k);
                assert!(validate(n, s.counts()).is_ok(), "yield must validate");
                if strict {
                    assert!(s.is_strict());
                }
            }
            for w in seqs.windows(2) {
                assert!(
                    w[0].counts() > w[1].counts(),
                    "order violated: {} then {}",
                    w[0],
                    w[1]
                );
            }
        }
    }

    #[test]
    fn stream_lengths_match_partition_recurrence() {
        for n in 2..=8i64 {
            let m = binom2(n).unwrap() as usize;
            for k in 1..=6usize {
                let strict_len = enumerate_sequences(n, k, true).unwrap().count();
                assert_eq!(strict_len as u64, partition_count(m, k), "n={n} k={k}");
                let loose_len = enumerate_sequences(n, k, false).unwrap().count();
                assert_eq!(loose_len as u64, partition_count_at_most(m, k));
            }
        }
    }

    #[test]
    fn ten_five_stream_length_matches_recurrence() {
        let len = enumerate_sequences(10, 5, true).unwrap().count();
        assert_eq!(len as u64, partition_count(45, 5));
    }

    #[test]
    fn binom2_overflow_is_loud() {
        assert!(binom2(4_000_000_000).is_err());
        assert_eq!(binom2(0).unwrap(), 0);
        assert_eq!(binom2(1).unwrap(), 0);
        assert_eq!(binom2(12).unwrap(), 66);
    }
}
