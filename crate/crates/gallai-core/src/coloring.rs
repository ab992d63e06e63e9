//! Edge colorings of `K_n`, the rainbow-triangle scan, and certificates.
//!
//! Edges are stored as a flat array in pair-rank order
//! `(0,1),(0,2),...,(0,n-1),(1,2),...`; colors are 1-based. Color 0 means
//! "not yet colored" and exists only inside the builder; a finished
//! [`EdgeColoring`] always has every edge colored.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seqcore::GallaiSequence;

/// Index of edge `{u, v}` (with `u < v`) in pair-rank order.
pub fn pair_rank(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

pub fn edge_count(n: usize) -> usize {
    n * (n - 1) / 2
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColoringError {
    #[error("expected {expected} edge colors for n = {n}, got {got}")]
    WrongLength { n: usize, expected: usize, got: usize },
    #[error("edge {index} has color {color}, outside 1..={k}")]
    ColorOutOfRange { index: usize, color: u32, k: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    n: usize,
    k: usize,
    colors: Vec<u32>,
}

impl fmt::Debug for EdgeColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EdgeColoring(n={}, k={}, [", self.n, self.k)?;
        for (i, c) in self.colors.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "])")
    }
}

/// The lexicographically least triangle carrying three distinct colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RainbowWitness {
    pub vertices: [usize; 3],
    pub colors: [u32; 3],
}

impl fmt::Display for RainbowWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [u, v, w] = self.vertices;
        let [a, b, c] = self.colors;
        write!(f, "triangle ({u},{v},{w}) with colors ({a},{b},{c})")
    }
}

impl EdgeColoring {
    pub fn new(n: usize, k: usize, colors: Vec<u32>) -> Result<Self, ColoringError> {
        let expected = edge_count(n);
        if colors.len() != expected {
            return Err(ColoringError::WrongLength {
                n,
                expected,
                got: colors.len(),
            });
        }
        if let Some((index, &color)) = colors
            .iter()
            .enumerate()
            .find(|(_, &c)| c == 0 || c as usize > k)
        {
            return Err(ColoringError::ColorOutOfRange { index, color, k });
        }
        Ok(EdgeColoring { n, k, colors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn color_of(&self, u: usize, v: usize) -> u32 {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        self.colors[pair_rank(self.n, u, v)]
    }

    /// Flat colors in pair-rank order.
    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// Class sizes sorted non-increasing, plus for each color index
    /// (0-based) its rank in the sorted order. Ties keep color order.
    pub fn census(&self) -> (GallaiSequence, Vec<usize>) {
        let mut counts = vec![0i64; self.k];
        for &c in &self.colors {
            counts[(c - 1) as usize] += 1;
        }
        let mut order: Vec<usize> = (0..self.k).collect();
        order.sort_by_key(|&i| (-counts[i], i));
        let mut rank_of_color = vec![0usize; self.k];
        for (rank, &color_idx) in order.iter().enumerate() {
            rank_of_color[color_idx] = rank;
        }
        let sorted: Vec<i64> = order.iter().map(|&i| counts[i]).collect();
        (
            GallaiSequence::from_sorted_unchecked(self.n as i64, sorted),
            rank_of_color,
        )
    }

    /// Full triangle scan. `None` means no triangle has three distinct
    /// colors; otherwise the lexicographically least such triangle.
    pub fn check_gallai(&self) -> Option<RainbowWitness> {
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                let cuv = self.colors[pair_rank(self.n, u, v)];
                for w in (v + 1)..self.n {
                    let cuw = self.colors[pair_rank(self.n, u, w)];
                    let cvw = self.colors[pair_rank(self.n, v, w)];
                    if cuv != cuw && cuv != cvw && cuw != cvw {
                        return Some(RainbowWitness {
                            vertices: [u, v, w],
                            colors: [cuv, cuw, cvw],
                        });
                    }
                }
            }
        }
        None
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("coloring is on {got} vertices, sequence prescribes {expected}")]
    VertexCountMismatch { expected: i64, got: usize },
    #[error("rainbow {0}")]
    RainbowFound(RainbowWitness),
    #[error("class sizes {actual:?} do not match prescribed {expected:?}")]
    CensusMismatch { expected: Vec<i64>, actual: Vec<i64> },
}

/// A certificate is accepted when the coloring has no rainbow triangle and
/// its class sizes equal the prescribed ones up to color relabeling
/// (zero-size classes on either side are immaterial).
pub fn verify_certificate(c: &EdgeColoring, s: &GallaiSequence) -> Result<(), VerifyError> {
    if s.n() != c.n() as i64 {
        return Err(VerifyError::VertexCountMismatch {
            expected: s.n(),
            got: c.n(),
        });
    }
    if let Some(witness) = c.check_gallai() {
        return Err(VerifyError::RainbowFound(witness));
    }
    let (census, _) = c.census();
    let actual = census.canonical_key().counts;
    let expected = s.canonical_key().counts;
    if actual != expected {
        return Err(VerifyError::CensusMismatch { expected, actual });
    }
    Ok(())
}

/// Incremental coloring under construction; color 0 marks unset edges.
#[derive(Debug, Clone)]
pub(crate) struct ColoringBuilder {
    n: usize,
    k: usize,
    colors: Vec<u32>,
    unset: usize,
}

impl ColoringBuilder {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        let m = edge_count(n);
        ColoringBuilder {
            n,
            k,
            colors: vec![0; m],
            unset: m,
        }
    }

    pub(crate) fn set(&mut self, u: usize, v: usize, color: u32) {
        debug_assert!(color >= 1 && color as usize <= self.k);
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        let slot = &mut self.colors[pair_rank(self.n, u, v)];
        debug_assert_eq!(*slot, 0, "edge ({u},{v}) colored twice");
        *slot = color;
        self.unset -= 1;
    }

    /// Every edge must be colored by now; an unset edge is a caller bug.
    pub(crate) fn finish(self) -> EdgeColoring {
        assert_eq!(self.unset, 0, "{} edges left uncolored", self.unset);
        EdgeColoring {
            n: self.n,
            k: self.k,
            colors: self.colors,
        }
    }
}

/// On-disk form of a coloring plus the sequence it realizes. JSON with a
/// fixed field order, so emit → parse → emit is byte-identical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub k: usize,
    pub sequence: Vec<i64>,
    pub edges: Vec<u32>,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("certificate i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("certificate is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("certificate shape: {0}")]
    Shape(#[from] ColoringError),
    #[error("certificate declares {declared} colors but sequence has {got} entries")]
    SequenceLength { declared: usize, got: usize },
}

impl Certificate {
    pub fn from_parts(coloring: &EdgeColoring, sequence: &GallaiSequence) -> Self {
        Certificate {
            n: coloring.n(),
            k: sequence.k(),
            sequence: sequence.counts().to_vec(),
            edges: coloring.colors().to_vec(),
        }
    }

    /// Structural checks only; semantic acceptance is `verify_certificate`.
    pub fn coloring(&self) -> Result<EdgeColoring, CertificateError> {
        if self.sequence.len() != self.k {
            return Err(CertificateError::SequenceLength {
                declared: self.k,
                got: self.sequence.len(),
            });
        }
        // Edge colors index the full declared palette even if the sequence
        // leaves some classes empty.
        Ok(EdgeColoring::new(self.n, self.k, self.edges.clone())?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CertificateError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), CertificateError> {
        Ok(std::fs::write(path, self.to_json() + "\n")?)
    }

    pub fn load(path: &Path) -> Result<Self, CertificateError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(text.trim_end())
    }
}

/// Two-color fill in pair-rank order: the first `counts[0]` edges get color
/// 1 and so on. Admissible whenever at most two counts are positive.
pub(crate) fn sequential_fill(n: usize, counts: &[i64]) -> EdgeColoring {
    debug_assert!(counts.iter().filter(|&&c| c > 0).count() <= 2 || n <= 2);
    let mut colors = Vec::with_capacity(edge_count(n));
    for (idx, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            colors.push((idx + 1) as u32);
        }
    }
    debug_assert_eq!(colors.len(), edge_count(n));
    EdgeColoring {
        n,
        k: counts.len().max(1),
        colors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::validate;

    #[test]
    fn pair_rank_is_the_row_major_upper_triangle() {
        let n = 5;
        let mut seen = vec![false; edge_count(n)];
        let mut expect = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                let r = pair_rank(n, u, v);
                assert_eq!(r, expect);
                seen[r] = true;
                expect += 1;
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn three_perfect_matchings_on_k4_are_rainbow() {
        // Matchings {01,23}, {02,13}, {03,12} as colors 1,2,3.
        let mut colors = vec![0u32; 6];
        colors[pair_rank(4, 0, 1)] = 1;
        colors[pair_rank(4, 2, 3)] = 1;
        colors[pair_rank(4, 0, 2)] = 2;
        colors[pair_rank(4, 1, 3)] = 2;
        colors[pair_rank(4, 0, 3)] = 3;
        colors[pair_rank(4, 1, 2)] = 3;
        let c = EdgeColoring::new(4, 3, colors).unwrap();
        let w = c.check_gallai().expect("must find a rainbow triangle");
        assert_eq!(w.vertices, [0, 1, 2], "least witness comes first");
    }

    #[test]
    fn two_colors_are_always_admissible() {
        let s = validate(5, &[7, 3]).unwrap();
        let c = sequential_fill(5, s.counts());
        assert!(c.check_gallai().is_none());
        assert!(verify_certificate(&c, &s).is_ok());
    }

    #[test]
    fn census_sorts_and_reports_ranks() {
        let colors = vec![2, 2, 2, 1, 1, 3];
        let c = EdgeColoring::new(4, 3, colors).unwrap();
        let (census, rank_of_color) = c.census();
        assert_eq!(census.counts(), &[3, 2, 1]);
        assert_eq!(rank_of_color, vec![1, 0, 2]);
    }

    #[test]
    fn verify_rejects_census_mismatch_up_to_relabeling() {
        let s = validate(4, &[3, 2, 1]).unwrap();
        let good = EdgeColoring::new(4, 3, vec![2, 2, 2, 1, 1, 3]).unwrap();
        assert!(verify_certificate(&good, &s).is_ok());
        let bad_seq = validate(4, &[4, 1, 1]).unwrap();
        match verify_certificate(&good, &bad_seq) {
            Err(VerifyError::CensusMismatch { expected, actual }) => {
                assert_eq!(expected, vec![4, 1, 1]);
                assert_eq!(actual, vec![3, 2, 1]);
            }
            other => panic!("expected census mismatch, got {other:?}"),
        }
    }

    #[test]
    fn verify_ignores_declared_zero_classes() {
        let s = validate(4, &[3, 2, 1, 0, 0]).unwrap();
        let c = EdgeColoring::new(4, 3, vec![2, 2, 2, 1, 1, 3]).unwrap();
        assert!(verify_certificate(&c, &s).is_ok());
    }

    #[test]
    fn certificate_round_trip_is_byte_exact() {
        let s = validate(4, &[3, 2, 1]).unwrap();
        let c = EdgeColoring::new(4, 3, vec![2, 2, 2, 1, 1, 3]).unwrap();
        let cert = Certificate::from_parts(&c, &s);
        let text = cert.to_json();
        let back = Certificate::from_json(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), text);
        assert_eq!(back.coloring().unwrap(), c);
    }

    #[test]
    fn certificate_rejects_out_of_range_colors() {
        let cert = Certificate {
            n: 3,
            k: 2,
            sequence: vec![2, 1],
            edges: vec![1, 2, 3],
        };
        assert!(matches!(
            cert.coloring(),
            Err(CertificateError::Shape(ColoringError::ColorOutOfRange { .. }))
        ));
    }
}
