//! Edge colorings of complete graphs without rainbow triangles.
//!
//! A coloring of the edges of `K_n` is *admissible* here when no triangle
//! carries three distinct colors. Given a target distribution of color-class
//! sizes `e_1 >= e_2 >= ... >= e_k` summing to `n(n-1)/2`, this crate can
//!
//! * construct such a coloring by iterated cuts ([`cut_engine`]),
//! * decide exactly whether any such coloring exists at small `n` ([`exact`]),
//! * and evaluate the threshold bounds that govern when every distribution
//!   is realizable ([`bounds`]).
//!
//! [`seqcore`] holds the sequence type and enumeration; [`coloring`] holds
//! the coloring type, the triangle scan, and certificate serialization.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod coloring;
pub mod cut_engine;
pub mod exact;
pub mod seqcore;

pub use coloring::{Certificate, EdgeColoring, RainbowWitness};
pub use seqcore::{GallaiSequence, SeqKey};
