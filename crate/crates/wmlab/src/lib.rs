//! Windowed-set laboratory for additive set arithmetic over finite integer
//! windows: candidate-set generators (periodic, rotation-coded, quadratic-Weyl,
//! Bernoulli), density and gap statistics, bit-parallel sumsets and
//! polynomial-intersection sets, finite shift-average norms, and a finitary
//! van der Corput checker, wired into reproducible named experiments.
//!
//! Everything is computed over half-open windows `[lo, hi)` of the naturals
//! (0-indexed, 0 included). Sums that classically start at 1 are expressed by
//! evaluating from index 1 inside a window starting at 0 or 1.

pub mod bitwindow;
pub mod corr;
pub mod error;
pub mod experiments;
pub mod poly;
pub mod report;
pub mod rng;
pub mod seqgen;
pub mod setops;
pub mod stats;

pub use bitwindow::{BitWindow, Membership};
pub use error::{Error, Result};
pub use poly::Poly;
pub use seqgen::{GeneratorSpec, NormalizedSeq};

/// Exact rational used throughout the exact arithmetic mode.
pub type Rat = num_rational::Ratio<i128>;
