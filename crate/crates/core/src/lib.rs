//! Exact and Monte-Carlo analysis of how shuffled a deck of n cards is.
//!
//! The library builds shuffle procedures as exact single-step laws or
//! deterministic permutations ([`models`]), runs them as random walks on the
//! symmetric group with exact rational arithmetic ([`markov`]), evaluates the
//! closed-form and coupling-bound approximations that scale to full decks
//! ([`analytic`]), and cross-validates everything with seeded simulation
//! ([`sim`]).

pub mod analytic;
pub mod decimal;
pub mod error;
pub mod markov;
pub mod models;
pub mod perm;
pub mod sim;

pub use error::{Error, Result};
pub use perm::{Arrangement, Rank};

/// Exact scalar used by the engine: arbitrary-precision rational.
pub type Rational = num::BigRational;

/// Arbitrary-precision integer re-export for table values.
pub type BigInt = num::BigInt;

pub type ExactDistribution = markov::Distribution<Rational>;
pub type ExactTransitionMatrix = markov::TransitionMatrix<Rational>;
pub type ExactCurve = markov::DistanceCurve<Rational>;
