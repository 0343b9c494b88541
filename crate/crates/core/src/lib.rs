//! Exact analysis of the de Bruijn process: a continuous-time Markov chain on
//! words of length `L` over `{1..n}` that moves `u -> t(u).a` at a rate set
//! by the final block of the target word.
//!
//! Everything except [`simulator`] works over exact rationals. Closed forms
//! (stationary law, partition function, spectrum, correlations) live beside
//! independent oracles (null spaces, characteristic polynomials, exhaustive
//! enumeration) so each can be checked against the other; [`verify`] runs
//! the full comparison over a grid of rate points.

pub mod error;
pub mod linalg;
pub mod matrices;
pub mod rational;
pub mod simulator;
pub mod spectrum;
pub mod specials;
pub mod stationary;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use rational::Rational;
pub use words::{Block, RateSystem, Word};
