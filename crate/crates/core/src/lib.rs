//! Maximization of monotone subadditive set functions that carry a
//! submodular order, together with the assortment-optimization models the
//! structure was designed for.
//!
//! The crate is organized around a small number of oracles:
//!
//! * [`oracle::ValueOracle`]: a queryable set function with exact query
//!   accounting. Every algorithm consumes one.
//! * [`constraints::Matroid`]: an independence oracle with lazily computed
//!   ranks and circuits.
//! * [`assortment::ChoiceModel`]: revenue functions for MNL and Markov
//!   choice, their monotonized objectives, and unconstrained optimizers.
//!
//! On top of these sit the single-pass maximization routines
//! ([`algorithms`]), the phase framework for compatible choice models
//! ([`framework`]), exhaustive desk-scale property checkers and brute-force
//! optimum oracles ([`verify`]), and instance generators plus the on-disk
//! instance format ([`instances`]).

pub mod algorithms;
pub mod assortment;
pub mod constraints;
pub mod error;
pub mod framework;
pub mod ground;
pub mod instances;
pub mod oracle;
pub mod verify;

pub use error::Error;
pub use ground::{ElemSet, GroundSet, Order};
pub use oracle::{marginal, wrap_noisy, CountingOracle, NoisyOracle, SetFunction, ValueOracle};

/// Absolute tolerance for all value comparisons in algorithms and checkers.
pub const TOL: f64 = 1e-9;
