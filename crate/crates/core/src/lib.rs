//! Equilibrium computation for finite games with symmetry groups.
//!
//! The crate computes and verifies correlated equilibria, exchangeable
//! equilibria (correlated equilibria that are mixtures of group-invariant
//! product distributions, witnessed by explicit certificates), and their
//! order-m refinements built on powers of a game. Everything except the
//! eigenvalue test and the order-m column oracle runs over exact rational
//! arithmetic.

// Index-driven loops mirror the tensor arithmetic and stay.
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod rational;

pub mod algebra;
pub mod deviation;
pub mod dnn;
pub mod equilibria;
pub mod game;
pub mod group;
pub mod json;
pub mod lp;
pub mod orderm;

pub use error::{Error, Result};
pub use rational::Rat;
