//! Toolkit for dual frames under probability-modelled erasures.
//!
//! The crate computes the probabilistic error operator of a dual pair, its
//! erasure measures (operator norm, spectral radius, and their
//! lambda-weighted average, maximized over erasure locations), searches for
//! optimal duals of a fixed frame over the full affine dual space,
//! evaluates the sufficiency/uniqueness certificates for the canonical
//! dual, constructs the extremal probabilistic equal-norm Parseval frames,
//! and cross-checks the analytic measures with a seeded Monte-Carlo
//! transmission simulation.
//!
//! Everything is deterministic: random inputs come from a fixed splittable
//! generator, and the optimizer is a two-phase (subgradient + smoothing
//! Newton) method with no randomized components.

pub mod construct;
pub mod erasure;
pub mod error;
pub mod frame;
pub mod numerics;
pub mod optimal;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
