//! Piecewise regression with difference-of-max models.
//!
//! This crate fits continuous models of the form
//!
//! ```text
//! Phi(x) = max{ V g(x) } - max{ W h(x) }
//! ```
//!
//! to sampled data by solving a mixed-integer quadratic program to global
//! optimality with the built-in branch-and-bound solver. The feature maps
//! `g` and `h` are user-chosen basis vectors (affine, monomial, sinusoidal),
//! so the same machinery covers convex piecewise-affine fits (`p2 = 0`),
//! general piecewise-affine fits, and curved segment families.
//!
//! The main pieces:
//!
//! * [`features`] — basis functions and feature maps `g`, `h`.
//! * [`model`] — the trained [`PiecewiseModel`](model::PiecewiseModel) and fit metrics.
//! * [`formulation`] — builders for the training MIQPs and binary-free QPs.
//! * [`qpsolver`] — an operator-splitting convex QP solver with a polish step.
//! * [`bnb`] — branch-and-bound over the segment-assignment binaries, plus an
//!   exhaustive oracle for certifying small instances.
//! * [`cluster`] — k-means++ preclustering for the reduced formulations.
//! * [`export`] — mixed-integer embeddings of trained models and LP-format text.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std` feature
//! enables wall-clock time limits and multi-threaded tree search.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bnb;
pub mod cluster;
pub mod data;
pub mod export;
pub mod features;
pub mod formulation;
pub mod linalg;
pub mod model;
pub mod program;
pub mod qpsolver;

mod error;
mod math;

pub use data::Dataset;
pub use error::Error;
pub use features::{affine_feature_map, BasisFunction, FeatureMap};
pub use model::{FitMetrics, PiecewiseModel};
pub use program::{MixedIntegerProgram, QuadraticProgram};

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
