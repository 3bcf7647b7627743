//! A Monte Carlo and exact-computation laboratory for the wetting transition
//! of a pinned harmonic crystal (lattice free field) on Z^d, d >= 3.
//!
//! The field lives on a box with fixed boundary values; on the energy window
//! it collects a (possibly disordered) reward when it visits the band [0, 1]
//! and pays a soft or hard penalty for dipping below zero. The crate
//! provides:
//!
//! - exact free-field linear algebra (spectral solves, sampling, Green
//!   function entries) in [`field`] and [`sigma`];
//! - the IID disorder environment and its tilted weights in [`disorder`];
//! - the interacting Gibbs weight in [`model`];
//! - exact single-site heat-bath dynamics and monotone couplings in
//!   [`sampler`];
//! - free-energy and contact-density estimators, small-lattice oracles, the
//!   one-site asymptotic formulas, reduced partition functions and
//!   wall-strength gap bounds in [`estimators`];
//! - a batch experiment driver with reproducible CSV/manifest output in
//!   [`runner`] (see the `wetting-lab` binary).

pub mod disorder;
pub mod estimators;
pub mod field;
pub mod lattice;
pub mod model;
pub mod normal;
pub mod quad;
pub mod rngutil;
pub mod sampler;
pub mod sigma;
pub mod stats;

pub mod config;
pub mod runner;
