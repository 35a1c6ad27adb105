//! Numerical toolkit for the wave packet transform with scaled windows,
//! free and potential-driven Schrodinger propagation, classical
//! Hamiltonian flow, and phase-space singularity detection built on top
//! of them.
//!
//! The layering is strict: `special` and `fields` know nothing about
//! transforms; `packet` provides closed-form reference values for every
//! window/signal pair that admits them; `wpt` is the grid pipeline tested
//! against `packet`; `potential`, `schrodinger` and `hamflow` supply the
//! quantum and classical dynamics; `wavefront` and `verify` sit on top.

pub mod error;
pub mod expr;
pub mod fields;
pub mod hamflow;
pub mod packet;
pub mod potential;
pub mod schrodinger;
pub mod special;
pub mod verify;
pub mod wavefront;
pub mod wpt;

pub use error::{Error, Result};
