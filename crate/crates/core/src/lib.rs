//! Conformal-array STAP toolkit: range-dependent clutter simulation for a
//! cylindrical array, per-range-cell sparse angle-Doppler spectrum recovery,
//! registration transforms that align training data with the test cell, and
//! IF-loss evaluation of the resulting adaptive filters.

pub mod clutter;
pub mod compensation;
pub mod config;
pub mod dictionary;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod geometry;
pub mod linalg;
pub mod sparse;
pub mod steering;

pub use error::{Error, Result};
