//! Discrete exterior calculus on weighted graphs.
//!
//! The crate works with finite truncations of infinite, locally finite
//! weighted graphs: cochains and the operators `d`, `δ`, `D = d + δ`, the
//! constrained Rayleigh machinery behind the non-parabolicity constant, and
//! generators for lattices, regular trees and star-like graphs.

pub mod cochain;
pub mod error;
pub mod families;
pub mod graph;
pub mod lab;
pub mod operators;
pub mod spectral;

pub use error::{Error, Result};
