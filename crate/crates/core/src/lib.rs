//! Frenet curves in quaternionic projective space, their twistor projections,
//! and the tangent, osculating and enveloping constructions between them.

pub mod constructions;
pub mod error;
pub mod field;
pub mod frenet;
pub mod grid;
pub mod integrate;
pub mod metrics;
pub mod pipeline;
pub mod poly;
pub mod quaternion;
pub mod rational;
pub mod surface;

pub use error::{Error, Result};
