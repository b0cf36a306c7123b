//! Joint q-numerical ranges and radii of complex matrix tuples, plus the
//! A-weighted (semi-Hilbert) variant.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod crange;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod random;
pub mod range;
pub mod report;
pub mod sampler;
pub mod semi_hilbert;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ComplexMatrix, FieldMode, OperatorTuple, QParam, Seed};
