//! Exact arithmetic over rings of integers of quadratic fields, intersectivity
//! scans for polynomials over those rings, and finite-window experiments on
//! polynomial multiple recurrence.
//!
//! The crate is `no_std` with `alloc`. Enable the `parallel` feature to run
//! prime scans and window scans on rayon; results are identical either way.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod ideal;
pub mod intersectivity;
pub mod largeness;
pub mod number_field;
pub mod poly;

mod arith;
mod par;

pub use error::{Error, Result};
pub use ideal::{Ideal, PrimeFactor};
pub use number_field::{AlgInt, Field};
pub use poly::{OPoly, ZPoly, ZPolyVector};

/// Limits that keep enumerations from exploding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest residue system (or candidate set) any single step may enumerate.
    pub residue_cap: u64,
}

impl Limits {
    pub const DEFAULT_RESIDUE_CAP: u64 = 10_000_000;
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            residue_cap: Self::DEFAULT_RESIDUE_CAP,
        }
    }
}
