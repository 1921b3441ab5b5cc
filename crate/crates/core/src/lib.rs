//! Gaussian additive processes with a bounded-variation mean function and an
//! increasing variance function, their Wiener integrals, martingale
//! classification and random-series expansions.

pub mod error;
pub mod funcspace;
pub mod integral;
pub mod martingale;
pub mod process;
pub mod series;
pub mod stats;
pub mod stieltjes;

pub use error::{Error, Result};
