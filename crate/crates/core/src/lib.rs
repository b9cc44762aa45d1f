//! Coset-code achievable rate regions for the two-user multiple-access channel
//! with distributed states known at the transmitters.
//!
//! The crate has four layers. [`algebra`] holds finite fields, Abelian groups
//! and nested coset codes. [`info`] computes entropies, typicality and the
//! group information quantities. [`regions`] evaluates the unstructured and
//! coset-code sum-rate bounds and searches test channels. [`codesim`] runs
//! Monte Carlo simulations of the coset-code scheme and exhaustive checks of
//! the code-ensemble properties. [`cli`] drives all of them from the command line.

pub mod algebra;
pub mod cli;
pub mod codesim;
mod error;
pub mod info;
pub mod regions;

pub use error::{Error, Result};
