//! Baseband building blocks for equalizing α–µ fading channels.
//!
//! The crate is `no_std` (it needs `alloc`) and carries everything that is
//! pure computation: the α–µ envelope law, a BPSK modem with multipath and
//! AWGN, a least-squares zero-forcing equalizer, LMS and RLS adaptive
//! equalizers, and the Monte Carlo experiment engine. File formats, the CLI
//! and threading live in the `fadeq` crate.
//!
//! All randomness is drawn from caller-supplied generators, so every result
//! is reproducible from a seed.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adaptive;
pub mod alpha_mu;
mod error;
pub mod harness;
pub mod linalg;
pub mod signal;
pub mod special;
pub mod zf;

pub use error::{Error, Result};

/// Complex baseband sample.
pub type C64 = num_complex::Complex64;
