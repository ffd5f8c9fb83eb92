//! Baseband waveform kernels: OQAM filter banks, DFT spreading, OFDM
//! baselines, fading channels and measurement utilities.
//!
//! The crate is `no_std` with `alloc`; file formats, configuration and
//! parallel execution live in the `wavelab` crate.
#![no_std]
extern crate alloc;

pub mod channel;
pub mod error;
pub mod fbmc;
pub mod filters;
pub mod grid;
pub mod link;
pub mod metrics;
pub mod rng;
pub mod spectral;
pub mod spreading;

pub use error::{Error, Result};
pub use num_complex::Complex64;
