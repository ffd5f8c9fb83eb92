//! Experiment runner for the waveform comparison toolkit.
//!
//! A run is described by a TOML file ([`config`]); [`runner`] executes it and
//! [`output`] writes CSV artifacts plus a manifest.

pub mod config;
pub mod output;
pub mod presets;
pub mod runner;

pub use wavelab_core;
